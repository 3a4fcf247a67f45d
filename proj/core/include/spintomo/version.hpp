#pragma once

namespace spintomo {

inline constexpr const char* version = "0.1.0";

} // namespace spintomo
