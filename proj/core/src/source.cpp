#include "spintomo/source.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "spintomo/optics.hpp"

namespace spintomo {

namespace {

void require_unit_interval(double x, const char* name) {
    if (!(x >= 0.0 && x <= 1.0)) {
        std::ostringstream os;
        os << name << " = " << x << " is outside [0, 1]";
        throw ValidationError(os.str());
    }
}

} // namespace

SourceParams::SourceParams(double r, double v) : contamination(r), visibility(v) {
    require_unit_interval(contamination, "SourceParams: contamination R");
    require_unit_interval(visibility, "SourceParams: visibility V");
}

PureState noon_state() {
    constexpr double kInvSqrt2 = 0.7071067811865475244;
    Vec3 amps;
    amps << kInvSqrt2, 0.0, kInvSqrt2;
    return PureState(amps, Rep::spin1);
}

PureState input_state(double contamination, double relative_phase) {
    require_unit_interval(contamination, "input_state: contamination R");
    const Vec3 mode_a_term =
        beamsplitter_unitary(std::numbers::pi / 4.0, Rep::spin1).matrix().col(0);
    const Complex phase(std::cos(relative_phase), std::sin(relative_phase));
    const Vec3 v = std::sqrt(contamination) * phase * mode_a_term
                 + std::sqrt(1.0 - contamination) * noon_state().amplitudes();
    return PureState::normalized(v, Rep::spin1);
}

double input_norm_closed_form(double contamination) {
    require_unit_interval(contamination, "input_norm_closed_form: contamination R");
    return 1.0 / std::sqrt(1.0 + 2.0 * contamination * (1.0 - contamination));
}

DensityMatrix noisy_state(const PureState& psi, double visibility) {
    require_unit_interval(visibility, "noisy_state: visibility V");
    if (psi.basis() != Rep::spin1) {
        throw ValidationError("noisy_state: expected a spin-1 state");
    }
    const Vec3 v = psi.amplitudes();
    const Mat3 m = visibility * (v * v.adjoint())
                 + (1.0 - visibility) / 3.0 * Mat3::Identity();
    return DensityMatrix(m);
}

} // namespace spintomo
