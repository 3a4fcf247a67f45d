#pragma once

// File formats.
//
//  - Density matrices: JSON {"re": [[3x3]], "im": [[3x3]]}, row-major decimal.
//    Deserialization re-validates Hermiticity and unit trace at 1e-9.
//  - Circuits: JSON array of {"kind": "phase"|"bs"|"mzi", "param": radians,
//    "mode": "c"|"d"} (mode on phase elements only).
//  - Tomography data: JSON {"directions": [{"name": "L1", "probs": [p20, p11,
//    p02]}, ...], "lz": {...}} with integer "counts" accepted in place of
//    "probs"; a direction may carry an explicit axis "n": [x, y, z] instead of
//    a name; the optional "lz" record takes "probs", "counts", or "mean".
//  - Fringe scans: CSV with header phi,count20,count11,count02 (integer
//    counts) or phi,p20,p11,p02 (probabilities); phi printed with 9
//    significant digits.
//
// Parse failures throw ValidationError with a single-line message;
// filesystem failures throw IoError.

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "spintomo/fringe.hpp"
#include "spintomo/optics.hpp"
#include "spintomo/tomography.hpp"

namespace spintomo {

std::string read_text_file(const std::filesystem::path& path);
/// Writes through a sibling temp file and renames, so readers never observe a
/// partial file.
void write_text_file_atomic(const std::filesystem::path& path, const std::string& content);

std::string density_matrix_to_json(const DensityMatrix& rho);
DensityMatrix density_matrix_from_json(const std::string& text);

/// 3x3 Hermitian matrix in the same {"re","im"} layout, without the trace
/// check. Used for reference matrices whose printed entries carry rounding.
Mat3 hermitian3_from_json(const std::string& text);
std::string hermitian3_to_json(const Mat3& m);

std::string circuit_to_json(const std::vector<CircuitElement>& elements);
std::vector<CircuitElement> circuit_from_json(const std::string& text);

std::string source_params_to_json(const SourceParams& params);
SourceParams source_params_from_json(const std::string& text);

SpinDirection direction_from_json(const std::string& text);
std::string direction_to_json(const SpinDirection& n);

/// Parsed tomography input; rows are renormalized on ingestion (deviation up
/// to 5e-2), counts are kept exact.
struct TomographyInput {
    std::optional<ProbabilityTable> table;
    std::optional<CountRecord> counts;
    std::optional<std::array<double, 3>> lz_probs;
    std::optional<std::array<long, 3>> lz_counts;
    std::optional<double> lz_mean;

    /// First moment of the Lz record, whichever form was supplied.
    std::optional<double> lz_first_moment() const;
    /// The probability table (derived from counts when necessary).
    ProbabilityTable effective_table() const;
};

TomographyInput tomography_input_from_json(const std::string& text);
std::string probability_table_to_json(const ProbabilityTable& table,
                                      std::optional<double> lz_mean = std::nullopt);

std::string tomography_result_to_json(const TomographyResult& result);

std::string consistency_report_to_json(const ConsistencyReport& report);

std::string fringe_probabilities_to_csv(const FringeProbabilities& probs);
FringeProbabilities fringe_probabilities_from_csv(const std::string& text, double theta);

std::string fringe_counts_to_csv(const FringeCounts& counts);
FringeCounts fringe_counts_from_csv(const std::string& text, double theta);

std::string fit_result_to_json(const FitResult& fit);

} // namespace spintomo
