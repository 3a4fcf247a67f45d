#pragma once

// The replication suite: runs the full pipeline against the bundled reference
// dataset and checks every headline number at a pinned tolerance. Shared by
// the acceptance test binary and the `replicate-paper` CLI command.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "spintomo/tomography.hpp"

namespace spintomo {

struct ReferenceData {
    ProbabilityTable table;                          // row-renormalized
    std::vector<std::array<double, 3>> printed_rows; // as published
    double lz_mean = 0.0;
    Mat3 rho_raw_published;
    Mat3 rho_ml_published;
    Eigen::Vector3d eigenvalues_published;
    double trace_distance_published = 0.0;
    std::array<double, 3> norms{};
    double mixture_visibility = 0.0;
    double contamination = 0.0;
};

/// Loads the fixture files (tomography_table.json, rho_raw.json, rho_ml.json,
/// fringe_fit.json, expected.json) from a directory.
ReferenceData load_reference_data(const std::filesystem::path& dir);

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string details; // computed values vs targets and tolerances
};

/// Runs all replication criteria. Deterministic for a fixed seed.
std::vector<CriterionResult> run_replication(const ReferenceData& ref, std::uint64_t seed);

int count_failures(const std::vector<CriterionResult>& results);
std::string replication_report_json(const std::vector<CriterionResult>& results,
                                    std::uint64_t seed);

} // namespace spintomo
