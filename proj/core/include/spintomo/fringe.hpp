#pragma once

// End-to-end fringe experiment: source state -> phase scan -> MZI -> outcome
// probabilities, Poisson count synthesis, and the weighted nonlinear
// least-squares fit recovering visibility V, contamination R, the per-basis
// normalization counts, and the unknown phase origin.

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "spintomo/random.hpp"
#include "spintomo/source.hpp"

namespace spintomo {

/// Probabilities of the three outcomes (|2;0>, |1;1>, |0;2>) per scan phase.
struct FringeProbabilities {
    double theta = 0.0;
    std::vector<double> phi;                     // strictly increasing
    std::vector<std::array<double, 3>> probs;    // aligned with phi

    void validate() const;
};

/// Integer coincidence counts per scan phase.
struct FringeCounts {
    double theta = 0.0;
    std::vector<double> phi;                     // strictly increasing
    std::vector<std::array<long, 3>> counts;     // aligned with phi

    void validate() const;
};

/// For each phi: diagonal of A rho_in A^dag with A = MZI(theta) . phase(phi on c)
/// and rho_in = noisy_state(input_state(R), V).
FringeProbabilities simulate_fringe(const SourceParams& params, double theta,
                                    const std::vector<double>& phis);

/// Each count drawn Poisson with mean N_xy * P_xy(phi). Deterministic for a
/// fixed generator state.
FringeCounts synthesize_counts(const FringeProbabilities& probs,
                               const std::array<double, 3>& norms, Rng& rng);

/// Fit output. `mixture_visibility` is the fitted convex-mixture weight V;
/// `per_basis_visibility` holds (max-min)/(max+min) of each fitted
/// probability curve, the quantity usually quoted for fringe contrast.
struct FitResult {
    double mixture_visibility = 0.0;   // V
    double contamination = 0.0;        // R
    std::array<double, 3> norms{};     // N20, N11, N02
    double phase_offset = 0.0;         // fitted phase origin, radians
    double residual = 0.0;             // weighted sum of squared residuals
    Eigen::Matrix<double, 6, 6> covariance; // Fisher approximation, parameter order (V, R, d, N20, N11, N02)
    double sigma_visibility = 0.0;
    double sigma_contamination = 0.0;
    std::array<double, 3> per_basis_visibility{};
    bool converged = false;
    bool at_boundary = false;          // V or R pinned to [0,1] edge
    long model_evaluations = 0;
};

/// Weighted least squares (weights 1/max(count,1)) of the count model against
/// the scan. Deterministic multi-start (8 coarse starts) plus
/// Levenberg-Marquardt refinement. Requires >= 8 phases spanning >= pi.
FitResult fit_fringe(const FringeCounts& scan);

/// Visibility (max-min)/(max+min) of one outcome's probability curve under
/// the given source parameters; extrema located by dense scan + refinement
/// over a full period.
double curve_visibility(const SourceParams& params, double theta, int outcome);

} // namespace spintomo
