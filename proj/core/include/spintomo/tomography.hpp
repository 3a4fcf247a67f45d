#pragma once

// Five-direction spin-1 tomography: forward probability prediction, the
// linear measurement map, linear-inversion reconstruction (which may return a
// non-positive matrix, faithfully), maximum-likelihood reconstruction via a
// damped RrhoR fixed point, and the internal-consistency relations among the
// five measurement operators.
//
// Reconstruction is single-threaded and deterministic; independent inputs may
// be processed concurrently.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "spintomo/fock.hpp"
#include "spintomo/spin1.hpp"

namespace spintomo {

/// Per-direction outcome probabilities (P(20), P(11), P(02)) = (P+, P0, P-).
/// Invariant: every row sums to 1 within 1e-6.
class ProbabilityTable {
public:
    ProbabilityTable(std::vector<SpinDirection> directions,
                     std::vector<std::array<double, 3>> rows);

    /// Renormalizes each row to unit sum first. Rows whose sums deviate from 1
    /// by more than `max_row_deviation` are rejected (printed tables carry
    /// rounding, so ingestion tolerates up to 5e-2 by default).
    static ProbabilityTable renormalized(std::vector<SpinDirection> directions,
                                         std::vector<std::array<double, 3>> rows,
                                         double max_row_deviation = 5e-2);

    const std::vector<SpinDirection>& directions() const { return directions_; }
    const std::vector<std::array<double, 3>>& rows() const { return rows_; }
    std::size_t size() const { return rows_.size(); }

private:
    std::vector<SpinDirection> directions_;
    std::vector<std::array<double, 3>> rows_;
};

/// Integer outcome counts per direction; at least one positive count per row.
struct CountRecord {
    std::vector<SpinDirection> directions;
    std::vector<std::array<long, 3>> counts;

    void validate() const;
    long total() const;
    /// Counts divided by row totals.
    ProbabilityTable to_table() const;
};

/// counts[k][m] = round(shots * P[k][m]).
CountRecord counts_from_table(const ProbabilityTable& table, double shots_per_direction);

/// P_m = Tr(rho Pi_m) for the eigenprojectors of n.L onto {+1, 0, -1}.
/// rho need only be Hermitian (PSD not required), so round trips through
/// non-positive raw reconstructions stay exact.
std::array<double, 3> predicted_probs(const Mat3& rho, const SpinDirection& n);
std::array<double, 3> predicted_probs(const DensityMatrix& rho, const SpinDirection& n);

ProbabilityTable predicted_table(const Mat3& rho, const std::vector<SpinDirection>& directions);

// Fixed parameterization of Hermitian 3x3 matrices by 9 real coordinates:
// x0 along I/sqrt3 and x1..x8 along the operator_basis() elements / sqrt2.
Eigen::Matrix<double, 9, 1> coordinates_of(const Mat3& hermitian);
Mat3 matrix_from_coordinates(const Eigen::Matrix<double, 9, 1>& x);

/// The linear map from the 9 matrix coordinates to stacked outcome
/// probabilities (3 rows per direction).
struct MeasurementMap {
    Eigen::MatrixXd matrix; // (3k) x 9
    int rank = 0;           // numerical rank, singular values above 1e-10
    bool full_rank() const { return rank == 9; }
};

MeasurementMap measurement_map(const std::vector<SpinDirection>& directions);

struct LinearInversionResult {
    DensityMatrix rho;    // trace-1 Hermitian; possibly non-PSD
    int rank = 0;         // rank of the measurement map
    bool rank_deficient = false; // true -> minimum-norm least-squares solution
};

/// Least-squares solve of the measurement map with the unit-trace constraint
/// eliminated exactly. No positivity projection is applied.
LinearInversionResult linear_inversion(const ProbabilityTable& table);

struct MleSettings {
    double epsilon = 0.2;          // damping of the RrhoR update
    double loglik_tol = 1e-10;     // convergence: log-likelihood gain below this
    long max_iterations = 100000;
    bool record_trace = false;     // keep the per-iteration log-likelihood
};

struct MleResult {
    DensityMatrix rho = DensityMatrix::maximally_mixed();
    double log_likelihood = 0.0;
    long iterations = 0;
    bool converged = false;
    std::vector<double> loglik_trace; // filled when record_trace is set
};

/// Maximizes the product of per-direction multinomial likelihoods with the
/// damped fixed-point iteration rho <- N[(1-eps) rho + eps R rho R],
/// R = sum (n_km / P_km) Pi_km / N_total, starting from I/3. Iterates are PSD
/// and trace-1 by construction. Hitting the iteration cap returns the best
/// iterate flagged non-converged.
MleResult mle_reconstruct(const CountRecord& counts, const MleSettings& settings = {});

/// Log of the multinomial likelihood product for given counts.
double log_likelihood(const Mat3& rho, const CountRecord& counts);

struct ConsistencyReport {
    double residual_l1 = 0.0;
    double residual_l2 = 0.0;
    std::optional<double> residual_lz; // present when an Lz datum is supplied
};

/// Residuals of the linear relations among the five measurement operators,
///   L1 = (L3 - L4 + L5)/sqrt2,  L2 = (L3 + L4 - L5)/sqrt2,
///   Lz = (-L3 + L4 + L5)/sqrt2,
/// evaluated on measured first moments <L> = P+ - P-. The table must hold the
/// five standard directions in order. The Lz check runs when either an
/// outcome triple or a bare first moment is supplied.
ConsistencyReport consistency_check(const ProbabilityTable& table,
                                    std::optional<std::array<double, 3>> lz_probs = std::nullopt);
ConsistencyReport consistency_check_mean(const ProbabilityTable& table,
                                         std::optional<double> lz_first_moment);

/// Reconstruction summary: spectra, purities, and the trace-norm distance
/// (no factor 1/2) between the raw and maximum-likelihood estimates.
struct TomographyResult {
    std::optional<DensityMatrix> rho_raw;
    std::optional<DensityMatrix> rho_ml;
    std::optional<Eigen::Vector3d> eigenvalues_raw; // descending
    std::optional<Eigen::Vector3d> eigenvalues_ml;
    std::optional<double> purity_raw;
    std::optional<double> purity_ml;
    std::optional<double> trace_norm_distance;
    std::optional<double> log_likelihood_ml;
    std::optional<long> iterations;
    std::optional<bool> converged;
    std::optional<int> inversion_rank;
};

/// Diagnostics for a raw/ML pair.
TomographyResult diagnostics(const DensityMatrix& rho_raw, const DensityMatrix& rho_ml);

enum class ReconstructionMethod { linear, mle, both };

/// Full pipeline: linear inversion and/or MLE plus diagnostics. When the
/// input is a probability table, MLE counts are synthesized with
/// `effective_shots` per direction.
TomographyResult run_tomography(const ProbabilityTable& table,
                                ReconstructionMethod method,
                                double effective_shots = 1e4,
                                const MleSettings& settings = {});
TomographyResult run_tomography(const CountRecord& counts,
                                ReconstructionMethod method,
                                const MleSettings& settings = {});

} // namespace spintomo
