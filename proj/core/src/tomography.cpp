#include "spintomo/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/SVD>

namespace spintomo {

namespace {

constexpr double kInvSqrt3 = 0.5773502691896257645;
constexpr double kInvSqrt2 = 0.7071067811865475244;
constexpr double kRankThreshold = 1e-10;

const std::array<Mat3, 9>& coordinate_basis() {
    static const std::array<Mat3, 9> basis = [] {
        std::array<Mat3, 9> e;
        e[0] = kInvSqrt3 * Mat3::Identity();
        const auto lams = operator_basis().all();
        for (int a = 0; a < 8; ++a) {
            e[a + 1] = kInvSqrt2 * lams[static_cast<std::size_t>(a)];
        }
        return e;
    }();
    return basis;
}

void require_five_standard_directions(const ProbabilityTable& table, const char* who) {
    const auto& expected = five_directions();
    if (table.size() != expected.size()) {
        std::ostringstream os;
        os << who << ": expected the five standard directions, got " << table.size() << " rows";
        throw ValidationError(os.str());
    }
    for (std::size_t k = 0; k < expected.size(); ++k) {
        if ((table.directions()[k].axis() - expected[k].axis()).norm() > 1e-9) {
            std::ostringstream os;
            os << who << ": direction " << k + 1 << " is not L" << k + 1;
            throw ValidationError(os.str());
        }
    }
}

double row_first_moment(const std::array<double, 3>& row) {
    return row[0] - row[2];
}

} // namespace

ProbabilityTable::ProbabilityTable(std::vector<SpinDirection> directions,
                                   std::vector<std::array<double, 3>> rows)
    : directions_(std::move(directions)), rows_(std::move(rows)) {
    if (directions_.size() != rows_.size()) {
        throw ValidationError("ProbabilityTable: directions and rows differ in length");
    }
    if (rows_.empty()) {
        throw ValidationError("ProbabilityTable: empty table");
    }
    for (std::size_t k = 0; k < rows_.size(); ++k) {
        const auto& r = rows_[k];
        const double sum = r[0] + r[1] + r[2];
        if (std::abs(sum - 1.0) > 1e-6) {
            std::ostringstream os;
            os << "ProbabilityTable: row " << k + 1 << " sums to " << sum
               << ", expected 1 within 1e-6";
            throw ValidationError(os.str());
        }
    }
}

ProbabilityTable ProbabilityTable::renormalized(std::vector<SpinDirection> directions,
                                                std::vector<std::array<double, 3>> rows,
                                                double max_row_deviation) {
    for (std::size_t k = 0; k < rows.size(); ++k) {
        auto& r = rows[k];
        const double sum = r[0] + r[1] + r[2];
        if (std::abs(sum - 1.0) > max_row_deviation) {
            std::ostringstream os;
            os << "ProbabilityTable::renormalized: row " << k + 1 << " sums to " << sum
               << ", beyond the accepted deviation " << max_row_deviation;
            throw ValidationError(os.str());
        }
        if (sum <= 0.0) {
            throw ValidationError("ProbabilityTable::renormalized: non-positive row sum");
        }
        for (double& p : r) p /= sum;
    }
    return ProbabilityTable(std::move(directions), std::move(rows));
}

void CountRecord::validate() const {
    if (directions.size() != counts.size()) {
        throw ValidationError("CountRecord: directions and counts differ in length");
    }
    if (counts.empty()) {
        throw ValidationError("CountRecord: empty record");
    }
    for (std::size_t k = 0; k < counts.size(); ++k) {
        const auto& c = counts[k];
        if (c[0] < 0 || c[1] < 0 || c[2] < 0) {
            throw ValidationError("CountRecord: negative count in row " + std::to_string(k + 1));
        }
        if (c[0] + c[1] + c[2] <= 0) {
            throw ValidationError("CountRecord: row " + std::to_string(k + 1)
                                  + " has no positive count");
        }
    }
}

long CountRecord::total() const {
    long t = 0;
    for (const auto& c : counts) t += c[0] + c[1] + c[2];
    return t;
}

ProbabilityTable CountRecord::to_table() const {
    validate();
    std::vector<std::array<double, 3>> rows(counts.size());
    for (std::size_t k = 0; k < counts.size(); ++k) {
        const double n = static_cast<double>(counts[k][0] + counts[k][1] + counts[k][2]);
        rows[k] = {counts[k][0] / n, counts[k][1] / n, counts[k][2] / n};
    }
    return ProbabilityTable(directions, std::move(rows));
}

CountRecord counts_from_table(const ProbabilityTable& table, double shots_per_direction) {
    if (!(shots_per_direction > 0.0)) {
        throw ValidationError("counts_from_table: shots must be positive");
    }
    CountRecord rec;
    rec.directions = table.directions();
    rec.counts.resize(table.size());
    for (std::size_t k = 0; k < table.size(); ++k) {
        for (int m = 0; m < 3; ++m) {
            rec.counts[k][static_cast<std::size_t>(m)] =
                std::lround(shots_per_direction * table.rows()[k][static_cast<std::size_t>(m)]);
        }
    }
    rec.validate();
    return rec;
}

std::array<double, 3> predicted_probs(const Mat3& rho, const SpinDirection& n) {
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-9
        || std::abs(rho.trace().real() - 1.0) > 1e-9) {
        throw ValidationError("predicted_probs: rho must be Hermitian with unit trace");
    }
    const auto projectors = direction_projectors(n);
    std::array<double, 3> p{};
    for (int m = 0; m < 3; ++m) {
        p[static_cast<std::size_t>(m)] = (rho * projectors[static_cast<std::size_t>(m)]).trace().real();
    }
    return p;
}

std::array<double, 3> predicted_probs(const DensityMatrix& rho, const SpinDirection& n) {
    return predicted_probs(rho.matrix(), n);
}

ProbabilityTable predicted_table(const Mat3& rho, const std::vector<SpinDirection>& directions) {
    std::vector<std::array<double, 3>> rows;
    rows.reserve(directions.size());
    for (const auto& n : directions) rows.push_back(predicted_probs(rho, n));
    return ProbabilityTable(directions, std::move(rows));
}

Eigen::Matrix<double, 9, 1> coordinates_of(const Mat3& hermitian) {
    const auto& basis = coordinate_basis();
    Eigen::Matrix<double, 9, 1> x;
    for (int a = 0; a < 9; ++a) {
        x(a) = (basis[static_cast<std::size_t>(a)].adjoint() * hermitian).trace().real();
    }
    return x;
}

Mat3 matrix_from_coordinates(const Eigen::Matrix<double, 9, 1>& x) {
    const auto& basis = coordinate_basis();
    Mat3 m = Mat3::Zero();
    for (int a = 0; a < 9; ++a) {
        m += x(a) * basis[static_cast<std::size_t>(a)];
    }
    return m;
}

MeasurementMap measurement_map(const std::vector<SpinDirection>& directions) {
    if (directions.empty()) {
        throw ValidationError("measurement_map: no directions");
    }
    const auto& basis = coordinate_basis();
    MeasurementMap map;
    map.matrix.resize(static_cast<Eigen::Index>(3 * directions.size()), 9);
    for (std::size_t k = 0; k < directions.size(); ++k) {
        const auto projectors = direction_projectors(directions[k]);
        for (int m = 0; m < 3; ++m) {
            for (int a = 0; a < 9; ++a) {
                map.matrix(static_cast<Eigen::Index>(3 * k + static_cast<std::size_t>(m)), a) =
                    (basis[static_cast<std::size_t>(a)].adjoint()
                     * projectors[static_cast<std::size_t>(m)]).trace().real();
            }
        }
    }
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(map.matrix);
    map.rank = static_cast<int>((svd.singularValues().array() > kRankThreshold).count());
    return map;
}

LinearInversionResult linear_inversion(const ProbabilityTable& table) {
    const MeasurementMap map = measurement_map(table.directions());

    Eigen::VectorXd p(static_cast<Eigen::Index>(3 * table.size()));
    for (std::size_t k = 0; k < table.size(); ++k) {
        for (int m = 0; m < 3; ++m) {
            p(static_cast<Eigen::Index>(3 * k + static_cast<std::size_t>(m))) =
                table.rows()[k][static_cast<std::size_t>(m)];
        }
    }

    // Unit trace pins the identity coordinate exactly; solve the remaining
    // 8 coordinates by least squares (minimum-norm when rank deficient).
    const double x0 = kInvSqrt3; // Tr(rho E0) = Tr(rho)/sqrt3 = 1/sqrt3
    const Eigen::VectorXd rhs = p - map.matrix.col(0) * x0;
    const Eigen::MatrixXd reduced = map.matrix.rightCols(8);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(reduced, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const int reduced_rank = static_cast<int>((svd.singularValues().array() > kRankThreshold).count());
    svd.setThreshold(kRankThreshold);
    const Eigen::VectorXd x_rest = svd.solve(rhs);

    Eigen::Matrix<double, 9, 1> x;
    x(0) = x0;
    x.tail(8) = x_rest;

    LinearInversionResult result{
        DensityMatrix(matrix_from_coordinates(x)),
        map.rank,
        reduced_rank < 8,
    };
    return result;
}

double log_likelihood(const Mat3& rho, const CountRecord& counts) {
    double ll = 0.0;
    for (std::size_t k = 0; k < counts.directions.size(); ++k) {
        const auto p = predicted_probs(rho, counts.directions[k]);
        for (int m = 0; m < 3; ++m) {
            const long n = counts.counts[k][static_cast<std::size_t>(m)];
            if (n > 0) {
                ll += static_cast<double>(n)
                      * std::log(std::max(p[static_cast<std::size_t>(m)], 1e-15));
            }
        }
    }
    return ll;
}

MleResult mle_reconstruct(const CountRecord& counts, const MleSettings& settings) {
    counts.validate();
    if (!(settings.epsilon > 0.0 && settings.epsilon <= 1.0)) {
        throw ValidationError("mle_reconstruct: epsilon must be in (0, 1]");
    }

    std::vector<std::array<Mat3, 3>> projectors;
    projectors.reserve(counts.directions.size());
    for (const auto& n : counts.directions) projectors.push_back(direction_projectors(n));

    const double total = static_cast<double>(counts.total());
    Mat3 rho = Mat3::Identity() / 3.0;
    double ll = log_likelihood(rho, counts);

    MleResult result;
    if (settings.record_trace) result.loglik_trace.push_back(ll);

    long it = 0;
    bool converged = false;
    for (it = 1; it <= settings.max_iterations; ++it) {
        Mat3 r_op = Mat3::Zero();
        for (std::size_t k = 0; k < projectors.size(); ++k) {
            for (int m = 0; m < 3; ++m) {
                const long n = counts.counts[k][static_cast<std::size_t>(m)];
                if (n == 0) continue;
                const double p = std::max(
                    (rho * projectors[k][static_cast<std::size_t>(m)]).trace().real(), 1e-12);
                r_op += (static_cast<double>(n) / p) * projectors[k][static_cast<std::size_t>(m)];
            }
        }
        r_op /= total;

        Mat3 next = (1.0 - settings.epsilon) * rho
                  + settings.epsilon * (r_op * rho * r_op);
        next = 0.5 * (next + next.adjoint().eval());
        next /= next.trace().real();

        const double ll_next = log_likelihood(next, counts);
        rho = next;
        if (settings.record_trace) result.loglik_trace.push_back(ll_next);
        if (std::abs(ll_next - ll) < settings.loglik_tol) {
            ll = ll_next;
            converged = true;
            break;
        }
        ll = ll_next;
    }

    result.rho = DensityMatrix(rho, 1e-9);
    result.log_likelihood = ll;
    result.iterations = std::min(it, settings.max_iterations);
    result.converged = converged;
    return result;
}

namespace {

ConsistencyReport consistency_from_moments(const std::array<double, 5>& m,
                                           std::optional<double> lz_first_moment) {
    ConsistencyReport report;
    report.residual_l1 = std::abs(m[0] - (m[2] - m[3] + m[4]) * kInvSqrt2);
    report.residual_l2 = std::abs(m[1] - (m[2] + m[3] - m[4]) * kInvSqrt2);
    if (lz_first_moment) {
        report.residual_lz =
            std::abs(*lz_first_moment - (-m[2] + m[3] + m[4]) * kInvSqrt2);
    }
    return report;
}

std::array<double, 5> table_first_moments(const ProbabilityTable& table) {
    std::array<double, 5> m{};
    for (std::size_t k = 0; k < 5; ++k) m[k] = row_first_moment(table.rows()[k]);
    return m;
}

} // namespace

ConsistencyReport consistency_check(const ProbabilityTable& table,
                                    std::optional<std::array<double, 3>> lz_probs) {
    require_five_standard_directions(table, "consistency_check");
    std::optional<double> lz_mean;
    if (lz_probs) {
        // entries may be quasi-probabilities from a non-positive matrix; only
        // the normalization is required
        const auto& p = *lz_probs;
        const double sum = p[0] + p[1] + p[2];
        if (std::abs(sum - 1.0) > 1e-6) {
            std::ostringstream os;
            os << "consistency_check: lz outcomes sum to " << sum << ", expected 1 within 1e-6";
            throw ValidationError(os.str());
        }
        lz_mean = p[0] - p[2];
    }
    return consistency_from_moments(table_first_moments(table), lz_mean);
}

ConsistencyReport consistency_check_mean(const ProbabilityTable& table,
                                         std::optional<double> lz_first_moment) {
    require_five_standard_directions(table, "consistency_check");
    return consistency_from_moments(table_first_moments(table), lz_first_moment);
}

TomographyResult diagnostics(const DensityMatrix& rho_raw, const DensityMatrix& rho_ml) {
    TomographyResult r;
    r.rho_raw = rho_raw;
    r.rho_ml = rho_ml;
    r.eigenvalues_raw = rho_raw.eigenvalues();
    r.eigenvalues_ml = rho_ml.eigenvalues();
    r.purity_raw = rho_raw.purity();
    r.purity_ml = rho_ml.purity();
    r.trace_norm_distance = trace_norm(rho_raw.matrix() - rho_ml.matrix());
    return r;
}

TomographyResult run_tomography(const ProbabilityTable& table,
                                ReconstructionMethod method,
                                double effective_shots,
                                const MleSettings& settings) {
    TomographyResult result;
    if (method == ReconstructionMethod::linear || method == ReconstructionMethod::both) {
        const auto inv = linear_inversion(table);
        result.rho_raw = inv.rho;
        result.eigenvalues_raw = inv.rho.eigenvalues();
        result.purity_raw = inv.rho.purity();
        result.inversion_rank = inv.rank;
    }
    if (method == ReconstructionMethod::mle || method == ReconstructionMethod::both) {
        const auto mle = mle_reconstruct(counts_from_table(table, effective_shots), settings);
        result.rho_ml = mle.rho;
        result.eigenvalues_ml = mle.rho.eigenvalues();
        result.purity_ml = mle.rho.purity();
        result.log_likelihood_ml = mle.log_likelihood;
        result.iterations = mle.iterations;
        result.converged = mle.converged;
    }
    if (result.rho_raw && result.rho_ml) {
        result.trace_norm_distance = trace_norm(result.rho_raw->matrix() - result.rho_ml->matrix());
    }
    return result;
}

TomographyResult run_tomography(const CountRecord& counts,
                                ReconstructionMethod method,
                                const MleSettings& settings) {
    TomographyResult result;
    if (method == ReconstructionMethod::linear || method == ReconstructionMethod::both) {
        const auto inv = linear_inversion(counts.to_table());
        result.rho_raw = inv.rho;
        result.eigenvalues_raw = inv.rho.eigenvalues();
        result.purity_raw = inv.rho.purity();
        result.inversion_rank = inv.rank;
    }
    if (method == ReconstructionMethod::mle || method == ReconstructionMethod::both) {
        const auto mle = mle_reconstruct(counts, settings);
        result.rho_ml = mle.rho;
        result.eigenvalues_ml = mle.rho.eigenvalues();
        result.purity_ml = mle.rho.purity();
        result.log_likelihood_ml = mle.log_likelihood;
        result.iterations = mle.iterations;
        result.converged = mle.converged;
    }
    if (result.rho_raw && result.rho_ml) {
        result.trace_norm_distance = trace_norm(result.rho_raw->matrix() - result.rho_ml->matrix());
    }
    return result;
}

} // namespace spintomo
