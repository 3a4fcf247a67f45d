#include "spintomo/fringe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "spintomo/optics.hpp"

namespace spintomo {

namespace {

constexpr double kPi = std::numbers::pi;

void require_increasing(const std::vector<double>& phi, const char* who) {
    if (phi.empty()) {
        throw ValidationError(std::string(who) + ": empty phase list");
    }
    for (std::size_t i = 1; i < phi.size(); ++i) {
        if (!(phi[i] > phi[i - 1])) {
            throw ValidationError(std::string(who) + ": phases must be strictly increasing");
        }
    }
}

// Probability triples of the analyzer output for a fixed source state.
class FringeModel {
public:
    FringeModel(const SourceParams& params, double theta)
        : rho_(noisy_state(input_state(params.contamination), params.visibility).matrix()),
          mzi_(mzi_unitary(theta, Rep::spin1).matrix()) {}

    std::array<double, 3> probs(double phi) const {
        const Complex e1 = Complex(std::cos(phi), -std::sin(phi));
        const Complex e2 = e1 * e1;
        Mat3 a = mzi_;
        a.col(0) *= e2;
        a.col(1) *= e1;
        const Mat3 out = a * rho_ * a.adjoint();
        return {out(0, 0).real(), out(1, 1).real(), out(2, 2).real()};
    }

private:
    Mat3 rho_;
    Mat3 mzi_;
};

struct FitProblem {
    const FringeCounts& scan;
    std::vector<double> weights; // 1/max(count,1), flattened

    explicit FitProblem(const FringeCounts& s) : scan(s) {
        weights.reserve(3 * s.phi.size());
        for (const auto& c : s.counts) {
            for (int m = 0; m < 3; ++m) {
                weights.push_back(1.0 / std::max<double>(static_cast<double>(c[static_cast<std::size_t>(m)]), 1.0));
            }
        }
    }
};

// parameter vector: (V, R, delta, N20, N11, N02)
using Params = Eigen::Matrix<double, 6, 1>;

Params clamp_params(Params p) {
    p(0) = std::clamp(p(0), 0.0, 1.0);
    p(1) = std::clamp(p(1), 0.0, 1.0);
    for (int i = 3; i < 6; ++i) p(i) = std::max(p(i), 1e-9);
    return p;
}

std::vector<double> model_counts(const FitProblem& prob, const Params& p, long& evals) {
    const FringeModel model(SourceParams(p(1), p(0)), prob.scan.theta);
    std::vector<double> out;
    out.reserve(3 * prob.scan.phi.size());
    for (double phi : prob.scan.phi) {
        const auto pr = model.probs(phi + p(2));
        for (int m = 0; m < 3; ++m) {
            out.push_back(p(3 + m) * pr[static_cast<std::size_t>(m)]);
        }
    }
    ++evals;
    return out;
}

double weighted_sse(const FitProblem& prob, const std::vector<double>& model) {
    double sse = 0.0;
    std::size_t i = 0;
    for (const auto& c : prob.scan.counts) {
        for (int m = 0; m < 3; ++m, ++i) {
            const double r = model[i] - static_cast<double>(c[static_cast<std::size_t>(m)]);
            sse += prob.weights[i] * r * r;
        }
    }
    return sse;
}

// Closed-form weighted least squares for the three norms at fixed (V, R, delta).
void init_norms(const FitProblem& prob, Params& p, long& evals) {
    const FringeModel model(SourceParams(p(1), p(0)), prob.scan.theta);
    std::array<double, 3> num{}, den{};
    for (std::size_t i = 0; i < prob.scan.phi.size(); ++i) {
        const auto pr = model.probs(prob.scan.phi[i] + p(2));
        for (int m = 0; m < 3; ++m) {
            const double w = prob.weights[3 * i + static_cast<std::size_t>(m)];
            num[static_cast<std::size_t>(m)] +=
                w * pr[static_cast<std::size_t>(m)]
                  * static_cast<double>(prob.scan.counts[i][static_cast<std::size_t>(m)]);
            den[static_cast<std::size_t>(m)] +=
                w * pr[static_cast<std::size_t>(m)] * pr[static_cast<std::size_t>(m)];
        }
    }
    ++evals;
    for (int m = 0; m < 3; ++m) {
        p(3 + m) = den[static_cast<std::size_t>(m)] > 0.0
                       ? std::max(num[static_cast<std::size_t>(m)] / den[static_cast<std::size_t>(m)], 1.0)
                       : 1.0;
    }
}

Eigen::MatrixXd numeric_jacobian(const FitProblem& prob, const Params& p, long& evals,
                                 bool central) {
    const std::size_t rows = 3 * prob.scan.phi.size();
    Eigen::MatrixXd jac(static_cast<Eigen::Index>(rows), 6);
    const std::vector<double> base = central ? std::vector<double>() : model_counts(prob, p, evals);
    for (int j = 0; j < 6; ++j) {
        const double h = 1e-6 * std::max(1.0, std::abs(p(j)));
        Params fwd = p;
        fwd(j) += h;
        fwd = clamp_params(fwd);
        const auto mf = model_counts(prob, fwd, evals);
        std::vector<double> mb;
        double span = fwd(j) - p(j);
        if (central) {
            Params bwd = p;
            bwd(j) -= h;
            bwd = clamp_params(bwd);
            mb = model_counts(prob, bwd, evals);
            span = fwd(j) - bwd(j);
        }
        for (std::size_t i = 0; i < rows; ++i) {
            const double lo = central ? mb[i] : base[i];
            jac(static_cast<Eigen::Index>(i), j) = span != 0.0 ? (mf[i] - lo) / span : 0.0;
        }
    }
    return jac;
}

struct LmOutcome {
    Params p;
    double sse = std::numeric_limits<double>::infinity();
    bool converged = false;
};

LmOutcome levenberg_marquardt(const FitProblem& prob, Params start, long& evals) {
    Params p = clamp_params(start);
    std::vector<double> model = model_counts(prob, p, evals);
    double sse = weighted_sse(prob, model);

    double lambda = 1e-3;
    bool converged = false;

    for (int iter = 0; iter < 200; ++iter) {
        const Eigen::MatrixXd jac = numeric_jacobian(prob, p, evals, false);

        Eigen::Matrix<double, 6, 6> h = Eigen::Matrix<double, 6, 6>::Zero();
        Eigen::Matrix<double, 6, 1> g = Eigen::Matrix<double, 6, 1>::Zero();
        std::size_t i = 0;
        for (const auto& c : prob.scan.counts) {
            for (int m = 0; m < 3; ++m, ++i) {
                const double w = prob.weights[i];
                const double r = model[i] - static_cast<double>(c[static_cast<std::size_t>(m)]);
                const auto row = jac.row(static_cast<Eigen::Index>(i));
                h += w * row.transpose() * row;
                g += w * r * row.transpose();
            }
        }

        bool stepped = false;
        for (int attempt = 0; attempt < 12; ++attempt) {
            Eigen::Matrix<double, 6, 6> damped = h;
            for (int d = 0; d < 6; ++d) {
                damped(d, d) += lambda * std::max(h(d, d), 1e-12);
            }
            const Params step = damped.ldlt().solve(-g);
            const Params trial = clamp_params(p + step);
            const auto trial_model = model_counts(prob, trial, evals);
            const double trial_sse = weighted_sse(prob, trial_model);
            if (trial_sse <= sse) {
                const double rel = (sse - trial_sse) / std::max(sse, 1e-300);
                p = trial;
                model = trial_model;
                sse = trial_sse;
                lambda = std::max(lambda * 0.3, 1e-12);
                stepped = true;
                if (rel < 1e-10) converged = true;
                break;
            }
            lambda *= 4.0;
            if (lambda > 1e12) break;
        }
        if (!stepped) {
            // no damping level improves the fit: stationary at this precision
            converged = true;
            break;
        }
        if (converged) break;
    }
    return {p, sse, converged};
}

double refine_extremum(const FringeModel& model, int outcome, double lo, double hi,
                       bool maximize) {
    // golden-section on a bracketed unimodal stretch
    const double gr = 0.6180339887498949;
    double a = lo, b = hi;
    for (int i = 0; i < 80; ++i) {
        const double c = b - gr * (b - a);
        const double d = a + gr * (b - a);
        const double fc = model.probs(c)[static_cast<std::size_t>(outcome)];
        const double fd = model.probs(d)[static_cast<std::size_t>(outcome)];
        const bool take_left = maximize ? (fc > fd) : (fc < fd);
        if (take_left) b = d; else a = c;
    }
    return model.probs(0.5 * (a + b))[static_cast<std::size_t>(outcome)];
}

double visibility_of_model(const FringeModel& model, int outcome) {
    constexpr int kSamples = 720;
    double best_max = -1.0, best_min = 2.0;
    double arg_max = 0.0, arg_min = 0.0;
    for (int i = 0; i < kSamples; ++i) {
        const double phi = 2.0 * kPi * i / kSamples;
        const double v = model.probs(phi)[static_cast<std::size_t>(outcome)];
        if (v > best_max) { best_max = v; arg_max = phi; }
        if (v < best_min) { best_min = v; arg_min = phi; }
    }
    const double half_window = 2.0 * kPi / kSamples;
    const double pmax = refine_extremum(model, outcome, arg_max - half_window,
                                        arg_max + half_window, true);
    const double pmin = refine_extremum(model, outcome, arg_min - half_window,
                                        arg_min + half_window, false);
    const double denom = pmax + pmin;
    return denom > 0.0 ? (pmax - pmin) / denom : 0.0;
}

} // namespace

void FringeProbabilities::validate() const {
    require_increasing(phi, "FringeProbabilities");
    if (probs.size() != phi.size()) {
        throw ValidationError("FringeProbabilities: probs and phi differ in length");
    }
}

void FringeCounts::validate() const {
    require_increasing(phi, "FringeCounts");
    if (counts.size() != phi.size()) {
        throw ValidationError("FringeCounts: counts and phi differ in length");
    }
    for (const auto& c : counts) {
        if (c[0] < 0 || c[1] < 0 || c[2] < 0) {
            throw ValidationError("FringeCounts: negative count");
        }
    }
}

FringeProbabilities simulate_fringe(const SourceParams& params, double theta,
                                    const std::vector<double>& phis) {
    require_increasing(phis, "simulate_fringe");
    SourceParams validated(params.contamination, params.visibility);
    const FringeModel model(validated, theta);
    FringeProbabilities out;
    out.theta = theta;
    out.phi = phis;
    out.probs.reserve(phis.size());
    for (double phi : phis) {
        out.probs.push_back(model.probs(phi));
    }
    return out;
}

FringeCounts synthesize_counts(const FringeProbabilities& probs,
                               const std::array<double, 3>& norms, Rng& rng) {
    probs.validate();
    for (double n : norms) {
        if (!(n > 0.0)) {
            throw ValidationError("synthesize_counts: normalization counts must be positive");
        }
    }
    FringeCounts out;
    out.theta = probs.theta;
    out.phi = probs.phi;
    out.counts.reserve(probs.phi.size());
    for (const auto& p : probs.probs) {
        std::array<long, 3> row{};
        for (int m = 0; m < 3; ++m) {
            row[static_cast<std::size_t>(m)] =
                rng.poisson(norms[static_cast<std::size_t>(m)] * p[static_cast<std::size_t>(m)]);
        }
        out.counts.push_back(row);
    }
    return out;
}

FitResult fit_fringe(const FringeCounts& scan) {
    scan.validate();
    if (scan.phi.size() < 8) {
        throw ValidationError("fit_fringe: need at least 8 phase points");
    }
    if (scan.phi.back() - scan.phi.front() < kPi) {
        std::ostringstream os;
        os << "fit_fringe: phase span " << scan.phi.back() - scan.phi.front()
           << " rad is shorter than one fringe period (pi)";
        throw ValidationError(os.str());
    }

    const FitProblem prob(scan);
    long evals = 0;

    // deterministic multi-start over (V, R, delta)
    LmOutcome best;
    for (double v0 : {0.5, 0.95}) {
        for (double r0 : {0.02, 0.25}) {
            for (double d0 : {0.0, kPi / 2.0}) {
                Params start;
                start << v0, r0, d0, 0.0, 0.0, 0.0;
                init_norms(prob, start, evals);
                const LmOutcome out = levenberg_marquardt(prob, start, evals);
                if (out.sse < best.sse) best = out;
            }
        }
    }

    FitResult result;
    result.mixture_visibility = best.p(0);
    result.contamination = best.p(1);
    result.phase_offset = canonical_angle(best.p(2));
    result.norms = {best.p(3), best.p(4), best.p(5)};
    result.residual = best.sse;
    result.converged = best.converged;
    result.at_boundary = best.p(0) <= 1e-9 || best.p(0) >= 1.0 - 1e-9
                      || best.p(1) <= 1e-9 || best.p(1) >= 1.0 - 1e-9;
    result.model_evaluations = evals;

    // Fisher approximation from the weighted Jacobian at the optimum
    const Eigen::MatrixXd jac = numeric_jacobian(prob, best.p, evals, true);
    Eigen::Matrix<double, 6, 6> fisher = Eigen::Matrix<double, 6, 6>::Zero();
    for (Eigen::Index i = 0; i < jac.rows(); ++i) {
        fisher += prob.weights[static_cast<std::size_t>(i)]
                  * jac.row(i).transpose() * jac.row(i);
    }
    const Eigen::MatrixXd fisher_dyn = fisher;
    result.covariance = fisher_dyn.completeOrthogonalDecomposition().pseudoInverse();
    result.sigma_visibility = std::sqrt(std::max(result.covariance(0, 0), 0.0));
    result.sigma_contamination = std::sqrt(std::max(result.covariance(1, 1), 0.0));

    const FringeModel fitted(SourceParams(best.p(1), best.p(0)), scan.theta);
    for (int m = 0; m < 3; ++m) {
        result.per_basis_visibility[static_cast<std::size_t>(m)] = visibility_of_model(fitted, m);
    }
    return result;
}

double curve_visibility(const SourceParams& params, double theta, int outcome) {
    if (outcome < 0 || outcome > 2) {
        throw ValidationError("curve_visibility: outcome index must be 0, 1, or 2");
    }
    const FringeModel model(params, theta);
    return visibility_of_model(model, outcome);
}

} // namespace spintomo
