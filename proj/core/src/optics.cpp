#include "spintomo/optics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace spintomo {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kSqrt2 = 1.4142135623730950488;

Complex cis(double x) { return {std::cos(x), std::sin(x)}; }

Eigen::MatrixXcd phase_matrix(double phi, Mode mode, Rep rep) {
    // exp(-i n phi) per basis ket, n = photon count in the shifted mode
    const Complex e1 = cis(-phi);
    const Complex e2 = cis(-2.0 * phi);
    if (rep == Rep::spin1) {
        Eigen::Vector3cd d;
        d = (mode == Mode::c) ? Eigen::Vector3cd(e2, e1, 1.0)
                              : Eigen::Vector3cd(1.0, e1, e2);
        return d.asDiagonal();
    }
    Eigen::Vector4cd d;
    d = (mode == Mode::c) ? Eigen::Vector4cd(e2, e1, e1, 1.0)
                          : Eigen::Vector4cd(1.0, e1, e1, e2);
    return d.asDiagonal();
}

Eigen::MatrixXcd beamsplitter_matrix(double eta, Rep rep) {
    // Heisenberg action: c^dag -> a c^dag + b d^dag, d^dag -> a d^dag + b c^dag
    const Complex a(std::cos(eta), 0.0);
    const Complex b(0.0, -std::sin(eta));
    if (rep == Rep::spin1) {
        Mat3 m;
        m << a * a, kSqrt2 * a * b, b * b,
             kSqrt2 * a * b, a * a + b * b, kSqrt2 * a * b,
             b * b, kSqrt2 * a * b, a * a;
        return m;
    }
    Mat4 m;
    m << a * a, a * b, a * b, b * b,
         a * b, a * a, b * b, a * b,
         a * b, b * b, a * a, a * b,
         b * b, a * b, a * b, a * a;
    return m;
}

struct NelderMead2Result {
    Eigen::Vector2d x;
    double value;
};

// Minimizes a smooth 2-d objective; plain Nelder-Mead with standard
// coefficients, run to simplex collapse.
template <typename F>
NelderMead2Result nelder_mead_2d(F&& f, const Eigen::Vector2d& start, double scale,
                                 int max_iterations) {
    std::array<Eigen::Vector2d, 3> xs = {
        start,
        start + Eigen::Vector2d(scale, 0.0),
        start + Eigen::Vector2d(0.0, scale),
    };
    std::array<double, 3> fs = {f(xs[0]), f(xs[1]), f(xs[2])};

    auto order = [&] {
        std::array<int, 3> idx = {0, 1, 2};
        std::sort(idx.begin(), idx.end(), [&](int a, int b) { return fs[a] < fs[b]; });
        std::array<Eigen::Vector2d, 3> nx = {xs[idx[0]], xs[idx[1]], xs[idx[2]]};
        std::array<double, 3> nf = {fs[idx[0]], fs[idx[1]], fs[idx[2]]};
        xs = nx;
        fs = nf;
    };

    order();
    for (int it = 0; it < max_iterations; ++it) {
        const Eigen::Vector2d centroid = 0.5 * (xs[0] + xs[1]);
        const Eigen::Vector2d refl = centroid + (centroid - xs[2]);
        const double f_refl = f(refl);
        if (f_refl < fs[0]) {
            const Eigen::Vector2d exp_pt = centroid + 2.0 * (centroid - xs[2]);
            const double f_exp = f(exp_pt);
            if (f_exp < f_refl) {
                xs[2] = exp_pt;
                fs[2] = f_exp;
            } else {
                xs[2] = refl;
                fs[2] = f_refl;
            }
        } else if (f_refl < fs[1]) {
            xs[2] = refl;
            fs[2] = f_refl;
        } else {
            const Eigen::Vector2d contr = centroid + 0.5 * (xs[2] - centroid);
            const double f_contr = f(contr);
            if (f_contr < fs[2]) {
                xs[2] = contr;
                fs[2] = f_contr;
            } else {
                xs[1] = xs[0] + 0.5 * (xs[1] - xs[0]);
                xs[2] = xs[0] + 0.5 * (xs[2] - xs[0]);
                fs[1] = f(xs[1]);
                fs[2] = f(xs[2]);
            }
        }
        order();
        if ((xs[2] - xs[0]).norm() + (xs[1] - xs[0]).norm() < 1e-14) break;
    }
    return {xs[0], fs[0]};
}

} // namespace

std::string to_string(Mode m) {
    return m == Mode::c ? "c" : "d";
}

double canonical_angle(double radians) {
    double r = std::fmod(radians, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    return r;
}

CircuitUnitary::CircuitUnitary(Eigen::MatrixXcd m, Rep rep)
    : m_(std::move(m)), rep_(rep) {
    if (m_.rows() != dimension(rep_) || m_.cols() != dimension(rep_)) {
        std::ostringstream os;
        os << "CircuitUnitary: " << m_.rows() << "x" << m_.cols() << " matrix for rep "
           << to_string(rep_);
        throw ValidationError(os.str());
    }
    const double defect =
        (m_.adjoint() * m_ - Eigen::MatrixXcd::Identity(m_.rows(), m_.cols()))
            .cwiseAbs()
            .maxCoeff();
    if (!(defect <= 1e-12)) {
        std::ostringstream os;
        os << "CircuitUnitary: matrix is not unitary (||U^dag U - I||_max = " << defect << ")";
        throw ValidationError(os.str());
    }
}

PureState CircuitUnitary::apply(const PureState& psi) const {
    if (psi.basis() != rep_) {
        throw ValidationError("CircuitUnitary::apply: state and unitary representations differ");
    }
    return PureState::normalized(m_ * psi.amplitudes(), rep_);
}

CircuitUnitary CircuitUnitary::then(const CircuitUnitary& next) const {
    if (next.rep_ != rep_) {
        throw ValidationError("CircuitUnitary::then: mixed representations ("
                              + to_string(rep_) + " vs " + to_string(next.rep_) + ")");
    }
    return CircuitUnitary(next.m_ * m_, rep_);
}

CircuitUnitary phase_unitary(double phi, Mode mode, Rep rep) {
    return CircuitUnitary(phase_matrix(phi, mode, rep), rep);
}

CircuitUnitary beamsplitter_unitary(double eta, Rep rep) {
    return CircuitUnitary(beamsplitter_matrix(eta, rep), rep);
}

CircuitUnitary mzi_unitary(double theta, Rep rep) {
    const double quarter = std::numbers::pi / 4.0;
    const Eigen::MatrixXcd bs = beamsplitter_matrix(quarter, rep);
    return CircuitUnitary(bs * phase_matrix(theta, Mode::c, rep) * bs, rep);
}

CircuitUnitary element_unitary(const CircuitElement& e, Rep rep) {
    return std::visit(
        [rep](const auto& el) -> CircuitUnitary {
            using T = std::decay_t<decltype(el)>;
            if constexpr (std::is_same_v<T, PhaseShifter>) {
                return phase_unitary(el.phi, el.mode, rep);
            } else if constexpr (std::is_same_v<T, BeamSplitter>) {
                return beamsplitter_unitary(el.eta, rep);
            } else {
                return mzi_unitary(el.theta, rep);
            }
        },
        e);
}

CircuitUnitary compose(const std::vector<CircuitElement>& elements, Rep rep) {
    if (elements.empty()) {
        throw ValidationError("compose: element list is empty");
    }
    const int d = dimension(rep);
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(d, d);
    for (const CircuitElement& e : elements) {
        u = element_unitary(e, rep).matrix() * u;
    }
    return CircuitUnitary(std::move(u), rep);
}

CircuitUnitary compose(const std::vector<CircuitUnitary>& factors) {
    if (factors.empty()) {
        throw ValidationError("compose: factor list is empty");
    }
    CircuitUnitary u = factors.front();
    for (std::size_t i = 1; i < factors.size(); ++i) {
        u = u.then(factors[i]);
    }
    return u;
}

Eigen::Matrix2cd single_photon_unitary(const CircuitElement& e) {
    return std::visit(
        [](const auto& el) -> Eigen::Matrix2cd {
            using T = std::decay_t<decltype(el)>;
            Eigen::Matrix2cd m;
            if constexpr (std::is_same_v<T, PhaseShifter>) {
                const Complex p = cis(-el.phi);
                if (el.mode == Mode::c) {
                    m << p, 0.0, 0.0, 1.0;
                } else {
                    m << 1.0, 0.0, 0.0, p;
                }
            } else if constexpr (std::is_same_v<T, BeamSplitter>) {
                const Complex a(std::cos(el.eta), 0.0);
                const Complex b(0.0, -std::sin(el.eta));
                m << a, b, b, a;
            } else {
                const Eigen::Matrix2cd bs = single_photon_unitary(BeamSplitter{std::numbers::pi / 4.0});
                const Eigen::Matrix2cd ph = single_photon_unitary(PhaseShifter{el.theta, Mode::c});
                m = bs * ph * bs;
            }
            return m;
        },
        e);
}

Mat3 analyzer_unitary(double phi, double theta) {
    return mzi_unitary(theta, Rep::spin1).matrix() * phase_matrix(phi, Mode::c, Rep::spin1);
}

AnalyzerSettings direction_to_settings(const SpinDirection& n) {
    const Mat3 target = direction_operator(n);
    const Mat3 lz = spin_matrices().lz;

    auto residual_at = [&](double phi, double theta) {
        const Mat3 a = analyzer_unitary(phi, theta);
        return ((a.adjoint() * lz * a) - target).cwiseAbs().maxCoeff();
    };
    auto objective = [&](const Eigen::Vector2d& x) {
        const Mat3 a = analyzer_unitary(x(0), x(1));
        return ((a.adjoint() * lz * a) - target).squaredNorm();
    };

    // deterministic coarse grid over [0, 2pi)^2
    constexpr int kGrid = 256;
    const double step = kTwoPi / kGrid;
    Eigen::Vector2d best(0.0, 0.0);
    double best_f = objective(best);
    for (int i = 0; i < kGrid; ++i) {
        for (int j = 0; j < kGrid; ++j) {
            const Eigen::Vector2d x(i * step, j * step);
            const double f = objective(x);
            if (f < best_f) {
                best_f = f;
                best = x;
            }
        }
    }

    const auto refined = nelder_mead_2d(objective, best, step, 500);
    const double phi = canonical_angle(refined.x(0));
    const double theta = canonical_angle(refined.x(1));
    const double res = residual_at(phi, theta);
    if (!(res <= 1e-6)) {
        std::ostringstream os;
        os << "direction_to_settings: no analyzer settings reach direction ("
           << n.x() << ", " << n.y() << ", " << n.z() << "); best residual " << res
           << " exceeds 1e-6 (the direction may need an extra output phase)";
        throw NoSolutionError(os.str());
    }
    return {phi, theta, res};
}

} // namespace spintomo
