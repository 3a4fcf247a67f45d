#include "spintomo/spin1.hpp"

#include <cmath>
#include <sstream>

namespace spintomo {

namespace {

constexpr double kInvSqrt2 = 0.7071067811865475244;

double hs_inner(const Mat3& a, const Mat3& b) {
    return (a.adjoint() * b).trace().real();
}

OperatorBasis build_operator_basis() {
    const auto& L = spin_matrices();
    OperatorBasis basis;
    basis.lambda1 = {L.lx, L.ly, L.lz};

    // Quadratic sector: Gram-Schmidt of the anticommutators and diagonal
    // combinations against {I, Lx, Ly, Lz} and each other, normalized to
    // Tr(l*l) = 2.
    const std::array<Mat3, 5> seeds = {
        Mat3(L.lx * L.ly + L.ly * L.lx),
        Mat3(L.ly * L.lz + L.lz * L.ly),
        Mat3(L.lz * L.lx + L.lx * L.lz),
        Mat3(L.lx * L.lx - L.ly * L.ly),
        Mat3(3.0 * L.lz * L.lz - 2.0 * Mat3::Identity()),
    };

    std::vector<Mat3> previous = {Mat3::Identity(), L.lx, L.ly, L.lz};
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        Mat3 m = seeds[i];
        for (const Mat3& p : previous) {
            m -= (hs_inner(p, m) / hs_inner(p, p)) * p;
        }
        const double norm = std::sqrt(hs_inner(m, m));
        m *= std::sqrt(2.0) / norm;
        basis.lambda2[i] = m;
        previous.push_back(m);
    }
    return basis;
}

} // namespace

SpinDirection::SpinDirection(const Eigen::Vector3d& n) : n_(n) {
    const double norm = n_.norm();
    if (std::abs(norm - 1.0) > 1e-12) {
        std::ostringstream os;
        os << "SpinDirection: vector norm " << norm << " deviates from 1 beyond 1e-12"
           << " (use SpinDirection::normalized to rescale)";
        throw ValidationError(os.str());
    }
}

SpinDirection SpinDirection::normalized(const Eigen::Vector3d& n) {
    const double norm = n.norm();
    if (norm < 1e-14) {
        throw ValidationError("SpinDirection::normalized: cannot normalize a zero vector");
    }
    return SpinDirection(Eigen::Vector3d(n / norm));
}

const SpinOperatorTriple& spin_matrices() {
    static const SpinOperatorTriple triple = [] {
        const Complex i(0.0, 1.0);
        SpinOperatorTriple t;
        t.lx << 0, kInvSqrt2, 0,
                kInvSqrt2, 0, kInvSqrt2,
                0, kInvSqrt2, 0;
        t.ly << 0, -i * kInvSqrt2, 0,
                i * kInvSqrt2, 0, -i * kInvSqrt2,
                0, i * kInvSqrt2, 0;
        t.lz << 1, 0, 0,
                0, 0, 0,
                0, 0, -1;
        return t;
    }();
    return triple;
}

Mat3 direction_operator(const SpinDirection& n) {
    const auto& L = spin_matrices();
    return n.x() * L.lx + n.y() * L.ly + n.z() * L.lz;
}

Mat3 direction_operator(const Eigen::Vector3d& n) {
    return direction_operator(SpinDirection(n));
}

std::array<Mat3, 3> direction_projectors(const SpinDirection& n) {
    const Mat3 L = direction_operator(n);
    const Mat3 L2 = L * L;
    return {
        Mat3(0.5 * (L2 + L)),          // +1
        Mat3(Mat3::Identity() - L2),   //  0
        Mat3(0.5 * (L2 - L)),          // -1
    };
}

const std::vector<SpinDirection>& five_directions() {
    static const std::vector<SpinDirection> dirs = {
        SpinDirection({1.0, 0.0, 0.0}),
        SpinDirection({0.0, 1.0, 0.0}),
        SpinDirection({kInvSqrt2, kInvSqrt2, 0.0}),
        SpinDirection({0.0, kInvSqrt2, kInvSqrt2}),
        SpinDirection({kInvSqrt2, 0.0, kInvSqrt2}),
    };
    return dirs;
}

SpinDirection direction_z() {
    return SpinDirection({0.0, 0.0, 1.0});
}

std::optional<SpinDirection> named_direction(std::string_view name) {
    if (name == "Lz" || name == "lz") return direction_z();
    if (name.size() == 2 && (name[0] == 'L' || name[0] == 'l')) {
        const int k = name[1] - '0';
        if (k >= 1 && k <= 5) return five_directions()[static_cast<std::size_t>(k - 1)];
    }
    return std::nullopt;
}

SpinMoments moments_from_probs(double p_plus, double p_zero, double p_minus) {
    if (p_plus < 0.0 || p_zero < 0.0 || p_minus < 0.0) {
        throw ValidationError("moments_from_probs: probabilities must be non-negative");
    }
    const double sum = p_plus + p_zero + p_minus;
    if (std::abs(sum - 1.0) > 1e-6) {
        std::ostringstream os;
        os << "moments_from_probs: probabilities sum to " << sum
           << ", expected 1 within 1e-6";
        throw ValidationError(os.str());
    }
    return {p_plus - p_minus, p_plus + p_minus};
}

const OperatorBasis& operator_basis() {
    static const OperatorBasis basis = build_operator_basis();
    return basis;
}

std::array<Mat3, 8> OperatorBasis::all() const {
    return {lambda1[0], lambda1[1], lambda1[2],
            lambda2[0], lambda2[1], lambda2[2], lambda2[3], lambda2[4]};
}

} // namespace spintomo
