#include <doctest.h>

#include <cmath>

#include "spintomo/random.hpp"
#include "spintomo/spin1.hpp"

using namespace spintomo;

namespace {

Eigen::Vector3d rodrigues(const Eigen::Vector3d& axis, double angle, const Eigen::Vector3d& v) {
    return v * std::cos(angle) + axis.cross(v) * std::sin(angle)
         + axis * axis.dot(v) * (1.0 - std::cos(angle));
}

Eigen::Vector3d random_unit(Rng& rng) {
    Eigen::Vector3d v;
    do {
        v = Eigen::Vector3d(rng.uniform() - 0.5, rng.uniform() - 0.5, rng.uniform() - 0.5);
    } while (v.norm() < 1e-3);
    return v.normalized();
}

} // namespace

TEST_CASE("spin matrices satisfy the su(2) algebra and Casimir identity") {
    const auto& L = spin_matrices();
    const Complex i(0.0, 1.0);

    CHECK(L.lz(0, 0) == Complex(1.0));
    CHECK(L.lz(1, 1) == Complex(0.0));
    CHECK(L.lz(2, 2) == Complex(-1.0));

    CHECK(max_abs_diff(L.lx * L.ly - L.ly * L.lx, i * L.lz) <= 1e-12);
    CHECK(max_abs_diff(L.ly * L.lz - L.lz * L.ly, i * L.lx) <= 1e-12);
    CHECK(max_abs_diff(L.lz * L.lx - L.lx * L.lz, i * L.ly) <= 1e-12);
    CHECK(max_abs_diff(L.lx * L.lx + L.ly * L.ly + L.lz * L.lz, 2.0 * Mat3::Identity()) <= 1e-12);

    for (const Mat3& op : {L.lx, L.ly, L.lz}) {
        const Eigen::VectorXd w = eigenvalues_hermitian(op);
        CHECK(std::abs(w(0) - 1.0) <= 1e-12);
        CHECK(std::abs(w(1)) <= 1e-12);
        CHECK(std::abs(w(2) + 1.0) <= 1e-12);
    }
}

TEST_CASE("direction operators") {
    const auto& L = spin_matrices();
    CHECK(max_abs_diff(direction_operator(five_directions()[0]), L.lx) <= 1e-15);

    const Mat3 l3 = direction_operator(five_directions()[2]);
    CHECK(max_abs_diff(l3, ((L.lx + L.ly) / std::sqrt(2.0)).eval()) <= 1e-15);

    CHECK_THROWS_AS(direction_operator(Eigen::Vector3d(0.0, 1.0, 1.0)), ValidationError);

    Rng rng(21);
    for (int trial = 0; trial < 50; ++trial) {
        const SpinDirection n(random_unit(rng));
        const Eigen::VectorXd w = eigenvalues_hermitian(direction_operator(n));
        CHECK(std::abs(w(0) - 1.0) <= 1e-12);
        CHECK(std::abs(w(1)) <= 1e-12);
        CHECK(std::abs(w(2) + 1.0) <= 1e-12);
    }
}

TEST_CASE("the five tomography directions") {
    const auto& dirs = five_directions();
    REQUIRE(dirs.size() == 5);
    const double s = 1.0 / std::sqrt(2.0);
    CHECK((dirs[0].axis() - Eigen::Vector3d(1, 0, 0)).norm() <= 1e-15);
    CHECK((dirs[1].axis() - Eigen::Vector3d(0, 1, 0)).norm() <= 1e-15);
    CHECK((dirs[2].axis() - Eigen::Vector3d(s, s, 0)).norm() <= 1e-15);
    CHECK((dirs[3].axis() - Eigen::Vector3d(0, s, s)).norm() <= 1e-15);
    CHECK((dirs[4].axis() - Eigen::Vector3d(s, 0, s)).norm() <= 1e-15);
    for (std::size_t a = 0; a < dirs.size(); ++a) {
        CHECK(std::abs(dirs[a].axis().norm() - 1.0) <= 1e-12);
        for (std::size_t b = a + 1; b < dirs.size(); ++b) {
            CHECK((dirs[a].axis() - dirs[b].axis()).norm() > 1e-6);
        }
    }

    CHECK(named_direction("L4"));
    CHECK((named_direction("L4")->axis() - dirs[3].axis()).norm() <= 1e-15);
    CHECK(named_direction("Lz"));
    CHECK_FALSE(named_direction("L6"));
    CHECK_FALSE(named_direction("foo"));
}

TEST_CASE("direction projectors resolve the spectrum exactly") {
    Rng rng(22);
    for (int trial = 0; trial < 30; ++trial) {
        const SpinDirection n(random_unit(rng));
        const auto p = direction_projectors(n);
        CHECK(max_abs_diff(p[0] + p[1] + p[2], Mat3::Identity()) <= 1e-13);
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) {
                const Mat3 prod = p[static_cast<std::size_t>(a)] * p[static_cast<std::size_t>(b)];
                if (a == b) {
                    CHECK(max_abs_diff(prod, p[static_cast<std::size_t>(a)]) <= 1e-12);
                } else {
                    CHECK(prod.cwiseAbs().maxCoeff() <= 1e-12);
                }
            }
        }
        CHECK(max_abs_diff(p[0] - p[2], direction_operator(n)) <= 1e-12);
    }
}

TEST_CASE("moments from outcome probabilities") {
    const SpinMoments zero = moments_from_probs(0.0, 1.0, 0.0);
    CHECK(zero.first == doctest::Approx(0.0));
    CHECK(zero.second == doctest::Approx(0.0));

    const SpinMoments noonlike = moments_from_probs(0.5, 0.0, 0.5);
    CHECK(noonlike.first == doctest::Approx(0.0));
    CHECK(noonlike.second == doctest::Approx(1.0));

    // the published L1 column renormalized to unit sum
    const double sum = 0.333 + 0.027 + 0.655;
    const SpinMoments l1 = moments_from_probs(0.333 / sum, 0.027 / sum, 0.655 / sum);
    CHECK(l1.first == doctest::Approx((0.333 - 0.655) / sum).epsilon(1e-12));
    CHECK(std::abs(l1.first - (-0.322)) < 0.01);

    CHECK_THROWS_WITH_AS(moments_from_probs(0.333, 0.027, 0.655),
                         doctest::Contains("1.015"), ValidationError);
    CHECK_THROWS_AS(moments_from_probs(-0.1, 0.6, 0.5), ValidationError);

    // linearity in the probability vector
    Rng rng(23);
    for (int trial = 0; trial < 50; ++trial) {
        const double a = rng.uniform(), b = rng.uniform() * (1.0 - a);
        const double c = 1.0 - a - b;
        const double t = rng.uniform();
        const SpinMoments m1 = moments_from_probs(a, b, c);
        const SpinMoments m2 = moments_from_probs(c, a, b);
        const SpinMoments mix = moments_from_probs(t * a + (1 - t) * c, t * b + (1 - t) * a,
                                                   t * c + (1 - t) * b);
        CHECK(mix.first == doctest::Approx(t * m1.first + (1 - t) * m2.first).epsilon(1e-10));
        CHECK(mix.second == doctest::Approx(t * m1.second + (1 - t) * m2.second).epsilon(1e-10));
    }
}

TEST_CASE("operator basis is traceless, orthonormal, and complete") {
    const auto all = operator_basis().all();
    for (std::size_t a = 0; a < all.size(); ++a) {
        CHECK(std::abs(all[a].trace()) <= 1e-12);
        CHECK(max_abs_diff(all[a], all[a].adjoint()) <= 1e-12);
        for (std::size_t b = 0; b < all.size(); ++b) {
            const double inner = (all[a].adjoint() * all[b]).trace().real();
            CHECK(std::abs(inner - (a == b ? 2.0 : 0.0)) <= 1e-12);
        }
    }

    // expansion identity: rho = I/3 + (1/2) sum <l> l for any trace-1 Hermitian
    Rng rng(24);
    for (int trial = 0; trial < 50; ++trial) {
        Mat3 m;
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                m(i, j) = Complex(rng.uniform() - 0.5, rng.uniform() - 0.5);
            }
        }
        Mat3 h = 0.5 * (m + m.adjoint().eval());
        h += Mat3::Identity();
        h /= h.trace().real();

        Mat3 rebuilt = Mat3::Identity() / 3.0;
        for (const Mat3& l : all) {
            rebuilt += 0.5 * (l.adjoint() * h).trace().real() * l;
        }
        CHECK(max_abs_diff(rebuilt, h) <= 1e-12);
    }
}

TEST_CASE("direction operators transform covariantly under spin rotations") {
    Rng rng(25);
    for (int trial = 0; trial < 40; ++trial) {
        const Eigen::Vector3d axis = random_unit(rng);
        const Eigen::Vector3d m = random_unit(rng);
        const double angle = rng.uniform() * 2.0 * M_PI;

        // U = exp(-i angle axis.L) via the spectral decomposition
        const auto [w, vecs] = eigensystem_hermitian(direction_operator(SpinDirection(axis)));
        Eigen::Vector3cd phases;
        for (int i = 0; i < 3; ++i) {
            phases(i) = std::exp(Complex(0.0, -angle * w(i)));
        }
        const Mat3 u = Eigen::MatrixXcd(vecs * phases.asDiagonal() * vecs.adjoint());

        const Eigen::Vector3d rotated = rodrigues(axis, -angle, m);
        const Mat3 lhs = direction_operator(SpinDirection::normalized(rotated));
        const Mat3 rhs = u.adjoint() * direction_operator(SpinDirection(m)) * u;
        CHECK(max_abs_diff(lhs, rhs) <= 1e-10);
    }
}
