#include "spintomo/fock.hpp"

#include <cmath>
#include <sstream>

namespace spintomo {

namespace {

constexpr double kInvSqrt2 = 0.7071067811865475244;

double hermiticity_defect(const Eigen::MatrixXcd& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

void require_hermitian(const Eigen::MatrixXcd& m, double tol, const char* who) {
    if (m.rows() != m.cols()) {
        std::ostringstream os;
        os << who << ": matrix is " << m.rows() << "x" << m.cols() << ", expected square";
        throw ValidationError(os.str());
    }
    const double defect = hermiticity_defect(m);
    if (!(defect <= tol)) {
        std::ostringstream os;
        os << who << ": matrix is not Hermitian (max |m - m^dagger| = " << defect
           << ", tolerance " << tol << ")";
        throw ValidationError(os.str());
    }
}

} // namespace

std::string to_string(Rep rep) {
    return rep == Rep::spin1 ? "spin1" : "two_color";
}

std::string to_string(TwoColorKet k) {
    switch (k) {
    case TwoColorKet::both_in_c: return "|is;0>";
    case TwoColorKet::idler_c_signal_d: return "|i;s>";
    case TwoColorKet::signal_c_idler_d: return "|s;i>";
    case TwoColorKet::both_in_d: return "|0;is>";
    }
    throw ValidationError("unknown two-color ket");
}

BosonicKet::BosonicKet(int nc, int nd) : n_c(nc), n_d(nd) {
    if (nc < 0 || nd < 0 || nc + nd != 2) {
        std::ostringstream os;
        os << "BosonicKet: occupation (" << nc << "," << nd << ") must be non-negative with total 2";
        throw ValidationError(os.str());
    }
}

std::string BosonicKet::label() const {
    return "|" + std::to_string(n_c) + ";" + std::to_string(n_d) + ">";
}

PureState::PureState(Eigen::VectorXcd amps, Rep basis)
    : amps_(std::move(amps)), basis_(basis) {
    if (amps_.size() != dimension(basis_)) {
        std::ostringstream os;
        os << "PureState: " << amps_.size() << " amplitudes for basis " << to_string(basis_)
           << " (expected " << dimension(basis_) << ")";
        throw ValidationError(os.str());
    }
    const double n2 = amps_.squaredNorm();
    if (std::abs(n2 - 1.0) > 1e-12) {
        std::ostringstream os;
        os << "PureState: squared norm " << n2 << " deviates from 1 beyond 1e-12"
           << " (use PureState::normalized to rescale)";
        throw ValidationError(os.str());
    }
}

PureState PureState::normalized(Eigen::VectorXcd amps, Rep basis) {
    const double n = amps.norm();
    if (n < 1e-14) {
        throw ValidationError("PureState::normalized: cannot normalize a zero vector");
    }
    amps /= n;
    return PureState(std::move(amps), basis);
}

DensityMatrix::DensityMatrix(const Mat3& m, double tol) : m_(m) {
    require_hermitian(m_, tol, "DensityMatrix");
    const double tr = m_.trace().real();
    if (std::abs(tr - 1.0) > tol) {
        std::ostringstream os;
        os << "DensityMatrix: trace " << tr << " deviates from 1 beyond " << tol;
        throw ValidationError(os.str());
    }
    // fold floating-point dust so downstream algebra sees an exactly Hermitian matrix
    m_ = 0.5 * (m_ + m_.adjoint().eval());
}

DensityMatrix DensityMatrix::from_pure(const PureState& psi) {
    if (psi.basis() != Rep::spin1) {
        throw ValidationError("DensityMatrix::from_pure: expected a spin-1 state");
    }
    const Vec3 v = psi.amplitudes();
    return DensityMatrix((v * v.adjoint()).eval());
}

DensityMatrix DensityMatrix::maximally_mixed() {
    return DensityMatrix(Mat3(Mat3::Identity() / 3.0));
}

bool DensityMatrix::is_positive_semidefinite(double eigenvalue_floor) const {
    return eigenvalues().minCoeff() >= eigenvalue_floor;
}

Eigen::Vector3d DensityMatrix::eigenvalues() const {
    const Eigen::VectorXd w = eigenvalues_hermitian(m_, 1e-9);
    return Eigen::Vector3d(w(0), w(1), w(2));
}

double DensityMatrix::purity() const {
    return spintomo::purity(m_);
}

HermitianOperator::HermitianOperator(Eigen::MatrixXcd m, double tol) : m_(std::move(m)) {
    if (m_.rows() != 3 && m_.rows() != 4) {
        throw ValidationError("HermitianOperator: dimension must be 3 or 4");
    }
    require_hermitian(m_, tol, "HermitianOperator");
}

Vec3 symmetrize(const PureState& two_color_state) {
    if (two_color_state.basis() != Rep::two_color) {
        throw ValidationError("symmetrize: expected a two-color (4-dimensional) state");
    }
    const Eigen::VectorXcd& a = two_color_state.amplitudes();
    Vec3 out;
    out << a(0), (a(1) + a(2)) * kInvSqrt2, a(3);
    return out;
}

Vec4 lift_symmetric(const Vec3& amps) {
    Vec4 out;
    out << amps(0), amps(1) * kInvSqrt2, amps(1) * kInvSqrt2, amps(2);
    return out;
}

Eigen::VectorXd eigenvalues_hermitian(const Eigen::MatrixXcd& m, double hermiticity_tol) {
    require_hermitian(m, hermiticity_tol, "eigenvalues_hermitian");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().reverse();
}

std::pair<Eigen::VectorXd, Eigen::MatrixXcd>
eigensystem_hermitian(const Eigen::MatrixXcd& m, double hermiticity_tol) {
    require_hermitian(m, hermiticity_tol, "eigensystem_hermitian");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m);
    Eigen::VectorXd w = solver.eigenvalues().reverse();
    Eigen::MatrixXcd v = solver.eigenvectors().rowwise().reverse();
    return {std::move(w), std::move(v)};
}

double trace_norm(const Eigen::MatrixXcd& hermitian, double hermiticity_tol) {
    return eigenvalues_hermitian(hermitian, hermiticity_tol).cwiseAbs().sum();
}

double purity(const Mat3& hermitian) {
    return (hermitian * hermitian).trace().real();
}

double max_abs_diff(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

} // namespace spintomo
