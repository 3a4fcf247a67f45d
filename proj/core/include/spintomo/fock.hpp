#pragma once

// States and operators of the two-mode, two-photon space.
//
// Two Hilbert spaces appear throughout: the 4-dimensional two-color space,
// where the pair of photons carries a frequency label, and the 3-dimensional
// symmetric subspace, which behaves as a spin-1 system. Basis orderings are
// fixed project-wide:
//
//   spin-1:    (|2;0>, |1;1>, |0;2>)              photon counts in modes (c;d)
//   two-color: (|is;0>, |i;s>, |s;i>, |0;is>)     signal s / idler i, modes (c;d)
//
// Every matrix in this project is written in these orderings. All types are
// immutable values after construction and safe to share across threads.

#include <complex>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "spintomo/errors.hpp"

namespace spintomo {

using Complex = std::complex<double>;
using Mat3 = Eigen::Matrix3cd;
using Mat4 = Eigen::Matrix4cd;
using Vec3 = Eigen::Vector3cd;
using Vec4 = Eigen::Vector4cd;

/// Which representation a state or unitary lives in.
enum class Rep { spin1, two_color };

constexpr int dimension(Rep rep) { return rep == Rep::spin1 ? 3 : 4; }
std::string to_string(Rep rep);

/// One of the four two-color basis kets, in the fixed ordering above.
enum class TwoColorKet : int {
    both_in_c = 0,        // |is;0>
    idler_c_signal_d = 1, // |i;s>
    signal_c_idler_d = 2, // |s;i>
    both_in_d = 3,        // |0;is>
};
std::string to_string(TwoColorKet k);

/// A two-photon occupation (n_c, n_d) with n_c + n_d = 2.
struct BosonicKet {
    int n_c = 2;
    int n_d = 0;

    BosonicKet(int nc, int nd);
    /// Basis index in the fixed spin-1 ordering: |2;0> -> 0, |1;1> -> 1, |0;2> -> 2.
    int index() const { return n_d; }
    /// Lz eigenvalue (n_c - n_d)/2: +1, 0, -1.
    int lz_eigenvalue() const { return (n_c - n_d) / 2; }
    std::string label() const;
};

/// Unit-norm complex amplitude vector over one of the two fixed bases.
class PureState {
public:
    /// Requires |amps| already unit-norm within 1e-12.
    PureState(Eigen::VectorXcd amps, Rep basis);
    /// Rescales to unit norm; rejects (near-)zero vectors.
    static PureState normalized(Eigen::VectorXcd amps, Rep basis);

    const Eigen::VectorXcd& amplitudes() const { return amps_; }
    Rep basis() const { return basis_; }
    int dim() const { return static_cast<int>(amps_.size()); }
    Complex amplitude(int i) const { return amps_(i); }

private:
    Eigen::VectorXcd amps_;
    Rep basis_;
};

/// 3x3 complex Hermitian trace-1 matrix. Positivity is a query, not an
/// invariant: matrices arriving from linear inversion may carry a small
/// negative eigenvalue.
class DensityMatrix {
public:
    /// Validates Hermiticity and unit trace within `tol` (1e-12 for
    /// constructed values; pass 1e-9 for matrices read from files).
    explicit DensityMatrix(const Mat3& m, double tol = 1e-12);

    static DensityMatrix from_pure(const PureState& psi);
    static DensityMatrix maximally_mixed();

    const Mat3& matrix() const { return m_; }
    bool is_positive_semidefinite(double eigenvalue_floor = -1e-10) const;
    /// Eigenvalues sorted descending.
    Eigen::Vector3d eigenvalues() const;
    /// Tr(rho^2). Exceeds 1 for non-PSD matrices.
    double purity() const;

private:
    Mat3 m_;
};

/// d x d complex Hermitian matrix, d = 3 or 4.
class HermitianOperator {
public:
    explicit HermitianOperator(Eigen::MatrixXcd m, double tol = 1e-12);
    const Eigen::MatrixXcd& matrix() const { return m_; }
    int dim() const { return static_cast<int>(m_.rows()); }

private:
    Eigen::MatrixXcd m_;
};

/// Projection of a two-color state onto the symmetric subspace, re-expressed
/// in the spin-1 basis. The result is NOT renormalized: its norm is the
/// projection weight (zero for purely antisymmetric input).
Vec3 symmetrize(const PureState& two_color_state);

/// Embeds spin-1 amplitudes back into the two-color space,
/// (a, b, c) -> (a, b/sqrt2, b/sqrt2, c). Right inverse of symmetrize.
Vec4 lift_symmetric(const Vec3& amps);

/// Real eigenvalues of a Hermitian matrix, sorted descending.
/// Rejects input whose anti-Hermitian part exceeds `hermiticity_tol`.
Eigen::VectorXd eigenvalues_hermitian(const Eigen::MatrixXcd& m,
                                      double hermiticity_tol = 1e-9);

/// Eigenvalues (descending) together with the matching unitary of column
/// eigenvectors, so m = V diag(w) V^dagger.
std::pair<Eigen::VectorXd, Eigen::MatrixXcd>
eigensystem_hermitian(const Eigen::MatrixXcd& m, double hermiticity_tol = 1e-9);

/// Tr|A| = sum of |eigenvalues| of a Hermitian matrix. Note: no factor 1/2.
double trace_norm(const Eigen::MatrixXcd& hermitian, double hermiticity_tol = 1e-9);

/// Tr(m^2) for Hermitian m.
double purity(const Mat3& hermitian);

/// Largest absolute entry of a - b.
double max_abs_diff(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

} // namespace spintomo
