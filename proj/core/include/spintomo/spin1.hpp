#pragma once

// Spin-1 operator algebra on the symmetric two-photon subspace: Lx, Ly, Lz,
// arbitrary-direction operators, the five tomography directions, and the
// 8-operator expansion basis used by the reconstruction.
//
// Everything here is a pure function over immutable values.

#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include "spintomo/fock.hpp"

namespace spintomo {

/// Unit 3-vector selecting a spin measurement axis.
class SpinDirection {
public:
    /// Requires ||n|| = 1 within 1e-12.
    explicit SpinDirection(const Eigen::Vector3d& n);
    /// Rescales to unit norm; rejects near-zero vectors.
    static SpinDirection normalized(const Eigen::Vector3d& n);

    const Eigen::Vector3d& axis() const { return n_; }
    double x() const { return n_(0); }
    double y() const { return n_(1); }
    double z() const { return n_(2); }

private:
    Eigen::Vector3d n_;
};

struct SpinOperatorTriple {
    Mat3 lx;
    Mat3 ly;
    Mat3 lz;
};

/// Traceless Hermitian expansion basis: 3 first-moment operators (Lx, Ly, Lz)
/// and 5 orthogonalized quadratic operators, all normalized to Tr(l*l) = 2.
/// Together with the identity they span the 3x3 Hermitian matrices.
struct OperatorBasis {
    std::array<Mat3, 3> lambda1;
    std::array<Mat3, 5> lambda2;
    std::array<Mat3, 8> all() const;
};

/// The spin-1 matrices in the fixed (|2;0>, |1;1>, |0;2>) basis:
/// Lz = diag(1, 0, -1), Lx and Ly the standard tridiagonal forms.
const SpinOperatorTriple& spin_matrices();

/// n_x Lx + n_y Ly + n_z Lz. Spectrum is {+1, 0, -1} for any unit n.
Mat3 direction_operator(const SpinDirection& n);

/// Overload validating a raw vector; rejects non-unit input.
Mat3 direction_operator(const Eigen::Vector3d& n);

/// Eigenprojectors of n.L onto eigenvalues {+1, 0, -1}, in that order.
/// Computed from the characteristic polynomial, so they are exact.
std::array<Mat3, 3> direction_projectors(const SpinDirection& n);

/// The five tomography directions L1..L5:
/// (1,0,0), (0,1,0), (1,1,0)/sqrt2, (0,1,1)/sqrt2, (1,0,1)/sqrt2.
const std::vector<SpinDirection>& five_directions();

SpinDirection direction_z();

/// Resolves "L1".."L5" and "Lz"; nullopt for anything else.
std::optional<SpinDirection> named_direction(std::string_view name);

struct SpinMoments {
    double first;  // <L>   = P+ - P-
    double second; // <L^2> = P+ + P-
};

/// Moments from an outcome distribution (P+, P0, P-). The probabilities must
/// be non-negative and sum to 1 within 1e-6.
SpinMoments moments_from_probs(double p_plus, double p_zero, double p_minus);

const OperatorBasis& operator_basis();

} // namespace spintomo
