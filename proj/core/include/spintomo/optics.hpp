#pragma once

// Unitaries of phase shifters, beamsplitters, and MZIs in both the spin-1 and
// two-color representations, plus the mapping from abstract spin measurement
// directions to analyzer phase settings.
//
// Conventions (fixed):
//  - Phase shifter on a mode multiplies each basis ket by exp(-i * n * phi),
//    n the photon count in that mode. Frequency-degenerate: signal and idler
//    pick up identical phases.
//  - Beamsplitter is the family exp(-i * eta * (c^dag d + c d^dag)); the
//    balanced 50:50 element is eta = pi/4. eta = pi/2 is a full mode swap.
//  - MZI(theta) = BS(pi/4) . phase(theta on c) . BS(pi/4). theta = pi/2 is
//    balanced; theta = pi is bar-like (identity up to per-mode phases).
//  - The analyzer is: input -> phase(phi on c) -> MZI(theta) -> counting.

#include <variant>
#include <vector>

#include "spintomo/fock.hpp"
#include "spintomo/spin1.hpp"

namespace spintomo {

enum class Mode { c, d };
std::string to_string(Mode m);

struct PhaseShifter {
    double phi = 0.0;
    Mode mode = Mode::c;
};

struct BeamSplitter {
    double eta = 0.0; // generator angle; pi/4 is the balanced splitter
};

struct MziElement {
    double theta = 0.0; // internal phase between two balanced splitters
};

using CircuitElement = std::variant<PhaseShifter, BeamSplitter, MziElement>;

/// Reduces an angle to [0, 2*pi) for canonical display. The physics is
/// periodic anyway; stored element parameters are never reduced.
double canonical_angle(double radians);

/// A d x d unitary tagged with its representation (d = 3 or 4).
class CircuitUnitary {
public:
    /// Validates ||U^dag U - I||_max <= 1e-12.
    CircuitUnitary(Eigen::MatrixXcd m, Rep rep);

    const Eigen::MatrixXcd& matrix() const { return m_; }
    Rep rep() const { return rep_; }
    int dim() const { return static_cast<int>(m_.rows()); }

    /// Apply to a state of the same representation.
    PureState apply(const PureState& psi) const;

    /// Composition "this first, then next". Mixed representations rejected.
    CircuitUnitary then(const CircuitUnitary& next) const;

private:
    Eigen::MatrixXcd m_;
    Rep rep_;
};

CircuitUnitary phase_unitary(double phi, Mode mode, Rep rep);
CircuitUnitary beamsplitter_unitary(double eta, Rep rep);
CircuitUnitary mzi_unitary(double theta, Rep rep);
CircuitUnitary element_unitary(const CircuitElement& e, Rep rep);

/// Right-to-left product in application order (first element acts first).
/// Rejects empty input.
CircuitUnitary compose(const std::vector<CircuitElement>& elements, Rep rep);

/// Product of prebuilt unitaries in application order; mixed reps rejected.
CircuitUnitary compose(const std::vector<CircuitUnitary>& factors);

/// Heisenberg-picture 2x2 matrix of an element acting on (c^dag, d^dag).
Eigen::Matrix2cd single_photon_unitary(const CircuitElement& e);

/// Analyzer unitary A = MZI(theta) . phase(phi on c) in the spin-1 rep.
Mat3 analyzer_unitary(double phi, double theta);

struct AnalyzerSettings {
    double phi = 0.0;
    double theta = 0.0;
    /// max |A^dag Lz A - n.L| achieved by the settings.
    double residual = 0.0;
};

/// Finds (phi, theta) with A = MZI(theta) . phase(phi on c) such that
/// A^dag Lz A = n.L, i.e. photon counting after the analyzer measures n.L
/// with the +1 outcome on the |2;0> detector (no outcome relabeling).
/// Deterministic 256x256 grid search over [0,2pi)^2 followed by Nelder-Mead
/// refinement. Throws NoSolutionError if the residual stays above 1e-6.
AnalyzerSettings direction_to_settings(const SpinDirection& n);

} // namespace spintomo
