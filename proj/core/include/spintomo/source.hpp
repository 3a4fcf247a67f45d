#pragma once

// The quantum states injected by the photon-pair source: the ideal two-photon
// NOON state, the input state with pre-splitter (mode a) contamination R, and
// the visibility-degraded convex mixture.

#include "spintomo/fock.hpp"

namespace spintomo {

/// Source model parameters: contamination R (probability the pair is born in
/// mode a) and visibility V (pure-state weight in the convex mixture).
struct SourceParams {
    double contamination = 0.0; // R
    double visibility = 1.0;    // V

    SourceParams() = default;
    SourceParams(double r, double v);
};

/// (|2;0> + |0;2>)/sqrt2 in the spin-1 basis.
PureState noon_state();

/// sqrt(R) * BS(pi/4)|2;0> + sqrt(1-R) * NOON, normalized numerically.
/// The mode-a pair enters the interferometer through the first splitter;
/// `relative_phase` rotates the mode-a term against the NOON term (default 0,
/// matching the real coefficients of the source model).
PureState input_state(double contamination, double relative_phase = 0.0);

/// The closed-form constant 1/sqrt(1 + 2R(1-R)) quoted for the input state.
/// Exposed as a diagnostic only: under the implemented splitter convention the
/// two branches are orthogonal and the superposition is already unit-norm, so
/// this value is NOT used for normalization.
double input_norm_closed_form(double contamination);

/// V |psi><psi| + (1-V) I/3. Trace-1 and PSD for V in [0,1].
DensityMatrix noisy_state(const PureState& psi, double visibility);

} // namespace spintomo
