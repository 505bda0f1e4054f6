#pragma once

#include <span>
#include <vector>

#include "qland/circuit.hpp"

namespace qland {

/// d loss / d theta_k, one entry per shared parameter.
using GradientVector = std::vector<double>;

/// Loss and gradient at one parameter point.
struct LossAndGradient {
  double loss = 0.0;
  GradientVector gradient;
};

/// Exact gradient by the two-term shift rule applied to every gate occurrence:
///
///   dL/dtheta_k = sum_j 1/2 [L(angle_j + pi/2) - L(angle_j - pi/2)]
///
/// where j runs over the gates reading parameter k and only gate j is shifted.
/// Each shifted loss is a full circuit loss; the unshifted prefix states and the
/// observable propagated backwards through the suffix are cached so every
/// variant costs one quadratic form instead of a fresh simulation.
GradientVector parameter_shift_gradient(const CircuitSpec& circuit, std::span<const double> theta);

/// Loss plus parameter_shift_gradient() from one forward/backward pass.
LossAndGradient loss_and_gradient(const CircuitSpec& circuit, std::span<const double> theta);

/// The same shift rule, evaluating every shifted circuit variant from scratch.
GradientVector parameter_shift_gradient_resimulated(const CircuitSpec& circuit, std::span<const double> theta);

/// Central differences (L(theta + h e_k) - L(theta - h e_k)) / 2h.
GradientVector finite_difference_gradient(const CircuitSpec& circuit, std::span<const double> theta,
                                          double h = 1e-5);

}  // namespace qland
