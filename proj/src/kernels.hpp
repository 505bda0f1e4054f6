#pragma once

// Internal state-vector kernels shared by the simulator and the gradient code.

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "qland/circuit.hpp"

namespace qland::detail {

/// Row-major 2x2 complex matrix.
struct Mat2 {
  Complex a, b, c, d;  // [[a, b], [c, d]]
};

inline Mat2 rotation_matrix(GateKind kind, double angle) {
  const double c = std::cos(0.5 * angle);
  const double s = std::sin(0.5 * angle);
  switch (kind) {
    case GateKind::RX:
      return {Complex(c, 0.0), Complex(0.0, -s), Complex(0.0, -s), Complex(c, 0.0)};
    case GateKind::RY:
      return {Complex(c, 0.0), Complex(-s, 0.0), Complex(s, 0.0), Complex(c, 0.0)};
    case GateKind::RZ:
      return {Complex(c, -s), Complex(0.0, 0.0), Complex(0.0, 0.0), Complex(c, s)};
    case GateKind::CNOT:
      break;
  }
  throw CircuitError("rotation_matrix: CNOT has no rotation matrix");
}

inline std::size_t bit_mask(int n_qubits, int qubit) {
  return std::size_t{1} << static_cast<unsigned>(n_qubits - 1 - qubit);
}

inline void apply_single(std::span<Complex> amps, std::size_t mask, const Mat2& m) {
  const std::size_t dim = amps.size();
  for (std::size_t i = 0; i < dim; ++i) {
    if (i & mask) continue;
    const Complex x0 = amps[i];
    const Complex x1 = amps[i | mask];
    amps[i] = m.a * x0 + m.b * x1;
    amps[i | mask] = m.c * x0 + m.d * x1;
  }
}

inline void apply_cnot(std::span<Complex> amps, std::size_t control_mask, std::size_t target_mask) {
  const std::size_t dim = amps.size();
  for (std::size_t i = 0; i < dim; ++i) {
    if ((i & control_mask) && !(i & target_mask)) std::swap(amps[i], amps[i | target_mask]);
  }
}

/// Probability that the bit selected by `mask` reads 1.
inline double probability_one(std::span<const Complex> amps, std::size_t mask) {
  double p = 0.0;
  for (std::size_t i = 0; i < amps.size(); ++i) {
    if (i & mask) p += std::norm(amps[i]);
  }
  return p;
}

/// Per-gate resolved operators for one parameter point. Identical (kind, angle)
/// pairs share one trig evaluation.
struct ResolvedGate {
  GateKind kind;
  std::size_t target_mask;
  std::size_t control_mask;  // 0 unless CNOT
  double angle;
  Mat2 matrix;  // unused for CNOT
};

std::vector<ResolvedGate> resolve_gates(const CircuitSpec& circuit, std::span<const double> theta);

inline void apply_resolved(std::span<Complex> amps, const ResolvedGate& g) {
  if (g.kind == GateKind::CNOT) {
    apply_cnot(amps, g.control_mask, g.target_mask);
  } else {
    apply_single(amps, g.target_mask, g.matrix);
  }
}

}  // namespace qland::detail
