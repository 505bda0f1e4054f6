#include "qland/gradient.hpp"

#include <cmath>
#include <stdexcept>

#include "kernels.hpp"

namespace qland {

namespace {

using detail::Mat2;

// Above this the 4^n observable matrix stops paying for itself.
constexpr int kMaxCachedQubits = 8;

constexpr double kHalfSqrt2 = 0.70710678118654752440;

void check_parameterized_gates(const CircuitSpec& circuit) {
  for (const auto& g : circuit.gates()) {
    if (g.is_parameterized() && !g.is_rotation()) {
      throw CircuitError("shift rule needs single-qubit rotations, got parameterized " + to_string(g.kind));
    }
  }
}

// R(phi +- pi/2) = R(+-pi/2) R(phi) for a rotation about a fixed axis.
Mat2 quarter_turn(GateKind kind, double sign) {
  const double c = kHalfSqrt2;
  const double s = sign * kHalfSqrt2;
  switch (kind) {
    case GateKind::RX: return {Complex(c, 0.0), Complex(0.0, -s), Complex(0.0, -s), Complex(c, 0.0)};
    case GateKind::RY: return {Complex(c, 0.0), Complex(-s, 0.0), Complex(s, 0.0), Complex(c, 0.0)};
    case GateKind::RZ: return {Complex(c, -s), Complex(0.0, 0.0), Complex(0.0, 0.0), Complex(c, s)};
    case GateKind::CNOT: break;
  }
  throw CircuitError("quarter_turn: not a rotation");
}

// Dense Hermitian observable, row-major, conjugated gate by gate from the
// output back towards the input.
class BackwardObservable {
 public:
  BackwardObservable(std::size_t dim, std::size_t measured_mask) : dim_(dim), m_(dim * dim, Complex(0.0, 0.0)) {
    for (std::size_t i = 0; i < dim_; ++i) {
      if (i & measured_mask) at(i, i) = 1.0;
    }
  }

  // O <- U^dagger O U
  void conjugate(const detail::ResolvedGate& g) {
    if (g.kind == GateKind::CNOT) {
      permute(g.control_mask, g.target_mask);
      return;
    }
    const std::size_t mask = g.target_mask;
    const Mat2& u = g.matrix;
    for (std::size_t r = 0; r < dim_; ++r) {
      Complex* row = &m_[r * dim_];
      for (std::size_t c0 = 0; c0 < dim_; ++c0) {
        if (c0 & mask) continue;
        const Complex x0 = row[c0];
        const Complex x1 = row[c0 | mask];
        row[c0] = x0 * u.a + x1 * u.c;
        row[c0 | mask] = x0 * u.b + x1 * u.d;
      }
    }
    const Complex ca = std::conj(u.a), cb = std::conj(u.b), cc = std::conj(u.c), cd = std::conj(u.d);
    for (std::size_t r0 = 0; r0 < dim_; ++r0) {
      if (r0 & mask) continue;
      Complex* top = &m_[r0 * dim_];
      Complex* bottom = &m_[(r0 | mask) * dim_];
      for (std::size_t c = 0; c < dim_; ++c) {
        const Complex x0 = top[c];
        const Complex x1 = bottom[c];
        top[c] = ca * x0 + cc * x1;
        bottom[c] = cb * x0 + cd * x1;
      }
    }
  }

  // <psi| O |psi>
  double expectation(std::span<const Complex> psi) const {
    double acc = 0.0;
    for (std::size_t r = 0; r < dim_; ++r) {
      const Complex* row = &m_[r * dim_];
      Complex s(0.0, 0.0);
      for (std::size_t c = 0; c < dim_; ++c) s += row[c] * psi[c];
      acc += (std::conj(psi[r]) * s).real();
    }
    return acc;
  }

 private:
  Complex& at(std::size_t r, std::size_t c) { return m_[r * dim_ + c]; }

  void permute(std::size_t control_mask, std::size_t target_mask) {
    for (std::size_t r = 0; r < dim_; ++r) {
      if ((r & control_mask) && !(r & target_mask)) {
        for (std::size_t c = 0; c < dim_; ++c) std::swap(at(r, c), at(r | target_mask, c));
      }
    }
    for (std::size_t r = 0; r < dim_; ++r) {
      Complex* row = &m_[r * dim_];
      for (std::size_t c = 0; c < dim_; ++c) {
        if ((c & control_mask) && !(c & target_mask)) std::swap(row[c], row[c | target_mask]);
      }
    }
  }

  std::size_t dim_;
  std::vector<Complex> m_;
};

}  // namespace

LossAndGradient loss_and_gradient(const CircuitSpec& circuit, std::span<const double> theta) {
  check_parameterized_gates(circuit);
  if (circuit.n_qubits() > kMaxCachedQubits) {
    return {evaluate(circuit, theta), parameter_shift_gradient_resimulated(circuit, theta)};
  }

  const auto resolved = detail::resolve_gates(circuit, theta);
  const auto& gates = circuit.gates();
  const std::size_t n_gates = gates.size();
  const std::size_t dim = std::size_t{1} << circuit.n_qubits();
  const std::size_t measured = detail::bit_mask(circuit.n_qubits(), 0);

  // states[j] is the state after the first j gates.
  std::vector<Complex> states((n_gates + 1) * dim, Complex(0.0, 0.0));
  states[0] = 1.0;
  for (std::size_t j = 0; j < n_gates; ++j) {
    std::copy_n(&states[j * dim], dim, &states[(j + 1) * dim]);
    detail::apply_resolved(std::span<Complex>(&states[(j + 1) * dim], dim), resolved[j]);
  }

  LossAndGradient out;
  out.loss = detail::probability_one(std::span<const Complex>(&states[n_gates * dim], dim), measured);
  out.gradient.assign(circuit.n_params(), 0.0);

  BackwardObservable observable(dim, measured);
  std::vector<Complex> shifted(dim);
  for (std::size_t j = n_gates; j-- > 0;) {
    if (gates[j].is_parameterized()) {
      const std::span<const Complex> after(&states[(j + 1) * dim], dim);
      double shifted_loss[2];
      for (int s = 0; s < 2; ++s) {
        std::copy(after.begin(), after.end(), shifted.begin());
        detail::apply_single(shifted, resolved[j].target_mask, quarter_turn(gates[j].kind, s == 0 ? 1.0 : -1.0));
        shifted_loss[s] = observable.expectation(shifted);
      }
      out.gradient[gates[j].parameter_index()] += 0.5 * (shifted_loss[0] - shifted_loss[1]);
    }
    observable.conjugate(resolved[j]);
  }
  return out;
}

GradientVector parameter_shift_gradient(const CircuitSpec& circuit, std::span<const double> theta) {
  return loss_and_gradient(circuit, theta).gradient;
}

GradientVector parameter_shift_gradient_resimulated(const CircuitSpec& circuit, std::span<const double> theta) {
  check_parameterized_gates(circuit);
  if (theta.size() != circuit.n_params()) throw CircuitError("parameter point dimension mismatch");

  GradientVector grad(circuit.n_params(), 0.0);
  std::vector<GateOp> variant = circuit.gates();
  for (std::size_t j = 0; j < variant.size(); ++j) {
    if (!variant[j].is_parameterized()) continue;
    const GateOp original = variant[j];
    const std::size_t k = original.parameter_index();
    double shifted_loss[2];
    for (int s = 0; s < 2; ++s) {
      variant[j].angle = ConstantAngle{theta[k] + (s == 0 ? 0.5 : -0.5) * kPi};
      const CircuitSpec tagged(circuit.n_qubits(), circuit.n_params(), variant, circuit.repetitions());
      shifted_loss[s] = evaluate(tagged, theta);
    }
    variant[j] = original;
    grad[k] += 0.5 * (shifted_loss[0] - shifted_loss[1]);
  }
  return grad;
}

GradientVector finite_difference_gradient(const CircuitSpec& circuit, std::span<const double> theta, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("finite difference step must be positive");
  if (theta.size() != circuit.n_params()) throw CircuitError("parameter point dimension mismatch");
  GradientVector grad(circuit.n_params(), 0.0);
  std::vector<double> probe(theta.begin(), theta.end());
  for (std::size_t k = 0; k < probe.size(); ++k) {
    const double centre = probe[k];
    probe[k] = centre + h;
    const double up = evaluate(circuit, probe);
    probe[k] = centre - h;
    const double down = evaluate(circuit, probe);
    probe[k] = centre;
    grad[k] = (up - down) / (2.0 * h);
  }
  return grad;
}

}  // namespace qland
