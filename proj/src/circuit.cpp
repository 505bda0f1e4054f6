#include "qland/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kernels.hpp"

namespace qland {

namespace {

void check_qubit_count(int n_qubits) {
  if (n_qubits < 1 || n_qubits > 30) {
    throw CircuitError("qubit count out of range: " + std::to_string(n_qubits));
  }
}

void check_theta(const CircuitSpec& circuit, std::span<const double> theta) {
  if (theta.size() != circuit.n_params()) {
    throw CircuitError("parameter point has " + std::to_string(theta.size()) + " entries, circuit expects " +
                       std::to_string(circuit.n_params()));
  }
}

}  // namespace

StateVector::StateVector(int n_qubits) : n_qubits_(n_qubits) {
  check_qubit_count(n_qubits);
  amps_.assign(std::size_t{1} << n_qubits, Complex(0.0, 0.0));
  amps_[0] = Complex(1.0, 0.0);
}

StateVector::StateVector(int n_qubits, std::vector<Complex> amplitudes)
    : n_qubits_(n_qubits), amps_(std::move(amplitudes)) {
  check_qubit_count(n_qubits);
  if (amps_.size() != (std::size_t{1} << n_qubits)) {
    throw CircuitError("amplitude vector length must be 2^n_qubits");
  }
}

double StateVector::norm() const {
  double sum = 0.0;
  for (const auto& a : amps_) sum += std::norm(a);
  return std::sqrt(sum);
}

double StateVector::probability_one(int qubit) const {
  if (qubit < 0 || qubit >= n_qubits_) throw CircuitError("qubit index out of range");
  return detail::probability_one(amps_, detail::bit_mask(n_qubits_, qubit));
}

std::string to_string(GateKind kind) {
  switch (kind) {
    case GateKind::RX: return "RX";
    case GateKind::RY: return "RY";
    case GateKind::RZ: return "RZ";
    case GateKind::CNOT: return "CNOT";
  }
  return "?";
}

CircuitSpec::CircuitSpec(int n_qubits, std::size_t n_params, std::vector<GateOp> gates, int repetitions)
    : n_qubits_(n_qubits), n_params_(n_params), repetitions_(repetitions), gates_(std::move(gates)) {
  check_qubit_count(n_qubits);
  for (const auto& g : gates_) {
    if (g.target < 0 || g.target >= n_qubits_) {
      throw CircuitError(to_string(g.kind) + ": target qubit " + std::to_string(g.target) + " out of range");
    }
    if (g.kind == GateKind::CNOT) {
      if (!g.control) throw CircuitError("CNOT requires a control qubit");
      if (*g.control < 0 || *g.control >= n_qubits_) throw CircuitError("CNOT: control qubit out of range");
      if (*g.control == g.target) throw CircuitError("CNOT: control equals target");
      if (g.is_parameterized()) throw CircuitError("CNOT cannot take a parameter");
    } else if (g.control) {
      throw CircuitError(to_string(g.kind) + ": only CNOT has a control qubit");
    }
    if (g.is_parameterized() && g.parameter_index() >= n_params_) {
      throw CircuitError("parameter index " + std::to_string(g.parameter_index()) + " out of range");
    }
  }
}

std::size_t CircuitSpec::occurrences(std::size_t k) const {
  return static_cast<std::size_t>(std::count_if(gates_.begin(), gates_.end(), [k](const GateOp& g) {
    return g.is_parameterized() && g.parameter_index() == k;
  }));
}

double resolve_angle(const GateOp& gate, std::span<const double> theta) {
  if (gate.kind == GateKind::CNOT) return 0.0;
  if (const auto* p = std::get_if<SharedParameter>(&gate.angle)) {
    if (p->index >= theta.size()) throw CircuitError("parameter index out of range");
    return theta[p->index];
  }
  return std::get<ConstantAngle>(gate.angle).value;
}

void apply_gate_inplace(std::span<Complex> amps, int n_qubits, const GateOp& gate, double angle) {
  if (amps.size() != (std::size_t{1} << n_qubits)) throw CircuitError("state dimension mismatch");
  if (gate.target < 0 || gate.target >= n_qubits) throw CircuitError("target qubit out of range");
  const std::size_t target_mask = detail::bit_mask(n_qubits, gate.target);
  if (gate.kind == GateKind::CNOT) {
    if (!gate.control || *gate.control < 0 || *gate.control >= n_qubits || *gate.control == gate.target) {
      throw CircuitError("CNOT: invalid control qubit");
    }
    detail::apply_cnot(amps, detail::bit_mask(n_qubits, *gate.control), target_mask);
    return;
  }
  detail::apply_single(amps, target_mask, detail::rotation_matrix(gate.kind, angle));
}

StateVector apply_gate(const StateVector& state, const GateOp& gate, std::span<const double> theta) {
  StateVector out = state;
  apply_gate_inplace(out.amplitudes(), out.n_qubits(), gate, resolve_angle(gate, theta));
  return out;
}

CircuitSpec build_default_circuit(int n_qubits, int repetitions) {
  if (n_qubits < 2) throw CircuitError("default circuit needs at least 2 qubits");
  if (repetitions < 1) throw CircuitError("default circuit needs at least 1 repetition");

  std::vector<GateOp> gates;
  gates.reserve(static_cast<std::size_t>(repetitions) * 6 * n_qubits);
  auto staircase = [&](GateKind kind, std::size_t param) {
    for (int q = 0; q < n_qubits; ++q) {
      gates.push_back({kind, q, std::nullopt, SharedParameter{param}});
      gates.push_back(GateOp::cnot(q, (q + 1) % n_qubits));
    }
  };
  for (int b = 0; b < repetitions; ++b) {
    for (int q = 0; q < n_qubits; ++q) gates.push_back(GateOp::rx(q, ConstantAngle{1.0}));
    staircase(GateKind::RY, 0);
    for (int q = 0; q < n_qubits; ++q) gates.push_back(GateOp::rz(q, ConstantAngle{2.0}));
    staircase(GateKind::RX, 1);
  }
  return CircuitSpec(n_qubits, 2, std::move(gates), repetitions);
}

namespace detail {

std::vector<ResolvedGate> resolve_gates(const CircuitSpec& circuit, std::span<const double> theta) {
  check_theta(circuit, theta);
  const int n = circuit.n_qubits();
  std::vector<ResolvedGate> out;
  out.reserve(circuit.gates().size());
  std::vector<ResolvedGate> distinct;
  for (const auto& g : circuit.gates()) {
    ResolvedGate r{g.kind, bit_mask(n, g.target), 0, 0.0, {}};
    if (g.kind == GateKind::CNOT) {
      r.control_mask = bit_mask(n, *g.control);
    } else {
      r.angle = resolve_angle(g, theta);
      auto same = std::find_if(distinct.begin(), distinct.end(), [&](const ResolvedGate& o) {
        return o.kind == r.kind && o.angle == r.angle;
      });
      if (same != distinct.end()) {
        r.matrix = same->matrix;
      } else {
        r.matrix = rotation_matrix(g.kind, r.angle);
        distinct.push_back(r);
      }
    }
    out.push_back(r);
  }
  return out;
}

}  // namespace detail

StateVector simulate(const CircuitSpec& circuit, std::span<const double> theta) {
  const auto resolved = detail::resolve_gates(circuit, theta);
  StateVector state(circuit.n_qubits());
  for (const auto& g : resolved) detail::apply_resolved(state.amplitudes(), g);
  return state;
}

double evaluate(const CircuitSpec& circuit, std::span<const double> theta) {
  return simulate(circuit, theta).probability_one(0);
}

}  // namespace qland
