// Dense-matrix reference for evaluate(). Every gate is expanded to a full
// 2^n x 2^n operator by Kronecker products and the circuit unitary is formed
// explicitly. Shares no code with the state-vector kernels.

#include <cmath>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include "qland/circuit.hpp"

namespace qland {

namespace {

using Matrix = Eigen::MatrixXcd;

Matrix single_qubit_matrix(GateKind kind, double angle) {
  const double c = std::cos(angle / 2.0);
  const double s = std::sin(angle / 2.0);
  const Complex i(0.0, 1.0);
  Matrix m(2, 2);
  switch (kind) {
    case GateKind::RX:
      m << c, -i * s, -i * s, c;
      break;
    case GateKind::RY:
      m << c, -s, s, c;
      break;
    case GateKind::RZ:
      m << std::exp(-i * (angle / 2.0)), 0.0, 0.0, std::exp(i * (angle / 2.0));
      break;
    case GateKind::CNOT:
      throw CircuitError("CNOT is not a single-qubit gate");
  }
  return m;
}

// Places one 2x2 factor per qubit (qubit 0 leftmost) and multiplies out.
Matrix embed(int n_qubits, const std::vector<Matrix>& factors) {
  Matrix out = factors[0];
  for (int q = 1; q < n_qubits; ++q) {
    Matrix next = Eigen::kroneckerProduct(out, factors[static_cast<std::size_t>(q)]).eval();
    out = std::move(next);
  }
  return out;
}

Matrix full_gate(int n_qubits, const GateOp& gate, double angle) {
  const Matrix id = Matrix::Identity(2, 2);
  if (gate.kind != GateKind::CNOT) {
    std::vector<Matrix> factors(static_cast<std::size_t>(n_qubits), id);
    factors[static_cast<std::size_t>(gate.target)] = single_qubit_matrix(gate.kind, angle);
    return embed(n_qubits, factors);
  }
  Matrix p0 = Matrix::Zero(2, 2);
  p0(0, 0) = 1.0;
  Matrix p1 = Matrix::Zero(2, 2);
  p1(1, 1) = 1.0;
  Matrix x = Matrix::Zero(2, 2);
  x(0, 1) = 1.0;
  x(1, 0) = 1.0;

  std::vector<Matrix> idle(static_cast<std::size_t>(n_qubits), id);
  idle[static_cast<std::size_t>(*gate.control)] = p0;
  std::vector<Matrix> flip(static_cast<std::size_t>(n_qubits), id);
  flip[static_cast<std::size_t>(*gate.control)] = p1;
  flip[static_cast<std::size_t>(gate.target)] = x;
  return embed(n_qubits, idle) + embed(n_qubits, flip);
}

}  // namespace

double evaluate_dense_oracle(const CircuitSpec& circuit, std::span<const double> theta, int max_qubits) {
  const int n = circuit.n_qubits();
  if (n > max_qubits) {
    throw CircuitError("dense oracle limited to " + std::to_string(max_qubits) + " qubits, got " +
                       std::to_string(n));
  }
  if (theta.size() != circuit.n_params()) throw CircuitError("parameter point dimension mismatch");

  const Eigen::Index dim = Eigen::Index{1} << n;
  Matrix unitary = Matrix::Identity(dim, dim);
  for (const auto& g : circuit.gates()) {
    unitary = (full_gate(n, g, resolve_angle(g, theta)) * unitary).eval();
  }

  Eigen::VectorXcd psi = unitary.col(0);
  double p = 0.0;
  for (Eigen::Index i = dim / 2; i < dim; ++i) p += std::norm(psi(i));
  return p;
}

}  // namespace qland
