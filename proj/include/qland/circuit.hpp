#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace qland {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr double kFourPi = 4.0 * kPi;

class CircuitError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Pure n-qubit state. Qubit 0 is the most significant bit of the amplitude index.
class StateVector {
 public:
  /// |0...0>
  explicit StateVector(int n_qubits);
  StateVector(int n_qubits, std::vector<Complex> amplitudes);

  int n_qubits() const { return n_qubits_; }
  std::size_t dim() const { return amps_.size(); }

  std::span<const Complex> amplitudes() const { return amps_; }
  std::span<Complex> amplitudes() { return amps_; }
  const Complex& operator[](std::size_t i) const { return amps_[i]; }

  double norm() const;

  /// Probability that `qubit` is measured as |1>.
  double probability_one(int qubit) const;

 private:
  int n_qubits_;
  std::vector<Complex> amps_;
};

enum class GateKind { RX, RY, RZ, CNOT };

std::string to_string(GateKind kind);

struct ConstantAngle {
  double value = 0.0;
};

struct SharedParameter {
  std::size_t index = 0;
};

using AngleSource = std::variant<ConstantAngle, SharedParameter>;

struct GateOp {
  GateKind kind = GateKind::RX;
  int target = 0;
  std::optional<int> control;
  AngleSource angle = ConstantAngle{0.0};

  static GateOp rx(int target, AngleSource angle) { return {GateKind::RX, target, std::nullopt, angle}; }
  static GateOp ry(int target, AngleSource angle) { return {GateKind::RY, target, std::nullopt, angle}; }
  static GateOp rz(int target, AngleSource angle) { return {GateKind::RZ, target, std::nullopt, angle}; }
  static GateOp cnot(int control, int target) { return {GateKind::CNOT, target, control, ConstantAngle{0.0}}; }

  bool is_rotation() const { return kind != GateKind::CNOT; }
  bool is_parameterized() const { return std::holds_alternative<SharedParameter>(angle); }
  /// Only meaningful when is_parameterized().
  std::size_t parameter_index() const { return std::get<SharedParameter>(angle).index; }
};

/// Angles in radians, one per shared parameter. Canonical domain is [0, 4pi).
using ParameterPoint = std::vector<double>;

/// Immutable gate sequence over a fixed number of qubits and shared parameters.
class CircuitSpec {
 public:
  CircuitSpec(int n_qubits, std::size_t n_params, std::vector<GateOp> gates, int repetitions = 1);

  int n_qubits() const { return n_qubits_; }
  std::size_t n_params() const { return n_params_; }
  int repetitions() const { return repetitions_; }
  const std::vector<GateOp>& gates() const { return gates_; }

  /// Number of gates that read parameter `k`.
  std::size_t occurrences(std::size_t k) const;

 private:
  int n_qubits_;
  std::size_t n_params_;
  int repetitions_;
  std::vector<GateOp> gates_;
};

/// Resolves the angle a gate uses at `theta`. CNOT yields 0.
double resolve_angle(const GateOp& gate, std::span<const double> theta);

/// Applies `gate` with an already-resolved angle, in place.
void apply_gate_inplace(std::span<Complex> amps, int n_qubits, const GateOp& gate, double angle);

StateVector apply_gate(const StateVector& state, const GateOp& gate, std::span<const double> theta);

/// The shared-parameter ansatz: `repetitions` blocks of
/// RX(1) on all qubits, RY(theta_0) + CNOT(i, i+1 mod n) staircase,
/// RZ(2) on all qubits, RX(theta_1) + CNOT staircase.
CircuitSpec build_default_circuit(int n_qubits, int repetitions);

/// Runs the circuit from |0...0> and returns the final state.
StateVector simulate(const CircuitSpec& circuit, std::span<const double> theta);

/// Probability of measuring |1> on qubit 0 after running the circuit from |0...0>.
double evaluate(const CircuitSpec& circuit, std::span<const double> theta);

/// Same observable as evaluate(), computed by multiplying explicit 2^n x 2^n
/// gate matrices. Slow; used for differential testing.
double evaluate_dense_oracle(const CircuitSpec& circuit, std::span<const double> theta, int max_qubits = 4);

}  // namespace qland
