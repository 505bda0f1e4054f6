#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "qland/circuit.hpp"

using namespace qland;

namespace {

const std::vector<double> kNoParams{0.0, 0.0};

std::size_t count_kind(const CircuitSpec& c, GateKind k) {
  std::size_t n = 0;
  for (const auto& g : c.gates()) n += g.kind == k;
  return n;
}

}  // namespace

TEST_CASE("apply_gate: RX(0) is the identity") {
  StateVector s(2, {Complex(0.6, 0.0), Complex(0.0, 0.0), Complex(0.0, 0.8), Complex(0.0, 0.0)});
  const auto out = apply_gate(s, GateOp::rx(0, ConstantAngle{0.0}), kNoParams);
  for (std::size_t i = 0; i < s.dim(); ++i) CHECK(out[i] == s[i]);
}

TEST_CASE("apply_gate: RX(pi)|0> = -i|1>") {
  const auto out = apply_gate(StateVector(1), GateOp::rx(0, ConstantAngle{kPi}), kNoParams);
  CHECK(std::abs(out[0]) < 1e-15);
  CHECK(out[1].real() == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(out[1].imag() == doctest::Approx(-1.0));
  CHECK(out.probability_one(0) == doctest::Approx(1.0));
}

TEST_CASE("apply_gate: CNOT(0 -> 1) maps |10> to |11>") {
  // Qubit 0 is the most significant bit: |10> is index 2, |11> index 3.
  StateVector s(2, {0.0, 0.0, 1.0, 0.0});
  const auto out = apply_gate(s, GateOp::cnot(0, 1), kNoParams);
  CHECK(out[3] == Complex(1.0, 0.0));
  CHECK(out[2] == Complex(0.0, 0.0));
}

TEST_CASE("apply_gate: RY and RZ matrices") {
  const double phi = 0.9;
  const auto ry = apply_gate(StateVector(1), GateOp::ry(0, ConstantAngle{phi}), kNoParams);
  CHECK(ry[0].real() == doctest::Approx(std::cos(phi / 2)));
  CHECK(ry[1].real() == doctest::Approx(std::sin(phi / 2)));

  StateVector plus(1, {1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)});
  const auto rz = apply_gate(plus, GateOp::rz(0, ConstantAngle{phi}), kNoParams);
  const Complex e = std::polar(1.0 / std::sqrt(2.0), -phi / 2);
  CHECK(std::abs(rz[0] - e) < 1e-15);
  CHECK(std::abs(rz[1] - std::conj(e)) < 1e-15);
}

TEST_CASE("apply_gate: parameters resolve through theta") {
  const std::vector<double> theta{kPi, 0.0};
  const auto out = apply_gate(StateVector(1), GateOp::rx(0, SharedParameter{0}), theta);
  CHECK(out.probability_one(0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(apply_gate(StateVector(1), GateOp::rx(0, SharedParameter{2}), theta), CircuitError);
}

TEST_CASE("apply_gate: input state is not modified") {
  const StateVector s(2);
  (void)apply_gate(s, GateOp::rx(1, ConstantAngle{1.0}), kNoParams);
  CHECK(s[0] == Complex(1.0, 0.0));
}

TEST_CASE("invalid gates are rejected") {
  CHECK_THROWS_AS(CircuitSpec(2, 2, {GateOp::rx(2, ConstantAngle{1.0})}), CircuitError);
  CHECK_THROWS_AS(CircuitSpec(2, 2, {GateOp::cnot(1, 1)}), CircuitError);
  CHECK_THROWS_AS(CircuitSpec(2, 2, {GateOp::rx(0, SharedParameter{2})}), CircuitError);
  GateOp controlled_rx = GateOp::rx(0, ConstantAngle{1.0});
  controlled_rx.control = 1;
  CHECK_THROWS_AS(CircuitSpec(2, 2, {controlled_rx}), CircuitError);
  CHECK_THROWS_AS(apply_gate(StateVector(2), GateOp::rx(3, ConstantAngle{1.0}), kNoParams), CircuitError);
}

TEST_CASE("build_default_circuit: gate counts") {
  CHECK(build_default_circuit(2, 1).gates().size() == 12);
  CHECK(build_default_circuit(2, 3).gates().size() == 36);
  CHECK(build_default_circuit(3, 1).gates().size() == 18);
  CHECK_THROWS_AS(build_default_circuit(1, 1), CircuitError);
  CHECK_THROWS_AS(build_default_circuit(2, 0), CircuitError);
}

TEST_CASE("build_default_circuit: block layout") {
  const auto c = build_default_circuit(3, 1);
  const auto& g = c.gates();
  for (int q = 0; q < 3; ++q) {
    CHECK(g[q].kind == GateKind::RX);
    CHECK(std::get<ConstantAngle>(g[q].angle).value == 1.0);
  }
  // RY(theta_0) on qubit i, then CNOT(i, i+1 mod n)
  for (int q = 0; q < 3; ++q) {
    const auto& rot = g[3 + 2 * q];
    const auto& cx = g[3 + 2 * q + 1];
    CHECK(rot.kind == GateKind::RY);
    CHECK(rot.parameter_index() == 0);
    CHECK(rot.target == q);
    CHECK(cx.kind == GateKind::CNOT);
    CHECK(*cx.control == q);
    CHECK(cx.target == (q + 1) % 3);
  }
  for (int q = 0; q < 3; ++q) {
    CHECK(g[9 + q].kind == GateKind::RZ);
    CHECK(std::get<ConstantAngle>(g[9 + q].angle).value == 2.0);
  }
  for (int q = 0; q < 3; ++q) {
    CHECK(g[12 + 2 * q].kind == GateKind::RX);
    CHECK(g[12 + 2 * q].parameter_index() == 1);
    CHECK(g[12 + 2 * q + 1].target == (q + 1) % 3);
  }
}

TEST_CASE("build_default_circuit: exactly two shared parameters") {
  for (int n = 2; n <= 5; ++n) {
    for (int b = 1; b <= 7; b += 3) {
      const auto c = build_default_circuit(n, b);
      CHECK(c.n_params() == 2);
      CHECK(c.occurrences(0) == std::size_t(n * b));
      CHECK(c.occurrences(1) == std::size_t(n * b));
      CHECK(count_kind(c, GateKind::CNOT) == std::size_t(2 * n * b));
    }
  }
}

TEST_CASE("evaluate: trivial circuits") {
  const CircuitSpec flip(2, 2, {GateOp::rx(0, ConstantAngle{kPi})});
  CHECK(evaluate(flip, std::vector<double>{0.3, 2.0}) == doctest::Approx(1.0));
  const CircuitSpec empty(3, 2, {});
  CHECK(evaluate(empty, kNoParams) == 0.0);
  CHECK(evaluate_dense_oracle(empty, kNoParams) == 0.0);
  CHECK_THROWS_AS(evaluate(flip, std::vector<double>{1.0}), CircuitError);
}

TEST_CASE("evaluate: default circuit regression values") {
  // Frozen from an independent numpy kron-product simulation.
  const auto c21 = build_default_circuit(2, 1);
  CHECK(evaluate(c21, std::vector<double>{0.0, 0.0}) == doctest::Approx(0.3540367091367857).epsilon(1e-13));
  CHECK(evaluate_dense_oracle(c21, std::vector<double>{0.0, 0.0}) ==
        doctest::Approx(0.3540367091367857).epsilon(1e-13));

  const auto c32 = build_default_circuit(3, 2);
  const std::vector<double> theta{1.0, 2.5};
  CHECK(std::abs(evaluate(c32, theta) - evaluate_dense_oracle(c32, theta)) <= 1e-12);
  CHECK(evaluate(c32, theta) == doctest::Approx(0.5107653497327482).epsilon(1e-13));
}

TEST_CASE("evaluate_dense_oracle: qubit cap") {
  const auto c = build_default_circuit(5, 1);
  CHECK_THROWS_AS(evaluate_dense_oracle(c, kNoParams), CircuitError);
  CHECK_NOTHROW(evaluate_dense_oracle(c, kNoParams, 5));
}

TEST_CASE("property: norm preserved by every gate") {
  std::mt19937_64 gen(7);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> angle(-10.0, 10.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 4;
    std::vector<Complex> amps(std::size_t{1} << n);
    for (auto& a : amps) a = Complex(normal(gen), normal(gen));
    double norm = 0;
    for (auto& a : amps) norm += std::norm(a);
    for (auto& a : amps) a /= std::sqrt(norm);
    StateVector s(n, amps);
    const std::vector<double> theta{angle(gen), angle(gen)};
    for (GateKind k : {GateKind::RX, GateKind::RY, GateKind::RZ}) {
      s = apply_gate(s, {k, trial % n, std::nullopt, SharedParameter{std::size_t(trial % 2)}}, theta);
      CHECK(std::abs(s.norm() - 1.0) <= 1e-12);
    }
    if (n >= 2) {
      s = apply_gate(s, GateOp::cnot(0, n - 1), theta);
      CHECK(std::abs(s.norm() - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("property: simulator agrees with dense oracle, stays in [0, 1], 2pi-periodic") {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> angle(0.0, kFourPi);
  for (int trial = 0; trial < 120; ++trial) {
    const int n = 2 + trial % 3;
    const int b = 1 + (trial / 3) % 5;
    const auto c = trial % 2 ? build_default_circuit(n, b) : testing::random_circuit(n, 6 * b, gen);
    std::vector<double> theta{angle(gen), angle(gen)};
    const double v = evaluate(c, theta);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    CHECK(std::abs(v - evaluate_dense_oracle(c, theta)) <= 1e-12);
    for (std::size_t k = 0; k < 2; ++k) {
      auto shifted = theta;
      shifted[k] += kTwoPi;
      CHECK(std::abs(evaluate(c, shifted) - v) <= 1e-12);
    }
  }
}
