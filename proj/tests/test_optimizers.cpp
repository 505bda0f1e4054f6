#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "qland/optimizers.hpp"

using namespace qland;

namespace {

OptimizerConfig sgd(double lr) {
  OptimizerConfig c;
  c.kind = OptimizerKind::SGD;
  c.learning_rate = lr;
  return c;
}

OptimizerConfig adam(double lr) {
  OptimizerConfig c;
  c.kind = OptimizerKind::Adam;
  c.learning_rate = lr;
  return c;
}

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("optimizer names") {
  CHECK(parse_optimizer_kind("sgd") == OptimizerKind::SGD);
  CHECK(parse_optimizer_kind("ADAM") == OptimizerKind::Adam);
  CHECK(to_string(OptimizerKind::SGD) == "sgd");
  CHECK(to_string(OptimizerKind::Adam) == "adam");
  try {
    parse_optimizer_kind("foo");
    FAIL("expected an exception");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find("sgd") != std::string::npos);
    CHECK(msg.find("adam") != std::string::npos);
  }
}

TEST_CASE("config validation") {
  CHECK_NOTHROW(adam(0.1).validate());
  CHECK_THROWS_AS(sgd(0.0).validate(), std::invalid_argument);
  CHECK_THROWS_AS(sgd(-1.0).validate(), std::invalid_argument);
  auto c = adam(0.1);
  c.beta1 = 1.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = adam(0.1);
  c.eps = 0.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("sgd_step") {
  const std::vector<double> theta{1.0, 1.0};
  CHECK(sgd_step(theta, std::vector<double>{0.0, 0.0}, sgd(0.1)) == theta);
  const auto out = sgd_step(theta, std::vector<double>{1.0, -2.0}, sgd(0.1));
  CHECK(out[0] == doctest::Approx(0.9));
  CHECK(out[1] == doctest::Approx(1.2));
  CHECK_THROWS(sgd_step(theta, std::vector<double>{1.0}, sgd(0.1)));
}

TEST_CASE("sgd_step on single RX from pi/2 with lr 1") {
  const CircuitSpec c(1, 1, {GateOp::rx(0, SharedParameter{0})});
  const std::vector<double> theta{kPi / 2};
  const auto g = parameter_shift_gradient(c, theta);
  CHECK(sgd_step(theta, g, sgd(1.0))[0] == doctest::Approx(kPi / 2 - 0.5).epsilon(1e-14));
}

TEST_CASE("property: sgd step is exact") {
  const std::vector<double> theta{0.75, -3.5, 0.5};
  const std::vector<double> g{0.5, 0.25, -2.0};
  const auto out = sgd_step(theta, g, sgd(0.125));
  for (std::size_t k = 0; k < theta.size(); ++k) CHECK(out[k] + 0.125 * g[k] - theta[k] == 0.0);
}

TEST_CASE("adam_step: zero gradient from zero state is a fixpoint") {
  const std::vector<double> theta{0.3, 2.0};
  const auto up = adam_step(theta, std::vector<double>{0.0, 0.0}, AdamState::zeros(2), adam(0.1));
  CHECK(up.theta == theta);
  CHECK(up.state.m == std::vector<double>{0.0, 0.0});
  CHECK(up.state.v == std::vector<double>{0.0, 0.0});
}

TEST_CASE("adam_step: first step moves about lr per coordinate") {
  const std::vector<double> theta{0.0, 0.0, 0.0};
  const std::vector<double> g{1e-3, -0.7, 250.0};
  for (double lr : kProtocolLearningRates) {
    const auto up = adam_step(theta, g, AdamState::zeros(3), adam(lr));
    CHECK(up.state.t == 1);
    for (std::size_t k = 0; k < 3; ++k) {
      const double step = std::abs(up.theta[k] - theta[k]);
      CHECK(step >= 0.99 * lr);
      CHECK(step <= lr);
      CHECK(std::signbit(up.theta[k]) != std::signbit(g[k]));
    }
  }
}

TEST_CASE("adam_step: three scripted steps") {
  // Reference table from a direct numpy evaluation of the recurrences.
  struct Row {
    double theta0, theta1, m0, m1, v0, v1;
  };
  const Row expected[] = {
      {0.900000002, -0.4000000005, 0.04999999999999999, -0.19999999999999996, 0.0002500000000000002,
       0.0040000000000000036},
      {0.8733662987078463, -0.37336629670243154, 0.019999999999999997, -0.07999999999999999, 0.0003122500000000003,
       0.004996000000000005},
      {0.8393233849166541, -0.35277836650344163, 0.030499999999999996, -0.072, 0.0003275627500000003,
       0.004991004000000005},
  };
  const std::vector<std::vector<double>> grads{{0.5, -2.0}, {-0.25, 1.0}, {0.125, 0.0}};

  std::vector<double> theta{1.0, -0.5};
  auto state = AdamState::zeros(2);
  for (std::size_t t = 0; t < 3; ++t) {
    auto up = adam_step(theta, grads[t], state, adam(0.1));
    theta = up.theta;
    state = up.state;
    CHECK(state.t == t + 1);
    const auto& e = expected[t];
    CHECK(theta[0] == doctest::Approx(e.theta0).epsilon(1e-14));
    CHECK(theta[1] == doctest::Approx(e.theta1).epsilon(1e-14));
    CHECK(state.m[0] == doctest::Approx(e.m0).epsilon(1e-14));
    CHECK(state.m[1] == doctest::Approx(e.m1).epsilon(1e-14));
    CHECK(state.v[0] == doctest::Approx(e.v0).epsilon(1e-14));
    CHECK(state.v[1] == doctest::Approx(e.v1).epsilon(1e-14));
  }
}

TEST_CASE("wrap_angle") {
  CHECK(wrap_angle(0.0) == 0.0);
  CHECK(wrap_angle(kFourPi + 1.0) == doctest::Approx(1.0));
  CHECK(wrap_angle(-1.0) == doctest::Approx(kFourPi - 1.0));
  for (double x : {-100.0, -1e-18, 3.0, 57.0, 1e6}) {
    const double w = wrap_angle(x);
    CHECK(w >= 0.0);
    CHECK(w < kFourPi);
  }
}

TEST_CASE("run_optimization: constant circuit never moves") {
  const CircuitSpec c(2, 2, {GateOp::ry(0, ConstantAngle{0.8})});
  const std::vector<double> start{1.0, 2.0};
  for (const auto& cfg : {sgd(0.1), adam(0.1)}) {
    const auto r = run_optimization(c, start, cfg, 7);
    CHECK(r.trajectory.size() == 8);
    CHECK(r.losses.size() == 8);
    for (const auto& p : r.trajectory) CHECK(p == start);
    CHECK(r.best_loss == r.losses[0]);
    CHECK(r.last_loss == r.losses[0]);
    CHECK(r.best_iter == 0);
  }
}

TEST_CASE("run_optimization: single RX converges under SGD") {
  const CircuitSpec c(1, 1, {GateOp::rx(0, SharedParameter{0})});
  const std::vector<double> start{kPi / 2};
  const auto r = run_optimization(c, start, sgd(0.1), 500);
  CHECK(r.trajectory.size() == 501);
  CHECK(r.trajectory[0] == start);
  CHECK(r.last_loss < 1e-6);
  CHECK(r.best_loss == r.last_loss);
  // theta <- theta - 0.05 sin(theta)
  CHECK(r.trajectory[1][0] == doctest::Approx(kPi / 2 - 0.05).epsilon(1e-14));
  CHECK_THROWS(run_optimization(c, start, sgd(0.1), 0));
}

TEST_CASE("property: elitism and record shape") {
  const auto c = build_default_circuit(2, 3);
  const std::vector<OptimizerConfig> configs{sgd(0.1), adam(0.01), adam(1.0)};
  const auto records = multi_start_experiment(c, 6, configs, 25, 11);
  REQUIRE(records.size() == 18);
  for (const auto& r : records) {
    CHECK(r.trajectory.size() == 26);
    CHECK(r.best_loss <= r.last_loss);
    CHECK(r.best_loss <= r.losses[0]);
    CHECK(r.best_loss == *std::min_element(r.losses.begin(), r.losses.end()));
    CHECK(r.losses[r.best_iter] == r.best_loss);
    CHECK(r.last_loss == r.losses.back());
    CHECK(r.repetitions == 3);
    CHECK(r.seed == 11);
    CHECK(r.trajectory[0] == r.start);
    for (std::size_t t = 0; t < r.losses.size(); t += 8) {
      CHECK(std::abs(r.losses[t] - evaluate(c, r.trajectory[t])) <= 1e-14);
    }
  }
  // Ordered by config, then start; every config sees the same start set.
  for (std::size_t k = 0; k < 6; ++k) {
    CHECK(records[k].config == configs[0]);
    CHECK(records[k].start_index == k);
    CHECK(records[6 + k].start == records[k].start);
    CHECK(records[12 + k].start == records[k].start);
  }
}

TEST_CASE("draw_starts: range, count and determinism") {
  const auto a = draw_starts(200, 2, 42);
  CHECK(a.size() == 200);
  for (const auto& p : a) {
    REQUIRE(p.size() == 2);
    for (double x : p) {
      CHECK(x >= 0.0);
      CHECK(x < kFourPi);
    }
  }
  CHECK(draw_starts(200, 2, 42) == a);
  CHECK(draw_starts(200, 2, 43) != a);
  const auto small = draw_starts(50, 2, 42, kPi);
  for (const auto& p : small) {
    for (double x : p) CHECK(x < kPi);
  }
  // The first coordinate consumes the first draw of the generator.
  std::mt19937_64 gen(42);
  CHECK(a[0][0] == static_cast<double>(gen() >> 11) * 0x1.0p-53 * kFourPi);
  CHECK(a[0][1] == static_cast<double>(gen() >> 11) * 0x1.0p-53 * kFourPi);
}

TEST_CASE("multi_start_experiment: deterministic and worker independent") {
  const auto c = build_default_circuit(2, 2);
  const std::vector<OptimizerConfig> configs{adam(0.1), sgd(0.01)};
  const auto a = multi_start_experiment(c, 5, configs, 12, 3, 1);
  const auto b = multi_start_experiment(c, 5, configs, 12, 3, 3);
  CHECK(records_to_csv(a) == records_to_csv(b));
  // Reversed config order keeps the paired start set.
  const std::vector<OptimizerConfig> reversed{configs[1], configs[0]};
  const auto r = multi_start_experiment(c, 5, reversed, 12, 3);
  for (std::size_t k = 0; k < 5; ++k) {
    CHECK(r[k].trajectory == a[5 + k].trajectory);
    CHECK(r[5 + k].trajectory == a[k].trajectory);
  }
}

TEST_CASE("records CSV layout") {
  const auto c = build_default_circuit(2, 1);
  const std::vector<OptimizerConfig> configs{adam(0.1)};
  const auto records = multi_start_experiment(c, 2, configs, 3, 1);
  const auto csv = records_to_csv(records);
  CHECK(line_count(csv) == 1 + 2 * 4);
  std::istringstream in(csv);
  std::string header, first;
  std::getline(in, header);
  std::getline(in, first);
  CHECK(header == "run_id,optimizer,lr,repetitions,iter,theta1,theta2,loss,theta1_wrapped,theta2_wrapped");
  CHECK(first.rfind("0,adam,0.1,1,0,", 0) == 0);
}

TEST_CASE("success_summary: quartiles, counts and ground truth") {
  auto make = [](double best, double last) {
    RunRecord r;
    r.config = adam(0.01);
    r.repetitions = 2;
    r.best_loss = best;
    r.last_loss = last;
    return r;
  };
  const std::vector<RunRecord> records{make(0.1, 0.2), make(0.2, 0.2), make(0.3, 0.5), make(0.4, 0.4)};
  GroundTruth gt;
  gt.min_value = 0.15;
  gt.resolution = 1440;
  DeceptivenessResult dec;
  dec.ratio = 0.3;
  const auto s = success_summary(records, gt, dec);
  REQUIRE(s.cells.size() == 1);
  const auto& cell = s.cells[0];
  CHECK(cell.runs == 4);
  CHECK(cell.best_loss.median == doctest::Approx(0.25));
  CHECK(cell.best_loss.min == 0.1);
  CHECK(cell.undercuts == 1);
  CHECK(cell.reached == 1);
  CHECK(s.ground_truth_min == 0.15);
  CHECK(s.ground_truth_resolution == 1440);
  CHECK(s.deceptiveness_ratio == 0.3);

  const std::vector<RunRecord> one{make(0.7, 0.9)};
  const auto single = success_summary(one, gt, dec).cells[0].best_loss;
  CHECK(single.min == 0.7);
  CHECK(single.q25 == 0.7);
  CHECK(single.median == 0.7);
  CHECK(single.q75 == 0.7);
  CHECK(single.max == 0.7);
  CHECK_THROWS(success_summary(std::vector<RunRecord>{}, gt, dec));

  const auto j = to_json(s);
  CHECK(j.at("cells").at(0).at("optimizer") == "adam");
  CHECK(j.at("cells").at(0).at("best_loss").at("median").get<double>() == doctest::Approx(0.25));
}
