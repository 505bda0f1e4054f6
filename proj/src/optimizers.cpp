#include "qland/optimizers.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "qland/io.hpp"
#include "qland/parallel.hpp"

namespace qland {

std::string to_string(OptimizerKind kind) { return kind == OptimizerKind::SGD ? "sgd" : "adam"; }

OptimizerKind parse_optimizer_kind(const std::string& name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "sgd") return OptimizerKind::SGD;
  if (lower == "adam") return OptimizerKind::Adam;
  throw std::invalid_argument("unknown optimizer \"" + name + "\", expected one of {sgd, adam}");
}

void OptimizerConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw std::invalid_argument("learning rate must be positive and finite");
  }
  if (kind == OptimizerKind::Adam) {
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
      throw std::invalid_argument("Adam betas must lie in [0, 1)");
    }
    if (!(eps > 0.0)) throw std::invalid_argument("Adam eps must be positive");
  }
}

ParameterPoint sgd_step(std::span<const double> theta, std::span<const double> gradient,
                        const OptimizerConfig& config) {
  if (theta.size() != gradient.size()) throw std::invalid_argument("sgd_step: length mismatch");
  ParameterPoint out(theta.size());
  for (std::size_t k = 0; k < theta.size(); ++k) out[k] = theta[k] - config.learning_rate * gradient[k];
  return out;
}

AdamUpdate adam_step(std::span<const double> theta, std::span<const double> gradient, const AdamState& state,
                     const OptimizerConfig& config) {
  const std::size_t n = theta.size();
  if (gradient.size() != n || state.m.size() != n || state.v.size() != n) {
    throw std::invalid_argument("adam_step: length mismatch");
  }
  AdamUpdate out{ParameterPoint(n), state};
  out.state.t = state.t + 1;
  const double t = static_cast<double>(out.state.t);
  const double m_correction = 1.0 - std::pow(config.beta1, t);
  const double v_correction = 1.0 - std::pow(config.beta2, t);
  for (std::size_t k = 0; k < n; ++k) {
    const double g = gradient[k];
    out.state.m[k] = config.beta1 * state.m[k] + (1.0 - config.beta1) * g;
    out.state.v[k] = config.beta2 * state.v[k] + (1.0 - config.beta2) * g * g;
    const double m_hat = out.state.m[k] / m_correction;
    const double v_hat = out.state.v[k] / v_correction;
    out.theta[k] = theta[k] - config.learning_rate * m_hat / (std::sqrt(v_hat) + config.eps);
  }
  return out;
}

double wrap_angle(double angle) {
  double w = std::fmod(angle, kFourPi);
  if (w < 0.0) w += kFourPi;
  if (w >= kFourPi) w = 0.0;
  return w;
}

RunRecord run_optimization(const CircuitSpec& circuit, std::span<const double> start,
                           const OptimizerConfig& config, std::size_t iterations) {
  if (iterations < 1) throw std::invalid_argument("run_optimization: iterations must be at least 1");
  if (start.size() != circuit.n_params()) throw std::invalid_argument("run_optimization: start dimension mismatch");
  config.validate();

  RunRecord rec;
  rec.start.assign(start.begin(), start.end());
  rec.config = config;
  rec.repetitions = circuit.repetitions();
  rec.trajectory.reserve(iterations + 1);
  rec.losses.reserve(iterations + 1);

  ParameterPoint theta = rec.start;
  AdamState adam = AdamState::zeros(theta.size());
  for (std::size_t it = 0; it < iterations; ++it) {
    const auto lg = loss_and_gradient(circuit, theta);
    rec.trajectory.push_back(theta);
    rec.losses.push_back(lg.loss);
    if (config.kind == OptimizerKind::SGD) {
      theta = sgd_step(theta, lg.gradient, config);
    } else {
      auto update = adam_step(theta, lg.gradient, adam, config);
      theta = std::move(update.theta);
      adam = std::move(update.state);
    }
    if (!std::all_of(theta.begin(), theta.end(), [](double x) { return std::isfinite(x); })) {
      rec.aborted = true;
      break;
    }
  }
  if (!rec.aborted) {
    rec.trajectory.push_back(theta);
    rec.losses.push_back(evaluate(circuit, theta));
  }

  const auto best = std::min_element(rec.losses.begin(), rec.losses.end());
  rec.best_loss = *best;
  rec.best_iter = static_cast<std::size_t>(best - rec.losses.begin());
  rec.last_loss = rec.losses.back();
  return rec;
}

std::vector<ParameterPoint> draw_starts(std::size_t n_starts, std::size_t n_params, std::uint64_t seed,
                                        double domain_max) {
  if (!(domain_max > 0.0)) throw std::invalid_argument("start domain must be positive");
  std::mt19937_64 gen(seed);
  std::vector<ParameterPoint> starts(n_starts, ParameterPoint(n_params));
  for (auto& p : starts) {
    for (auto& x : p) {
      const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
      x = u * domain_max;
      if (x >= domain_max) x = std::nextafter(domain_max, 0.0);
    }
  }
  return starts;
}

std::vector<RunRecord> multi_start_experiment(const CircuitSpec& circuit, std::size_t n_starts,
                                              std::span<const OptimizerConfig> configs, std::size_t iterations,
                                              std::uint64_t seed, unsigned workers, double start_domain_max) {
  if (n_starts < 1) throw std::invalid_argument("multi_start_experiment: need at least one start");
  for (const auto& c : configs) c.validate();
  const auto starts = draw_starts(n_starts, circuit.n_params(), seed, start_domain_max);

  std::vector<RunRecord> records(configs.size() * n_starts);
  parallel_for(
      records.size(), workers,
      [&](std::size_t r) {
        const std::size_t c = r / n_starts;
        const std::size_t s = r % n_starts;
        records[r] = run_optimization(circuit, starts[s], configs[c], iterations);
        records[r].start_index = s;
        records[r].seed = seed;
      },
      1);
  return records;
}

ExperimentSummary success_summary(std::span<const RunRecord> records, const GroundTruth& ground_truth,
                                  const DeceptivenessResult& deceptiveness) {
  if (records.empty()) throw std::invalid_argument("success_summary: no records");

  using Key = std::tuple<int, int, double>;
  std::map<Key, std::vector<const RunRecord*>> groups;
  for (const auto& r : records) {
    groups[{r.repetitions, static_cast<int>(r.config.kind), r.config.learning_rate}].push_back(&r);
  }

  ExperimentSummary summary;
  summary.ground_truth_min = ground_truth.min_value;
  summary.ground_truth_resolution = ground_truth.resolution;
  summary.deceptiveness_ratio = deceptiveness.ratio;
  for (const auto& [key, group] : groups) {
    SummaryCell cell;
    cell.repetitions = std::get<0>(key);
    cell.kind = static_cast<OptimizerKind>(std::get<1>(key));
    cell.learning_rate = std::get<2>(key);
    cell.runs = group.size();
    std::vector<double> best, last;
    for (const RunRecord* r : group) {
      best.push_back(r->best_loss);
      last.push_back(r->last_loss);
      if (r->best_loss < ground_truth.min_value - kUndercutSlack) ++cell.undercuts;
      if (r->best_loss <= ground_truth.min_value + kReachTolerance) ++cell.reached;
      if (r->aborted) ++cell.aborted;
    }
    cell.best_loss = summarize(std::move(best));
    cell.last_loss = summarize(std::move(last));
    summary.cells.push_back(cell);
  }
  return summary;
}

nlohmann::json to_json(const Distribution& d) {
  return {{"count", d.count}, {"min", d.min},   {"q25", d.q25}, {"median", d.median},
          {"q75", d.q75},     {"mean", d.mean}, {"max", d.max}};
}

nlohmann::json to_json(const SummaryCell& cell) {
  return {{"repetitions", cell.repetitions},
          {"optimizer", to_string(cell.kind)},
          {"lr", cell.learning_rate},
          {"runs", cell.runs},
          {"best_loss", to_json(cell.best_loss)},
          {"last_loss", to_json(cell.last_loss)},
          {"undercuts", cell.undercuts},
          {"reached", cell.reached},
          {"aborted", cell.aborted}};
}

nlohmann::json to_json(const ExperimentSummary& summary) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : summary.cells) cells.push_back(to_json(c));
  return {{"ground_truth_min", summary.ground_truth_min},
          {"ground_truth_resolution", summary.ground_truth_resolution},
          {"deceptiveness_ratio", summary.deceptiveness_ratio},
          {"cells", std::move(cells)}};
}

std::string records_to_csv(std::span<const RunRecord> records) {
  std::string out = "run_id,optimizer,lr,repetitions,iter,theta1,theta2,loss,theta1_wrapped,theta2_wrapped\n";
  for (std::size_t id = 0; id < records.size(); ++id) {
    const auto& r = records[id];
    const std::string prefix = std::to_string(id) + "," + to_string(r.config.kind) + "," +
                               format_double(r.config.learning_rate) + "," + std::to_string(r.repetitions) + ",";
    for (std::size_t it = 0; it < r.trajectory.size(); ++it) {
      const auto& th = r.trajectory[it];
      out += prefix;
      out += std::to_string(it);
      out += ',';
      out += format_double(th.at(0));
      out += ',';
      out += format_double(th.size() > 1 ? th[1] : 0.0);
      out += ',';
      out += format_double(r.losses[it]);
      out += ',';
      out += format_double(wrap_angle(th.at(0)));
      out += ',';
      out += format_double(wrap_angle(th.size() > 1 ? th[1] : 0.0));
      out += '\n';
    }
  }
  return out;
}

void write_records_csv(std::span<const RunRecord> records, const std::filesystem::path& path) {
  write_file_atomic(path, records_to_csv(records));
}

}  // namespace qland
