#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "qland/circuit.hpp"
#include "qland/deceptiveness.hpp"
#include "qland/gradient.hpp"
#include "qland/landscape.hpp"
#include "qland/stats.hpp"

namespace qland {

enum class OptimizerKind { SGD, Adam };

std::string to_string(OptimizerKind kind);
/// Accepts "sgd" / "adam" (case-insensitive).
OptimizerKind parse_optimizer_kind(const std::string& name);

/// Learning rates of the reproduction protocol.
inline constexpr double kProtocolLearningRates[] = {0.0001, 0.001, 0.01, 0.1, 1.0};

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::Adam;
  double learning_rate = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  /// Throws std::invalid_argument on out-of-range settings.
  void validate() const;
  bool operator==(const OptimizerConfig&) const = default;
};

/// theta - lr * g
ParameterPoint sgd_step(std::span<const double> theta, std::span<const double> gradient,
                        const OptimizerConfig& config);

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t t = 0;

  static AdamState zeros(std::size_t n) { return {std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), 0}; }
  bool operator==(const AdamState&) const = default;
};

struct AdamUpdate {
  ParameterPoint theta;
  AdamState state;
};

/// Bias-corrected Adam; t is incremented before the correction terms.
AdamUpdate adam_step(std::span<const double> theta, std::span<const double> gradient, const AdamState& state,
                     const OptimizerConfig& config);

/// Reduces an angle into [0, 4pi).
double wrap_angle(double angle);

struct RunRecord {
  std::size_t start_index = 0;
  ParameterPoint start;
  std::vector<ParameterPoint> trajectory;  // unwrapped, trajectory[0] == start
  std::vector<double> losses;              // losses[t] is the loss at trajectory[t]
  double best_loss = 0.0;
  std::size_t best_iter = 0;
  double last_loss = 0.0;
  OptimizerConfig config;
  int repetitions = 0;
  std::uint64_t seed = 0;
  bool aborted = false;  // a parameter became non-finite; the trajectory stops there
};

/// Iterates exact parameter-shift gradient steps from `start`. Records the loss
/// at the start and after every step; parameters are never wrapped.
RunRecord run_optimization(const CircuitSpec& circuit, std::span<const double> start,
                           const OptimizerConfig& config, std::size_t iterations);

inline constexpr const char* kStartGeneratorId = "mt19937_64/u53";

/// n_starts points drawn uniformly from [0, domain_max)^n_params. Each draw
/// takes the top 53 bits of one mt19937_64 output.
std::vector<ParameterPoint> draw_starts(std::size_t n_starts, std::size_t n_params, std::uint64_t seed,
                                        double domain_max = kFourPi);

/// Runs every config from the same start set. Output is ordered by config, then
/// start index, independent of `workers`.
std::vector<RunRecord> multi_start_experiment(const CircuitSpec& circuit, std::size_t n_starts,
                                              std::span<const OptimizerConfig> configs, std::size_t iterations,
                                              std::uint64_t seed, unsigned workers = 1,
                                              double start_domain_max = kFourPi);

/// Absolute slack below the grid minimum before a run counts as undercutting it.
inline constexpr double kUndercutSlack = 1e-9;
/// A run "reaches" the ground truth when best_loss <= min + this.
inline constexpr double kReachTolerance = 1e-2;

struct SummaryCell {
  int repetitions = 0;
  OptimizerKind kind = OptimizerKind::Adam;
  double learning_rate = 0.0;
  std::size_t runs = 0;
  Distribution best_loss;
  Distribution last_loss;
  std::size_t undercuts = 0;  // best_loss < ground truth - kUndercutSlack
  std::size_t reached = 0;    // best_loss <= ground truth + kReachTolerance
  std::size_t aborted = 0;
};

struct ExperimentSummary {
  std::vector<SummaryCell> cells;  // sorted by (repetitions, optimizer, learning rate)
  double ground_truth_min = 0.0;
  std::size_t ground_truth_resolution = 0;
  double deceptiveness_ratio = 0.0;
};

ExperimentSummary success_summary(std::span<const RunRecord> records, const GroundTruth& ground_truth,
                                  const DeceptivenessResult& deceptiveness);

nlohmann::json to_json(const Distribution& d);
nlohmann::json to_json(const SummaryCell& cell);
nlohmann::json to_json(const ExperimentSummary& summary);

/// One row per iteration:
/// run_id,optimizer,lr,repetitions,iter,theta1,theta2,loss,theta1_wrapped,theta2_wrapped
std::string records_to_csv(std::span<const RunRecord> records);
void write_records_csv(std::span<const RunRecord> records, const std::filesystem::path& path);

}  // namespace qland
