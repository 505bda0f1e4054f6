#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "qland/optimizers.hpp"

namespace qland {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Everything one sweep needs. See docs/formats.md for the JSON schema.
struct ExperimentConfig {
  std::vector<int> qubits{2};
  std::vector<int> repetitions;
  std::vector<std::size_t> resolutions{360};
  std::size_t ground_truth_resolution = 1440;
  std::vector<double> tolerances{kDefaultTolerance};
  double tol_g = kDefaultGradientTolerance;
  std::vector<OptimizerConfig> optimizers;
  std::size_t n_starts = 200;
  std::size_t iterations = 500;
  std::uint64_t seed = 0;
  double start_domain_max = kFourPi;
  std::filesystem::path output_dir = "sweep_out";
  unsigned workers = 1;

  /// Throws ConfigError naming the first offending field.
  void validate() const;
};

ExperimentConfig parse_experiment_config(const nlohmann::json& doc);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentConfig& config);

/// Writes the JSON manifest that accompanies a records CSV. `created_at` is the
/// only field that differs between reruns.
nlohmann::json make_run_manifest(const CircuitSpec& circuit, std::size_t n_starts, std::size_t iterations,
                                 std::uint64_t seed, std::span<const OptimizerConfig> optimizers,
                                 double start_domain_max, const std::string& records_file,
                                 const std::string& records_sha256);

/// ISO-8601 UTC wall-clock time, for manifests only.
std::string utc_timestamp();

struct SweepResult {
  nlohmann::json summary;
  std::size_t failures = 0;
};

/// Runs the cross-product qubits x repetitions x resolutions x tolerances x
/// optimizers. One grid per (qubits, repetitions, resolution) is sampled and
/// shared by all tolerances. A failing (qubits, repetitions) cell is listed in
/// summary["failures"] and the sweep moves on. Writes grids/, masks/, records/
/// and summary.json below config.output_dir.
SweepResult run_sweep(const ExperimentConfig& config, std::ostream* log = nullptr);

}  // namespace qland
