// qland: command-line front end for landscape sampling, deceptiveness masks,
// optimizer benchmarks and full sweeps.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage or config error.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "qland/circuit.hpp"
#include "qland/deceptiveness.hpp"
#include "qland/io.hpp"
#include "qland/landscape.hpp"
#include "qland/optimizers.hpp"
#include "qland/parallel.hpp"
#include "qland/sweep.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct GridArgs {
  int qubits = 2;
  int reps = 1;
  std::size_t resolution = 360;
  std::string out;
  unsigned workers = qland::default_worker_count();
};

int cmd_grid(const GridArgs& a) {
  const auto t0 = Clock::now();
  const auto circuit = qland::build_default_circuit(a.qubits, a.reps);
  const auto grid = qland::sample_grid(circuit, a.resolution, a.workers);
  qland::write_grid(grid, a.out);
  const auto stats = qland::gradient_magnitude_stats(grid, std::vector<double>{});
  std::cout << "wrote " << a.out << " (qubits=" << a.qubits << " reps=" << a.reps << " resolution=" << a.resolution
            << ")\n"
            << "min_value " << qland::format_double(qland::global_minimum(grid).min_value) << "\n"
            << "max_gradient_magnitude " << qland::format_double(stats.max) << "\n"
            << "elapsed_s " << std::fixed << std::setprecision(3) << seconds_since(t0) << "\n";
  return kExitOk;
}

struct DeceptiveArgs {
  std::string grid;
  double tol = qland::kDefaultTolerance;
  double grad_tol = qland::kDefaultGradientTolerance;
  std::string out;
};

int cmd_deceptive(const DeceptiveArgs& a) {
  const auto t0 = Clock::now();
  const auto bytes = qland::read_file(a.grid);
  const auto grid = qland::decode_grid(bytes);
  auto mask = qland::deceptiveness_mask(grid.values(), grid.gradients(), grid.resolution(), a.tol, a.grad_tol);
  mask.source_grid_digest = qland::sha256_hex(bytes);
  qland::write_mask(mask, a.out);
  std::cout << "wrote " << a.out << "\n"
            << "ratio " << qland::format_double(mask.ratio) << "\n"
            << "non_deceptive " << qland::format_double(qland::non_deceptive_share(mask)) << "\n"
            << "iterations_to_fixpoint " << mask.iterations_to_fixpoint << "\n"
            << "elapsed_s " << std::fixed << std::setprecision(3) << seconds_since(t0) << "\n";
  return kExitOk;
}

struct OptimizeArgs {
  int qubits = 2;
  int reps = 1;
  std::string optimizer;
  double lr = 0.01;
  std::size_t starts = 200;
  std::size_t iters = 500;
  std::uint64_t seed = 0;
  double start_max = qland::kFourPi;
  std::string out;
  unsigned workers = qland::default_worker_count();
};

int cmd_optimize(const OptimizeArgs& a) {
  const auto t0 = Clock::now();
  const auto circuit = qland::build_default_circuit(a.qubits, a.reps);
  qland::OptimizerConfig config;
  config.kind = qland::parse_optimizer_kind(a.optimizer);
  config.learning_rate = a.lr;
  const std::vector<qland::OptimizerConfig> configs{config};
  const auto records = qland::multi_start_experiment(circuit, a.starts, configs, a.iters, a.seed, a.workers, a.start_max);

  const std::filesystem::path csv_path(a.out);
  const std::string csv = qland::records_to_csv(records);
  qland::write_file_atomic(csv_path, csv);
  std::filesystem::path manifest_path = csv_path;
  manifest_path.replace_extension(".manifest.json");
  const auto manifest = qland::make_run_manifest(
      circuit, a.starts, a.iters, a.seed, configs, a.start_max, csv_path.filename().string(),
      qland::sha256_hex(std::span(reinterpret_cast<const std::uint8_t*>(csv.data()), csv.size())));
  qland::write_file_atomic(manifest_path, manifest.dump(2) + "\n");

  std::size_t aborted = 0;
  std::vector<double> best;
  for (const auto& r : records) {
    aborted += r.aborted ? 1 : 0;
    best.push_back(r.best_loss);
  }
  const auto dist = qland::summarize(best);
  std::cout << "wrote " << csv_path.string() << " and " << manifest_path.string() << "\n"
            << "runs " << records.size() << "\n"
            << "best_loss min " << qland::format_double(dist.min) << " median " << qland::format_double(dist.median)
            << " max " << qland::format_double(dist.max) << "\n"
            << "aborted_non_finite " << aborted << "\n"
            << "elapsed_s " << std::fixed << std::setprecision(3) << seconds_since(t0) << "\n";
  return aborted > 0 ? kExitRuntime : kExitOk;
}

struct SweepArgs {
  std::string config;
  std::string out;
  std::optional<unsigned> workers;
  std::optional<std::uint64_t> seed;
};

int cmd_sweep(const SweepArgs& a) {
  qland::ExperimentConfig config;
  try {
    config = qland::load_experiment_config(a.config);
    if (!a.out.empty()) config.output_dir = a.out;
    if (a.workers) config.workers = *a.workers;
    if (a.seed) config.seed = *a.seed;
    config.validate();
  } catch (const qland::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  }
  const auto t0 = Clock::now();
  const auto result = qland::run_sweep(config, &std::cerr);
  std::cout << "wrote " << (config.output_dir / "summary.json").string() << "\n"
            << "cells " << result.summary.at("cells").size() << "\n"
            << "failures " << result.failures << "\n"
            << "elapsed_s " << std::fixed << std::setprecision(3) << seconds_since(t0) << "\n";
  return result.failures > 0 ? kExitRuntime : kExitOk;
}

struct StatsArgs {
  std::string grid;
  std::vector<double> quantiles{0.25, 0.5, 0.75};
  bool json = false;
};

int cmd_stats(const StatsArgs& a) {
  const auto grid = qland::read_grid(a.grid);
  const auto stats = qland::gradient_magnitude_stats(grid, a.quantiles);
  if (a.json) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& [level, value] : stats.quantiles) rows.push_back({{"level", level}, {"magnitude", value}});
    const nlohmann::json doc = {{"resolution", stats.resolution},
                                {"n_qubits", grid.n_qubits()},
                                {"repetitions", grid.repetitions()},
                                {"quantiles", rows},
                                {"mean", stats.mean},
                                {"max", stats.max}};
    std::cout << doc.dump(2) << "\n";
    return kExitOk;
  }
  std::cout << "# resolution " << stats.resolution << "\n# level magnitude\n";
  for (const auto& [level, value] : stats.quantiles) {
    std::cout << qland::format_double(level) << " " << qland::format_double(value) << "\n";
  }
  std::cout << "# mean " << qland::format_double(stats.mean) << "\n# max " << qland::format_double(stats.max) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parameter-sharing circuit landscapes: sampling, deceptiveness and optimizer benchmarks"};
  app.require_subcommand(1);

  GridArgs grid_args;
  auto* grid = app.add_subcommand("grid", "Sample loss and gradients on the [0, 4pi)^2 grid");
  grid->add_option("--qubits", grid_args.qubits, "Qubit count")->check(CLI::Range(2, 16));
  grid->add_option("--reps", grid_args.reps, "Parameter-sharing block repetitions")->check(CLI::Range(1, 1000));
  grid->add_option("--resolution", grid_args.resolution, "Samples per parameter")
      ->check(CLI::Range(std::size_t{2}, std::size_t{1} << 16));
  grid->add_option("--out", grid_args.out, "Output grid file")->required();
  grid->add_option("--workers", grid_args.workers, "Worker threads")->check(CLI::PositiveNumber);

  DeceptiveArgs dec_args;
  auto* deceptive = app.add_subcommand("deceptive", "Label deceptive cells of a grid file");
  deceptive->add_option("--grid", dec_args.grid, "Input grid file")->required();
  deceptive->add_option("--tol", dec_args.tol, "Loss tolerance around the global minimum")
      ->check(CLI::PositiveNumber);
  deceptive->add_option("--grad-tol", dec_args.grad_tol, "Gradient components within this count as zero")
      ->check(CLI::NonNegativeNumber);
  deceptive->add_option("--out", dec_args.out, "Output mask file")->required();

  OptimizeArgs opt_args;
  auto* optimize = app.add_subcommand("optimize", "Multi-start optimizer benchmark");
  optimize->add_option("--qubits", opt_args.qubits, "Qubit count")->check(CLI::Range(2, 16));
  optimize->add_option("--reps", opt_args.reps, "Parameter-sharing block repetitions")->check(CLI::Range(1, 1000));
  optimize->add_option("--optimizer", opt_args.optimizer, "Optimizer")
      ->required()
      ->check(CLI::IsMember({"sgd", "adam"}, CLI::ignore_case));
  optimize->add_option("--lr", opt_args.lr, "Learning rate")->check(CLI::PositiveNumber);
  optimize->add_option("--starts", opt_args.starts, "Uniform random starts")->check(CLI::PositiveNumber);
  optimize->add_option("--iters", opt_args.iters, "Iterations per run")->check(CLI::PositiveNumber);
  optimize->add_option("--seed", opt_args.seed, "Start-point seed");
  optimize->add_option("--start-max", opt_args.start_max, "Draw starts from [0, start-max)^2")
      ->check(CLI::Range(1e-9, qland::kFourPi));
  optimize->add_option("--out", opt_args.out, "Records CSV; the manifest goes next to it")->required();
  optimize->add_option("--workers", opt_args.workers, "Worker threads")->check(CLI::PositiveNumber);

  SweepArgs sweep_args;
  auto* sweep = app.add_subcommand("sweep", "Run a full experiment sweep from a JSON config");
  sweep->add_option("--config", sweep_args.config, "Sweep config (JSON)")->required()->check(CLI::ExistingFile);
  sweep->add_option("--out", sweep_args.out, "Output directory (overrides output_dir)");
  sweep->add_option("--workers", sweep_args.workers, "Worker threads (overrides workers)")->check(CLI::PositiveNumber);
  sweep->add_option("--seed", sweep_args.seed, "Start-point seed (overrides seed)");

  StatsArgs stats_args;
  auto* stats = app.add_subcommand("stats", "Gradient-magnitude quantiles of a grid file");
  stats->add_option("--grid", stats_args.grid, "Input grid file")->required();
  stats->add_option("--quantiles", stats_args.quantiles, "Quantile levels in [0, 1]")->check(CLI::Range(0.0, 1.0));
  stats->add_flag("--json", stats_args.json, "Print JSON instead of a table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*grid) return cmd_grid(grid_args);
    if (*deceptive) return cmd_deceptive(dec_args);
    if (*optimize) return cmd_optimize(opt_args);
    if (*sweep) return cmd_sweep(sweep_args);
    if (*stats) return cmd_stats(stats_args);
  } catch (const qland::FormatError& e) {
    std::cerr << "format error: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
