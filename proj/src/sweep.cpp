#include "qland/sweep.hpp"

#include <chrono>
#include <ctime>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "qland/deceptiveness.hpp"
#include "qland/io.hpp"
#include "qland/landscape.hpp"
#include "qland/parallel.hpp"

namespace qland {

namespace {

using nlohmann::json;

template <typename T>
std::vector<T> read_list(const json& doc, const char* key, std::vector<T> fallback) {
  if (!doc.contains(key)) return fallback;
  const auto& v = doc.at(key);
  if (!v.is_array()) throw ConfigError(std::string("\"") + key + "\" must be a list");
  try {
    return v.get<std::vector<T>>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("\"") + key + "\": " + e.what());
  }
}

template <typename T>
T read_scalar(const json& doc, const char* key, T fallback) {
  if (!doc.contains(key)) return fallback;
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("\"") + key + "\": " + e.what());
  }
}

std::vector<OptimizerConfig> read_optimizers(const json& doc) {
  std::vector<OptimizerConfig> out;
  if (!doc.contains("optimizers")) return out;
  const auto default_rates =
      read_list<double>(doc, "learning_rates", std::vector<double>(std::begin(kProtocolLearningRates),
                                                                   std::end(kProtocolLearningRates)));
  const auto& list = doc.at("optimizers");
  if (!list.is_array()) throw ConfigError("\"optimizers\" must be a list");
  for (const auto& entry : list) {
    OptimizerConfig base;
    std::vector<double> rates = default_rates;
    try {
      if (entry.is_string()) {
        base.kind = parse_optimizer_kind(entry.get<std::string>());
      } else if (entry.is_object()) {
        base.kind = parse_optimizer_kind(entry.at("kind").get<std::string>());
        base.beta1 = read_scalar(entry, "beta1", base.beta1);
        base.beta2 = read_scalar(entry, "beta2", base.beta2);
        base.eps = read_scalar(entry, "eps", base.eps);
        rates = read_list<double>(entry, "learning_rates", rates);
      } else {
        throw ConfigError("optimizer entries must be a name or an object");
      }
    } catch (const json::exception& e) {
      throw ConfigError(std::string("\"optimizers\": ") + e.what());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    for (double lr : rates) {
      OptimizerConfig c = base;
      c.learning_rate = lr;
      out.push_back(c);
    }
  }
  return out;
}

json optimizer_entry(const OptimizerConfig& o) {
  json entry = {{"kind", to_string(o.kind)}, {"lr", o.learning_rate}};
  if (o.kind == OptimizerKind::Adam) {
    entry["beta1"] = o.beta1;
    entry["beta2"] = o.beta2;
    entry["eps"] = o.eps;
  }
  return entry;
}

std::string cell_stem(int qubits, int reps) { return "q" + std::to_string(qubits) + "_b" + std::to_string(reps); }

}  // namespace

void ExperimentConfig::validate() const {
  if (qubits.empty()) throw ConfigError("\"qubits\" must not be empty");
  for (int q : qubits) {
    if (q < 2 || q > 16) throw ConfigError("\"qubits\" entries must lie in [2, 16]");
  }
  if (repetitions.empty()) throw ConfigError("\"repetitions\" must not be empty");
  for (int b : repetitions) {
    if (b < 1) throw ConfigError("\"repetitions\" entries must be at least 1");
  }
  for (std::size_t r : resolutions) {
    if (r < 2) throw ConfigError("\"resolutions\" entries must be at least 2");
  }
  if (ground_truth_resolution < 2) throw ConfigError("\"ground_truth_resolution\" must be at least 2");
  for (double t : tolerances) {
    if (!(t > 0.0)) throw ConfigError("\"tolerances\" entries must be positive");
  }
  if (!(tol_g >= 0.0)) throw ConfigError("\"tol_g\" must be non-negative");
  for (const auto& o : optimizers) {
    try {
      o.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("\"optimizers\": ") + e.what());
    }
  }
  if (!optimizers.empty() && n_starts < 1) throw ConfigError("\"n_starts\" must be at least 1");
  if (!optimizers.empty() && iterations < 1) throw ConfigError("\"iterations\" must be at least 1");
  if (!(start_domain_max > 0.0 && start_domain_max <= kFourPi)) {
    throw ConfigError("\"start_domain_max\" must lie in (0, 4pi]");
  }
  if (workers < 1) throw ConfigError("\"workers\" must be at least 1");
}

ExperimentConfig parse_experiment_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig c;
  if (doc.contains("n_qubits")) {
    c.qubits = {read_scalar<int>(doc, "n_qubits", 2)};
  } else {
    c.qubits = read_list<int>(doc, "qubits", c.qubits);
  }
  c.repetitions = read_list<int>(doc, "repetitions", {});
  c.resolutions = read_list<std::size_t>(doc, "resolutions", c.resolutions);
  c.ground_truth_resolution = read_scalar(doc, "ground_truth_resolution", c.ground_truth_resolution);
  c.tolerances = read_list<double>(doc, "tolerances", c.tolerances);
  c.tol_g = read_scalar(doc, "tol_g", c.tol_g);
  c.optimizers = read_optimizers(doc);
  c.n_starts = read_scalar(doc, "n_starts", c.n_starts);
  c.iterations = read_scalar(doc, "iterations", c.iterations);
  c.seed = read_scalar(doc, "seed", c.seed);
  c.start_domain_max = read_scalar(doc, "start_domain_max", c.start_domain_max);
  c.output_dir = read_scalar<std::string>(doc, "output_dir", c.output_dir.string());
  c.workers = read_scalar(doc, "workers", default_worker_count());
  c.validate();
  return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  json doc;
  try {
    doc = json::parse(bytes.begin(), bytes.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_experiment_config(doc);
}

json to_json(const ExperimentConfig& c) {
  json optimizers = json::array();
  for (const auto& o : c.optimizers) optimizers.push_back(optimizer_entry(o));
  return {{"qubits", c.qubits},
          {"repetitions", c.repetitions},
          {"resolutions", c.resolutions},
          {"ground_truth_resolution", c.ground_truth_resolution},
          {"tolerances", c.tolerances},
          {"tol_g", c.tol_g},
          {"optimizers", optimizers},
          {"n_starts", c.n_starts},
          {"iterations", c.iterations},
          {"seed", c.seed},
          {"start_domain_max", c.start_domain_max}};
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

json make_run_manifest(const CircuitSpec& circuit, std::size_t n_starts, std::size_t iterations, std::uint64_t seed,
                       std::span<const OptimizerConfig> optimizers, double start_domain_max,
                       const std::string& records_file, const std::string& records_sha256) {
  json opts = json::array();
  for (const auto& o : optimizers) opts.push_back(optimizer_entry(o));
  return {{"seed", seed},
          {"n_starts", n_starts},
          {"iterations", iterations},
          {"generator", kStartGeneratorId},
          {"start_domain_max", start_domain_max},
          {"circuit",
           {{"n_qubits", circuit.n_qubits()}, {"repetitions", circuit.repetitions()}, {"n_params", circuit.n_params()}}},
          {"optimizers", opts},
          {"records_file", records_file},
          {"records_sha256", records_sha256},
          {"created_at", utc_timestamp()}};
}

SweepResult run_sweep(const ExperimentConfig& config, std::ostream* log) {
  config.validate();
  namespace fs = std::filesystem;
  const fs::path& out = config.output_dir;
  fs::create_directories(out / "grids");
  fs::create_directories(out / "masks");
  if (!config.optimizers.empty()) fs::create_directories(out / "records");

  json cells = json::array();
  json failures = json::array();

  for (int qubits : config.qubits) {
    for (int reps : config.repetitions) {
      const std::string stem = cell_stem(qubits, reps);
      try {
        if (log) *log << "[sweep] " << stem << "\n";
        const auto circuit = build_default_circuit(qubits, reps);
        json cell = {{"qubits", qubits}, {"repetitions", reps}};

        json landscapes = json::array();
        std::map<std::size_t, LandscapeGrid> grids;
        std::optional<double> headline_ratio;
        for (std::size_t r : config.resolutions) {
          auto grid = sample_grid(circuit, r, config.workers);
          const std::string grid_name = "grids/" + stem + "_r" + std::to_string(r) + ".qlgrid";
          const auto grid_bytes = encode_grid(grid);
          write_file_atomic(out / grid_name, grid_bytes);
          const std::string digest = sha256_hex(grid_bytes);
          const auto stats = gradient_magnitude_stats(grid, std::vector<double>{0.25, 0.5, 0.75});

          json masks = json::array();
          for (double tol : config.tolerances) {
            auto mask = deceptiveness_mask(grid.values(), grid.gradients(), r, tol, config.tol_g);
            mask.source_grid_digest = digest;
            const std::string mask_name =
                "masks/" + stem + "_r" + std::to_string(r) + "_tol" + format_double(tol) + ".qlmask";
            write_mask(mask, out / mask_name);
            if (!headline_ratio) headline_ratio = mask.ratio;
            masks.push_back({{"tol", tol},
                             {"tol_g", config.tol_g},
                             {"ratio", mask.ratio},
                             {"non_deceptive", non_deceptive_share(mask)},
                             {"iterations_to_fixpoint", mask.iterations_to_fixpoint},
                             {"mask_file", mask_name}});
          }
          landscapes.push_back({{"resolution", r},
                                {"grid_file", grid_name},
                                {"grid_sha256", digest},
                                {"min_value", global_minimum(grid).min_value},
                                {"gradient_magnitude",
                                 {{"q25", stats.quantiles[0].second},
                                  {"median", stats.quantiles[1].second},
                                  {"q75", stats.quantiles[2].second},
                                  {"mean", stats.mean},
                                  {"max", stats.max}}},
                                {"deceptiveness", masks}});
          grids.emplace(r, std::move(grid));
        }
        cell["landscapes"] = landscapes;

        const std::size_t gt_res = config.ground_truth_resolution;
        const GroundTruth truth = grids.count(gt_res)
                                      ? global_minimum(grids.at(gt_res))
                                      : global_minimum(sample_values(circuit, gt_res, config.workers), gt_res);
        json argmins = json::array();
        for (const auto& c : truth.argmin_cells) argmins.push_back({c.i, c.j});
        cell["ground_truth"] = {{"resolution", truth.resolution}, {"min_value", truth.min_value}, {"argmin_cells", argmins}};

        if (!config.optimizers.empty()) {
          const auto records = multi_start_experiment(circuit, config.n_starts, config.optimizers, config.iterations,
                                                      config.seed, config.workers, config.start_domain_max);
          const std::string csv_name = "records/" + stem + ".csv";
          const std::string csv = records_to_csv(records);
          write_file_atomic(out / csv_name, csv);
          const std::string manifest_name = "records/" + stem + ".manifest.json";
          const auto manifest = make_run_manifest(
              circuit, config.n_starts, config.iterations, config.seed, config.optimizers, config.start_domain_max,
              csv_name, sha256_hex(std::span(reinterpret_cast<const std::uint8_t*>(csv.data()), csv.size())));
          write_file_atomic(out / manifest_name, manifest.dump(2) + "\n");

          DeceptivenessResult headline;
          headline.ratio = headline_ratio.value_or(0.0);
          const auto summary = success_summary(records, truth, headline);
          json opt = to_json(summary);
          opt["records_file"] = csv_name;
          opt["manifest_file"] = manifest_name;
          opt["n_starts"] = config.n_starts;
          opt["iterations"] = config.iterations;
          if (!config.resolutions.empty() && !config.tolerances.empty()) {
            opt["deceptiveness_source"] = {{"resolution", config.resolutions.front()},
                                           {"tol", config.tolerances.front()}};
          }
          cell["optimizers"] = opt;
        }
        cells.push_back(cell);
      } catch (const std::exception& e) {
        if (log) *log << "[sweep] " << stem << " failed: " << e.what() << "\n";
        failures.push_back({{"qubits", qubits}, {"repetitions", reps}, {"error", e.what()}});
      }
    }
  }

  SweepResult result;
  result.failures = failures.size();
  result.summary = {{"format_version", 1}, {"config", to_json(config)}, {"cells", cells}, {"failures", failures}};
  write_file_atomic(out / "summary.json", result.summary.dump(2) + "\n");
  return result;
}

}  // namespace qland
