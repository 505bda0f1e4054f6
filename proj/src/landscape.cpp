#include "qland/landscape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "json.hpp"

#include "qland/gradient.hpp"
#include "qland/io.hpp"
#include "qland/parallel.hpp"
#include "qland/stats.hpp"

namespace qland {

namespace {

constexpr const char* kGridMagic = "QLGRID01";
constexpr int kGridFormatVersion = 1;

void check_resolution(std::size_t resolution) {
  if (resolution < 2) throw std::invalid_argument("grid resolution must be at least 2");
}

void check_two_params(const CircuitSpec& circuit) {
  if (circuit.n_params() != LandscapeGrid::kParams) {
    throw std::invalid_argument("landscape grids need a circuit with exactly 2 parameters");
  }
}

}  // namespace

LandscapeGrid::LandscapeGrid(std::size_t resolution, int n_qubits, int repetitions)
    : resolution_(resolution),
      n_qubits_(n_qubits),
      repetitions_(repetitions),
      values_(resolution * resolution, 0.0),
      gradients_(resolution * resolution * kParams, 0.0) {
  check_resolution(resolution);
}

LandscapeGrid::LandscapeGrid(std::size_t resolution, int n_qubits, int repetitions, std::vector<double> values,
                             std::vector<double> gradients)
    : resolution_(resolution),
      n_qubits_(n_qubits),
      repetitions_(repetitions),
      values_(std::move(values)),
      gradients_(std::move(gradients)) {
  check_resolution(resolution);
  if (values_.size() != cells() || gradients_.size() != cells() * kParams) {
    throw std::invalid_argument("grid arrays do not match resolution");
  }
}

LandscapeGrid sample_grid(const CircuitSpec& circuit, std::size_t resolution, unsigned workers) {
  check_resolution(resolution);
  check_two_params(circuit);
  LandscapeGrid grid(resolution, circuit.n_qubits(), circuit.repetitions());
  parallel_for(grid.cells(), workers, [&](std::size_t cell) {
    const std::size_t i = cell / resolution;
    const std::size_t j = cell % resolution;
    const double theta[2] = {grid_angle(i, resolution), grid_angle(j, resolution)};
    grid.value(i, j) = evaluate(circuit, theta);
    const auto g = parameter_shift_gradient(circuit, theta);
    grid.gradient(i, j, 0) = g[0];
    grid.gradient(i, j, 1) = g[1];
  });
  return grid;
}

std::vector<double> sample_values(const CircuitSpec& circuit, std::size_t resolution, unsigned workers) {
  check_resolution(resolution);
  check_two_params(circuit);
  std::vector<double> values(resolution * resolution);
  parallel_for(values.size(), workers, [&](std::size_t cell) {
    const double theta[2] = {grid_angle(cell / resolution, resolution), grid_angle(cell % resolution, resolution)};
    values[cell] = evaluate(circuit, theta);
  });
  return values;
}

GradientStats gradient_magnitude_stats(const LandscapeGrid& grid, std::span<const double> levels) {
  for (double level : levels) {
    if (!(level >= 0.0 && level <= 1.0)) throw std::invalid_argument("quantile level outside [0, 1]");
  }
  std::vector<double> norms(grid.cells());
  for (std::size_t c = 0; c < norms.size(); ++c) {
    norms[c] = std::hypot(grid.gradients()[2 * c], grid.gradients()[2 * c + 1]);
  }
  std::sort(norms.begin(), norms.end());

  GradientStats stats;
  stats.resolution = grid.resolution();
  for (double level : levels) stats.quantiles.emplace_back(level, quantile_sorted(norms, level));
  double sum = 0.0;
  for (double n : norms) sum += n;
  stats.mean = sum / static_cast<double>(norms.size());
  stats.max = norms.back();
  return stats;
}

GroundTruth global_minimum(std::span<const double> values, std::size_t resolution) {
  if (values.empty() || values.size() != resolution * resolution) {
    throw std::invalid_argument("value array does not match resolution");
  }
  GroundTruth gt;
  gt.resolution = resolution;
  gt.min_value = *std::min_element(values.begin(), values.end());
  for (std::size_t c = 0; c < values.size(); ++c) {
    if (values[c] == gt.min_value) gt.argmin_cells.push_back({c / resolution, c % resolution});
  }
  return gt;
}

GroundTruth global_minimum(const LandscapeGrid& grid) { return global_minimum(grid.values(), grid.resolution()); }

std::vector<std::uint8_t> encode_grid(const LandscapeGrid& grid) {
  const nlohmann::json header = {
      {"format_version", kGridFormatVersion},
      {"resolution", grid.resolution()},
      {"n_params", LandscapeGrid::kParams},
      {"n_qubits", grid.n_qubits()},
      {"repetitions", grid.repetitions()},
      {"domain_max", kFourPi},
  };
  auto out = binary::pack_envelope(kGridMagic, header.dump());
  out.reserve(out.size() + 8 * (grid.values().size() + grid.gradients().size()));
  for (double v : grid.values()) binary::put_f64_le(out, v);
  for (double g : grid.gradients()) binary::put_f64_le(out, g);
  return out;
}

LandscapeGrid decode_grid(std::span<const std::uint8_t> bytes) {
  const auto env = binary::unpack_envelope(bytes, kGridMagic);
  const std::size_t header_offset = env.payload_offset - env.header_json.size();

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(env.header_json);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("grid header is not valid JSON: ") + e.what(), header_offset + e.byte);
  }

  std::size_t resolution = 0;
  int n_qubits = 0;
  int repetitions = 0;
  try {
    if (header.at("format_version").get<int>() != kGridFormatVersion) {
      throw FormatError("unsupported grid format_version " + header.at("format_version").dump(), header_offset);
    }
    if (header.at("n_params").get<std::size_t>() != LandscapeGrid::kParams) {
      throw FormatError("grid n_params must be 2", header_offset);
    }
    if (header.at("domain_max").get<double>() != kFourPi) {
      throw FormatError("grid domain_max must be 4pi", header_offset);
    }
    resolution = header.at("resolution").get<std::size_t>();
    n_qubits = header.at("n_qubits").get<int>();
    repetitions = header.at("repetitions").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("grid header: ") + e.what(), header_offset);
  }
  if (resolution < 2) throw FormatError("grid resolution must be at least 2", header_offset);

  const std::size_t cells = resolution * resolution;
  const std::size_t expected = 8 * cells * (1 + LandscapeGrid::kParams);
  if (env.payload.size() != expected) {
    throw FormatError("payload length mismatch: resolution " + std::to_string(resolution) + " needs " +
                          std::to_string(expected) + " bytes, found " + std::to_string(env.payload.size()),
                      env.payload_offset);
  }

  std::vector<double> values(cells);
  std::vector<double> gradients(cells * LandscapeGrid::kParams);
  for (std::size_t c = 0; c < cells; ++c) values[c] = binary::get_f64_le(env.payload, 8 * c);
  for (std::size_t c = 0; c < gradients.size(); ++c) gradients[c] = binary::get_f64_le(env.payload, 8 * (cells + c));
  return LandscapeGrid(resolution, n_qubits, repetitions, std::move(values), std::move(gradients));
}

void write_grid(const LandscapeGrid& grid, const std::filesystem::path& path) {
  write_file_atomic(path, encode_grid(grid));
}

LandscapeGrid read_grid(const std::filesystem::path& path) { return decode_grid(read_file(path)); }

}  // namespace qland
