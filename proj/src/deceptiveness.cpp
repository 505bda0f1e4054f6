#include "qland/deceptiveness.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"

#include "qland/io.hpp"

namespace qland {

namespace {

constexpr const char* kMaskMagic = "QLMASK01";
constexpr int kMaskFormatVersion = 1;

// Per-cell permission to step towards each neighbour.
struct StepPermissions {
  std::vector<std::uint8_t> to_prev_i;  // valid_l
  std::vector<std::uint8_t> to_next_i;  // valid_r
  std::vector<std::uint8_t> to_prev_j;  // valid_u
  std::vector<std::uint8_t> to_next_j;  // valid_d
};

StepPermissions step_permissions(std::span<const double> gradients, std::size_t cells, double tol_g) {
  StepPermissions p;
  p.to_prev_i.resize(cells);
  p.to_next_i.resize(cells);
  p.to_prev_j.resize(cells);
  p.to_next_j.resize(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    const double g0 = gradients[2 * c];
    const double g1 = gradients[2 * c + 1];
    p.to_prev_i[c] = g0 >= -tol_g;
    p.to_next_i[c] = g0 <= tol_g;
    p.to_prev_j[c] = g1 >= -tol_g;
    p.to_next_j[c] = g1 <= tol_g;
  }
  return p;
}

std::size_t propagate_sweeps(std::vector<std::int8_t>& mask, const StepPermissions& p, std::size_t r) {
  std::vector<std::uint8_t> labelled(mask.size());
  std::size_t sweeps = 0;
  bool changed = true;
  while (changed) {
    ++sweeps;
    changed = false;
    for (std::size_t c = 0; c < mask.size(); ++c) labelled[c] = mask[c] == 1;
    for (std::size_t i = 0; i < r; ++i) {
      const std::size_t prev_i = (i + r - 1) % r;
      const std::size_t next_i = (i + 1) % r;
      for (std::size_t j = 0; j < r; ++j) {
        const std::size_t c = i * r + j;
        if (mask[c] == 1) continue;
        const std::size_t prev_j = (j + r - 1) % r;
        const std::size_t next_j = (j + 1) % r;
        if ((p.to_prev_i[c] && labelled[prev_i * r + j]) || (p.to_next_i[c] && labelled[next_i * r + j]) ||
            (p.to_prev_j[c] && labelled[i * r + prev_j]) || (p.to_next_j[c] && labelled[i * r + next_j])) {
          mask[c] = 1;
          changed = true;
        }
      }
    }
  }
  return sweeps;
}

std::size_t propagate_frontier(std::vector<std::int8_t>& mask, const StepPermissions& p, std::size_t r) {
  std::vector<std::size_t> frontier;
  for (std::size_t c = 0; c < mask.size(); ++c) {
    if (mask[c] == 1) frontier.push_back(c);
  }
  std::vector<std::size_t> next;
  std::size_t sweeps = 0;
  for (;;) {
    ++sweeps;
    next.clear();
    // A neighbour n joins when n's own gradient allows the step from n onto c.
    auto try_label = [&](std::size_t n, const std::vector<std::uint8_t>& allowed) {
      if (mask[n] != 1 && allowed[n]) {
        mask[n] = 1;
        next.push_back(n);
      }
    };
    for (std::size_t c : frontier) {
      const std::size_t i = c / r;
      const std::size_t j = c % r;
      try_label(((i + 1) % r) * r + j, p.to_prev_i);
      try_label(((i + r - 1) % r) * r + j, p.to_next_i);
      try_label(i * r + (j + 1) % r, p.to_prev_j);
      try_label(i * r + (j + r - 1) % r, p.to_next_j);
    }
    if (next.empty()) break;
    std::sort(next.begin(), next.end());
    frontier.swap(next);
  }
  return sweeps;
}

}  // namespace

DeceptivenessResult deceptiveness_mask(std::span<const double> values, std::span<const double> gradients,
                                       std::size_t resolution, double tol, double tol_g, Propagation propagation) {
  const std::size_t cells = resolution * resolution;
  if (resolution == 0 || values.size() != cells || gradients.size() != 2 * cells) {
    throw std::invalid_argument("deceptiveness_mask: value/gradient shapes do not match resolution");
  }
  if (!(tol > 0.0)) throw std::invalid_argument("deceptiveness_mask: tol must be positive");
  if (!(tol_g >= 0.0)) throw std::invalid_argument("deceptiveness_mask: tol_g must be non-negative");
  if (!std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); }) ||
      !std::all_of(gradients.begin(), gradients.end(), [](double g) { return std::isfinite(g); })) {
    throw std::invalid_argument("deceptiveness_mask: non-finite input");
  }

  const double min_value = *std::min_element(values.begin(), values.end());
  std::vector<std::uint8_t> optimal(cells);
  DeceptivenessResult result;
  result.resolution = resolution;
  result.tol = tol;
  result.tol_g = tol_g;
  result.mask.assign(cells, -1);
  for (std::size_t c = 0; c < cells; ++c) {
    optimal[c] = (values[c] - min_value) < tol;
    if (optimal[c]) result.mask[c] = 1;
  }

  const auto permissions = step_permissions(gradients, cells, tol_g);
  result.iterations_to_fixpoint = propagation == Propagation::kSweep
                                      ? propagate_sweeps(result.mask, permissions, resolution)
                                      : propagate_frontier(result.mask, permissions, resolution);

  for (std::size_t c = 0; c < cells; ++c) {
    if (optimal[c]) result.mask[c] = 0;
  }
  result.ratio = deceptiveness_ratio(result);
  return result;
}

DeceptivenessResult deceptiveness_mask(const LandscapeGrid& grid, double tol, double tol_g, Propagation propagation) {
  auto result = deceptiveness_mask(grid.values(), grid.gradients(), grid.resolution(), tol, tol_g, propagation);
  result.source_grid_digest = grid_digest(grid);
  return result;
}

double deceptiveness_ratio(const DeceptivenessResult& result) {
  if (result.mask.empty()) return 0.0;
  const auto deceptive = std::count(result.mask.begin(), result.mask.end(), std::int8_t{-1});
  return static_cast<double>(deceptive) / static_cast<double>(result.mask.size());
}

double non_deceptive_share(const DeceptivenessResult& result) { return 1.0 - deceptiveness_ratio(result); }

std::vector<StabilityRow> resolution_stability_report(const CircuitSpec& circuit,
                                                      std::span<const std::size_t> resolutions,
                                                      std::span<const double> tols, double tol_g,
                                                      unsigned workers) {
  for (std::size_t r : resolutions) {
    if (r < 2) throw std::invalid_argument("resolution must be at least 2");
  }
  std::vector<StabilityRow> rows;
  for (std::size_t r : resolutions) {
    const auto grid = sample_grid(circuit, r, workers);
    for (double tol : tols) {
      const auto mask = deceptiveness_mask(grid.values(), grid.gradients(), r, tol, tol_g);
      rows.push_back({r, tol, mask.ratio, non_deceptive_share(mask), mask.iterations_to_fixpoint});
    }
  }
  return rows;
}

std::string grid_digest(const LandscapeGrid& grid) { return sha256_hex(encode_grid(grid)); }

std::vector<std::uint8_t> encode_mask(const DeceptivenessResult& result) {
  const nlohmann::json header = {
      {"format_version", kMaskFormatVersion},
      {"resolution", result.resolution},
      {"tol", result.tol},
      {"tol_g", result.tol_g},
      {"ratio", result.ratio},
      {"iterations_to_fixpoint", result.iterations_to_fixpoint},
      {"source_grid_digest", result.source_grid_digest},
  };
  auto out = binary::pack_envelope(kMaskMagic, header.dump());
  for (std::int8_t m : result.mask) out.push_back(static_cast<std::uint8_t>(m));
  return out;
}

DeceptivenessResult decode_mask(std::span<const std::uint8_t> bytes) {
  const auto env = binary::unpack_envelope(bytes, kMaskMagic);
  const std::size_t header_offset = env.payload_offset - env.header_json.size();
  DeceptivenessResult result;
  try {
    const auto header = nlohmann::json::parse(env.header_json);
    if (header.at("format_version").get<int>() != kMaskFormatVersion) {
      throw FormatError("unsupported mask format_version", header_offset);
    }
    result.resolution = header.at("resolution").get<std::size_t>();
    result.tol = header.at("tol").get<double>();
    result.tol_g = header.at("tol_g").get<double>();
    result.ratio = header.at("ratio").get<double>();
    result.iterations_to_fixpoint = header.at("iterations_to_fixpoint").get<std::size_t>();
    result.source_grid_digest = header.at("source_grid_digest").get<std::string>();
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("mask header is not valid JSON: ") + e.what(), header_offset + e.byte);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("mask header: ") + e.what(), header_offset);
  }

  const std::size_t cells = result.resolution * result.resolution;
  if (env.payload.size() != cells) {
    throw FormatError("payload length mismatch: resolution " + std::to_string(result.resolution) + " needs " +
                          std::to_string(cells) + " bytes, found " + std::to_string(env.payload.size()),
                      env.payload_offset);
  }
  result.mask.resize(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    const auto m = static_cast<std::int8_t>(env.payload[c]);
    if (m < -1 || m > 1) throw FormatError("mask entry outside {-1, 0, 1}", env.payload_offset + c);
    result.mask[c] = m;
  }
  return result;
}

void write_mask(const DeceptivenessResult& result, const std::filesystem::path& path) {
  write_file_atomic(path, encode_mask(result));
}

DeceptivenessResult read_mask(const std::filesystem::path& path) { return decode_mask(read_file(path)); }

}  // namespace qland
