#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "qland/circuit.hpp"
#include "qland/landscape.hpp"

namespace qland {

/// Mask labels.
enum class CellLabel : std::int8_t {
  kDeceptive = -1,
  kOptimal = 0,      // within tol of the global minimum
  kNonDeceptive = 1  // a descent chain reaches an optimal cell
};

struct DeceptivenessResult {
  std::size_t resolution = 0;
  std::vector<std::int8_t> mask;  // row-major R x R, values in {-1, 0, 1}
  double tol = 0.0;
  double tol_g = 0.0;
  double ratio = 0.0;  // count(-1) / R^2
  std::size_t iterations_to_fixpoint = 0;
  std::string source_grid_digest;  // SHA-256 of the encoded source grid, empty if unknown

  std::int8_t at(std::size_t i, std::size_t j) const { return mask[i * resolution + j]; }
};

inline constexpr double kDefaultTolerance = 1e-2;
inline constexpr double kDefaultGradientTolerance = 1e-7;

/// How the non-deceptive label is spread. Both produce the same mask and the
/// same sweep count.
enum class Propagation {
  kSweep,     // whole-grid synchronous sweeps until nothing changes
  kFrontier,  // only cells next to the previous sweep's new labels are examined
};

/// Labels every cell of the periodic R x R grid.
///
/// Cells with V - min(V) < tol are optimal. Starting from them, a cell becomes
/// non-deceptive when one of its four torus neighbours is already labelled and
/// the cell's own gradient permits stepping there:
///
///   towards i-1 needs G0 >= -tol_g     towards i+1 needs G0 <= +tol_g
///   towards j-1 needs G1 >= -tol_g     towards j+1 needs G1 <= +tol_g
///
/// Each sweep reads the labels as they stood at the start of the sweep. After
/// the fixpoint, optimal cells are relabelled 0; the rest stay -1 (deceptive).
DeceptivenessResult deceptiveness_mask(std::span<const double> values, std::span<const double> gradients,
                                       std::size_t resolution, double tol = kDefaultTolerance,
                                       double tol_g = kDefaultGradientTolerance,
                                       Propagation propagation = Propagation::kFrontier);

/// Same, fills source_grid_digest from the grid.
DeceptivenessResult deceptiveness_mask(const LandscapeGrid& grid, double tol = kDefaultTolerance,
                                       double tol_g = kDefaultGradientTolerance,
                                       Propagation propagation = Propagation::kFrontier);

/// count(M == -1) / R^2
double deceptiveness_ratio(const DeceptivenessResult& result);

/// 1 - ratio: share of cells that are optimal or reach an optimum.
double non_deceptive_share(const DeceptivenessResult& result);

struct StabilityRow {
  std::size_t resolution = 0;
  double tol = 0.0;
  double ratio = 0.0;
  double non_deceptive = 0.0;
  std::size_t iterations_to_fixpoint = 0;
};

/// Samples one grid per resolution and runs the mask for every tolerance on it.
/// Rows are ordered by resolution, then tolerance, in request order.
std::vector<StabilityRow> resolution_stability_report(const CircuitSpec& circuit,
                                                      std::span<const std::size_t> resolutions,
                                                      std::span<const double> tols,
                                                      double tol_g = kDefaultGradientTolerance,
                                                      unsigned workers = 1);

/// SHA-256 of encode_grid(grid).
std::string grid_digest(const LandscapeGrid& grid);

/// Mask file: "QLMASK01", u32 LE header length, JSON header, R x R int8 payload.
std::vector<std::uint8_t> encode_mask(const DeceptivenessResult& result);
DeceptivenessResult decode_mask(std::span<const std::uint8_t> bytes);

void write_mask(const DeceptivenessResult& result, const std::filesystem::path& path);
DeceptivenessResult read_mask(const std::filesystem::path& path);

}  // namespace qland
