#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "qland/circuit.hpp"

namespace qland {

/// Angle of grid index i at resolution R: 4pi * i / R. The endpoint 4pi is
/// excluded since it coincides with 0 on the torus.
inline double grid_angle(std::size_t i, std::size_t resolution) {
  return kFourPi * static_cast<double>(i) / static_cast<double>(resolution);
}

/// Loss values and gradients sampled on the R x R torus [0, 4pi)^2. Cell (i, j)
/// sits at theta = (grid_angle(i), grid_angle(j)); i runs along theta_1.
class LandscapeGrid {
 public:
  static constexpr std::size_t kParams = 2;

  LandscapeGrid(std::size_t resolution, int n_qubits, int repetitions);
  LandscapeGrid(std::size_t resolution, int n_qubits, int repetitions, std::vector<double> values,
                std::vector<double> gradients);

  std::size_t resolution() const { return resolution_; }
  std::size_t cells() const { return resolution_ * resolution_; }
  int n_qubits() const { return n_qubits_; }
  int repetitions() const { return repetitions_; }

  double value(std::size_t i, std::size_t j) const { return values_[i * resolution_ + j]; }
  double gradient(std::size_t i, std::size_t j, std::size_t k) const {
    return gradients_[(i * resolution_ + j) * kParams + k];
  }
  double& value(std::size_t i, std::size_t j) { return values_[i * resolution_ + j]; }
  double& gradient(std::size_t i, std::size_t j, std::size_t k) {
    return gradients_[(i * resolution_ + j) * kParams + k];
  }

  /// Row-major R x R.
  std::span<const double> values() const { return values_; }
  /// Row-major R x R x 2, parameter index innermost.
  std::span<const double> gradients() const { return gradients_; }

  bool operator==(const LandscapeGrid&) const = default;

 private:
  std::size_t resolution_;
  int n_qubits_;
  int repetitions_;
  std::vector<double> values_;
  std::vector<double> gradients_;
};

/// Evaluates loss and parameter-shift gradient at every cell. Deterministic
/// regardless of `workers`.
LandscapeGrid sample_grid(const CircuitSpec& circuit, std::size_t resolution, unsigned workers = 1);

/// Loss values only, row-major R x R. Used where gradients are not needed
/// (ground-truth minima at high resolution).
std::vector<double> sample_values(const CircuitSpec& circuit, std::size_t resolution, unsigned workers = 1);

struct GradientStats {
  std::size_t resolution = 0;
  std::vector<std::pair<double, double>> quantiles;  // (level, magnitude), in request order
  double mean = 0.0;
  double max = 0.0;
};

/// Euclidean gradient norms over all cells, summarized by linearly
/// interpolated quantiles.
GradientStats gradient_magnitude_stats(const LandscapeGrid& grid, std::span<const double> levels);

struct Cell {
  std::size_t i = 0;
  std::size_t j = 0;
  bool operator==(const Cell&) const = default;
};

struct GroundTruth {
  double min_value = 0.0;
  std::vector<Cell> argmin_cells;  // every cell attaining min_value, row-major order
  std::size_t resolution = 0;
};

GroundTruth global_minimum(const LandscapeGrid& grid);
GroundTruth global_minimum(std::span<const double> values, std::size_t resolution);

/// Grid file: "QLGRID01", u32 LE header length, JSON header, then V and G as
/// little-endian float64, row-major.
std::vector<std::uint8_t> encode_grid(const LandscapeGrid& grid);
LandscapeGrid decode_grid(std::span<const std::uint8_t> bytes);

void write_grid(const LandscapeGrid& grid, const std::filesystem::path& path);
LandscapeGrid read_grid(const std::filesystem::path& path);

}  // namespace qland
