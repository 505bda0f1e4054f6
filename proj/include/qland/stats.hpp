#pragma once

#include <span>
#include <vector>

namespace qland {

/// Empirical quantile of an ascending sample, interpolating linearly between
/// order statistics at position level * (n - 1).
double quantile_sorted(std::span<const double> sorted, double level);

/// Min, quartiles, mean and max of a sample.
struct Distribution {
  std::size_t count = 0;
  double min = 0.0;
  double q25 = 0.0;
  double median = 0.0;
  double q75 = 0.0;
  double mean = 0.0;
  double max = 0.0;
};

Distribution summarize(std::vector<double> sample);

}  // namespace qland
