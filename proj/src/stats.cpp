#include "qland/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qland {

double quantile_sorted(std::span<const double> sorted, double level) {
  if (sorted.empty()) throw std::invalid_argument("quantile of an empty sample");
  if (!(level >= 0.0 && level <= 1.0)) throw std::invalid_argument("quantile level must lie in [0, 1]");
  const double pos = level * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  if (frac == 0.0) return sorted[lo];
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

Distribution summarize(std::vector<double> sample) {
  if (sample.empty()) throw std::invalid_argument("summary of an empty sample");
  std::sort(sample.begin(), sample.end());
  Distribution d;
  d.count = sample.size();
  d.min = sample.front();
  d.max = sample.back();
  d.q25 = quantile_sorted(sample, 0.25);
  d.median = quantile_sorted(sample, 0.5);
  d.q75 = quantile_sorted(sample, 0.75);
  d.mean = std::accumulate(sample.begin(), sample.end(), 0.0) / static_cast<double>(sample.size());
  return d;
}

}  // namespace qland
