#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "chart.hpp"
#include "errors.hpp"

namespace gqem {

/// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Points drawn uniformly from the chart's sampling box, rejected outside the
/// domain or the sampling ball. Deterministic in `seed`.
inline std::vector<std::vector<double>> sample_points(const Chart& chart, std::size_t count, std::uint64_t seed) {
  const auto& region = chart.sampling;
  if (static_cast<int>(region.lower.size()) != chart.dim || static_cast<int>(region.upper.size()) != chart.dim)
    throw ArgumentError("chart " + chart.label + " has no sampling region");
  std::mt19937_64 rng(seed);
  std::vector<std::vector<double>> pts;
  pts.reserve(count);
  std::size_t attempts = 0;
  while (pts.size() < count) {
    if (++attempts > 1000 * (count + 1)) throw ArgumentError("sampling region of chart " + chart.label + " misses its domain");
    std::vector<double> p(chart.dim);
    double r2 = 0.0;
    for (int i = 0; i < chart.dim; ++i) {
      p[i] = region.lower[i] + (region.upper[i] - region.lower[i]) * unit_uniform(rng);
      r2 += p[i] * p[i];
    }
    if (r2 >= region.max_radius * region.max_radius) continue;
    if (!chart.contains(p)) continue;
    pts.push_back(std::move(p));
  }
  return pts;
}

}  // namespace gqem
