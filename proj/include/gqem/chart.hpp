#pragma once

// Coordinate charts and jet-evaluable fields.

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "jet.hpp"

namespace gqem {

/// Seeded coordinate jets of a point.
using Coords = std::span<const Jet>;

using ScalarField = std::function<Jet(Coords)>;
/// Contravariant components X^i.
using VectorField = std::function<std::vector<Jet>(Coords)>;
/// Row-major n x n components T_ij of a (0,2) field.
using BilinearField = std::function<std::vector<Jet>(Coords)>;
using MetricField = BilinearField;
/// Ambient coordinates of the embedded point.
using EmbeddingField = std::function<std::vector<Jet>(Coords)>;

enum class Family { euclidean, sphere, hyperbolic, custom };
enum class ChartKind { cartesian, stereographic, polar, poincare_ball, custom };

inline const char* to_string(Family f) {
  switch (f) {
    case Family::euclidean: return "euclidean";
    case Family::sphere: return "sphere";
    case Family::hyperbolic: return "hyperbolic";
    case Family::custom: return "custom";
  }
  return "?";
}

inline const char* to_string(ChartKind k) {
  switch (k) {
    case ChartKind::cartesian: return "cartesian";
    case ChartKind::stereographic: return "stereographic";
    case ChartKind::polar: return "polar";
    case ChartKind::poincare_ball: return "poincare_ball";
    case ChartKind::custom: return "custom";
  }
  return "?";
}

/// Box (optionally intersected with a centered ball) that random samples are drawn from.
struct SampleRegion {
  std::vector<double> lower;
  std::vector<double> upper;
  double max_radius = std::numeric_limits<double>::infinity();
};

struct Chart {
  int dim = 0;
  std::string label;
  MetricField metric;
  std::function<bool(std::span<const double>)> domain;
  std::optional<EmbeddingField> embedding;
  SampleRegion sampling;
  Family family = Family::custom;
  ChartKind kind = ChartKind::custom;
  double radius = 1.0;

  bool contains(std::span<const double> p) const {
    if (static_cast<int>(p.size()) != dim) return false;
    for (double x : p)
      if (!std::isfinite(x)) return false;
    return !domain || domain(p);
  }

  bool compact() const noexcept { return family == Family::sphere; }
};

inline ScalarField constant_field(double value) {
  return [value](Coords x) { return Jet(x[0].dim(), x[0].order(), value); };
}

inline ScalarField coordinate_field(int axis) {
  return [axis](Coords x) { return x[axis]; };
}

/// Metric g = factor(x) * delta.
inline MetricField conformally_flat_metric(ScalarField factor) {
  return [factor = std::move(factor)](Coords x) {
    const int n = static_cast<int>(x.size());
    const Jet w = factor(x);
    std::vector<Jet> g(static_cast<std::size_t>(n * n), Jet(n, w.order(), 0.0));
    for (int i = 0; i < n; ++i) g[i * n + i] = w;
    return g;
  };
}

/// Jets of |x|^2.
inline Jet squared_norm(Coords x) {
  Jet s = x[0] * x[0];
  for (std::size_t i = 1; i < x.size(); ++i) s += x[i] * x[i];
  return s;
}

}  // namespace gqem
