#pragma once

#include <cmath>
#include <vector>

#include "gqem/chart.hpp"
#include "gqem/models.hpp"
#include "gqem/sampling.hpp"

namespace test {

using gqem::Coords;
using gqem::Jet;

// A generic metric with no symmetry: g_ij = (2 + cos x_i) delta_ij + 0.1 sin(x_i x_j + x_i + x_j).
inline gqem::Chart lumpy_chart(int n) {
  gqem::Chart c;
  c.dim = n;
  c.label = "custom/lumpy";
  c.metric = [](Coords x) {
    const int d = static_cast<int>(x.size());
    std::vector<Jet> g;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        Jet v = sin(x[i] * x[j] + x[i] + x[j]) * 0.1;
        if (i == j) v += cos(x[i]) + 2.0;
        g.push_back(v);
      }
    return g;
  };
  c.sampling = {std::vector<double>(n, -1.0), std::vector<double>(n, 1.0)};
  return c;
}

// A smooth non-polynomial potential.
inline gqem::ScalarField wavy_potential() {
  return [](Coords x) {
    Jet s = sin(x[0] * 0.7 + 0.3) + x[0] * x[0] * 0.2;
    for (std::size_t i = 1; i < x.size(); ++i) s += cos(x[i] * 1.1 - x[0] * 0.5) * 0.4;
    return s;
  };
}

inline gqem::ModelSpec model(gqem::Family family, int n, double tau, double m, gqem::ChartKind chart) {
  gqem::ModelSpec s;
  s.family = family;
  s.dim = n;
  s.tau = tau;
  s.m = std::isinf(m) ? gqem::SyntheticDimension::infinite() : gqem::SyntheticDimension::finite(m);
  s.chart = chart;
  return s;
}

inline gqem::ModelSpec model(gqem::Family family, int n, double tau, double m) {
  return model(family, n, tau, m, gqem::default_chart(family));
}

inline gqem::ModelSpec sphere(int n, double tau, double m) { return model(gqem::Family::sphere, n, tau, m); }

// Three valid tau values per family and dimension.
inline std::vector<double> taus(gqem::Family family, int n) {
  switch (family) {
    case gqem::Family::sphere: return {1.0 / n + 0.35, 1.0, 3.0};
    case gqem::Family::euclidean: return {0.5, 1.0, 4.0};
    case gqem::Family::hyperbolic: return {-0.5, 1.0, 3.0};
    default: return {};
  }
}

inline const std::vector<gqem::Family>& families() {
  static const std::vector<gqem::Family> f{gqem::Family::sphere, gqem::Family::euclidean, gqem::Family::hyperbolic};
  return f;
}

}  // namespace test
