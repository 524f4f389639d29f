#pragma once

// Model geometries (Euclidean space, round sphere, hyperbolic space) and the
// explicit quasi-Einstein potentials built on them.
//
//   sphere     u = tau - h_v / n,  tau > 1/n,  f = -m ln u
//   euclidean  u = tau + |x|^2,    tau > 0
//   hyperbolic u = tau + h_v,      tau > -1,   h_v = cosh(dist(., v)) >= 1
//
// For m = infinity the potential is f = -(u - tau) and lambda is trace-solved.

#include <cmath>
#include <numbers>
#include <string>

#include "chart.hpp"
#include "errors.hpp"
#include "qem.hpp"

namespace gqem {

struct ModelSpec {
  Family family = Family::sphere;
  int dim = 2;
  double radius = 1.0;
  ChartKind chart = ChartKind::polar;
  double tau = 1.0;
  SyntheticDimension m = SyntheticDimension::finite(2.0);
  int v_axis = 0;

  std::string describe() const {
    return std::string(to_string(family)) + "/" + to_string(chart) + " n=" + std::to_string(dim) +
           " tau=" + format_real(tau) + " m=" + m.str();
  }
};

inline Family parse_family(const std::string& s) {
  if (s == "euclidean") return Family::euclidean;
  if (s == "sphere") return Family::sphere;
  if (s == "hyperbolic") return Family::hyperbolic;
  throw ArgumentError("unknown family '" + s + "' (expected euclidean, sphere or hyperbolic)");
}

inline ChartKind parse_chart_kind(const std::string& s) {
  if (s == "cartesian") return ChartKind::cartesian;
  if (s == "stereographic") return ChartKind::stereographic;
  if (s == "polar") return ChartKind::polar;
  if (s == "poincare_ball") return ChartKind::poincare_ball;
  throw ArgumentError("unknown chart '" + s + "' (expected cartesian, stereographic, polar or poincare_ball)");
}

inline ChartKind default_chart(Family f) {
  switch (f) {
    case Family::euclidean: return ChartKind::cartesian;
    case Family::sphere: return ChartKind::polar;
    case Family::hyperbolic: return ChartKind::poincare_ball;
    case Family::custom: break;
  }
  return ChartKind::custom;
}

namespace detail {

inline void check_dims(const ModelSpec& spec) {
  if (spec.dim < 2 || spec.dim > kMaxDim)
    throw ArgumentError("model dimension n must lie in [2, " + std::to_string(kMaxDim) + "]");
  if (!(spec.radius > 0.0) || !std::isfinite(spec.radius)) throw ArgumentError("sphere radius r must be positive");
}

inline Chart euclidean_cartesian(int n) {
  Chart c;
  c.dim = n;
  c.label = "euclidean/cartesian";
  c.metric = [](Coords x) {
    const int d = static_cast<int>(x.size());
    std::vector<Jet> g(static_cast<std::size_t>(d * d), Jet(d, x[0].order(), 0.0));
    for (int i = 0; i < d; ++i) g[i * d + i] += 1.0;
    return g;
  };
  c.embedding = [](Coords x) { return std::vector<Jet>(x.begin(), x.end()); };
  c.sampling = {std::vector<double>(n, -2.0), std::vector<double>(n, 2.0)};
  c.family = Family::euclidean;
  c.kind = ChartKind::cartesian;
  return c;
}

inline Chart sphere_stereographic(int n, double r) {
  Chart c;
  c.dim = n;
  c.label = "sphere/stereographic";
  const double r2 = r * r;
  c.metric = conformally_flat_metric([r2](Coords x) {
    const Jet q = squared_norm(x) + r2;
    return reciprocal(q * q) * (4.0 * r2 * r2);
  });
  // projection from the pole +r e_0; the chart origin is the antipode -r e_0
  c.embedding = [r, r2](Coords x) {
    const Jet s = squared_norm(x);
    const Jet inv = reciprocal(s + r2);
    std::vector<Jet> y;
    y.push_back((s - r2) * inv * r);
    for (const auto& xi : x) y.push_back(xi * inv * (2.0 * r2));
    return y;
  };
  c.sampling = {std::vector<double>(n, -2.0 * r), std::vector<double>(n, 2.0 * r)};
  c.family = Family::sphere;
  c.kind = ChartKind::stereographic;
  c.radius = r;
  return c;
}

// Angles t_0..t_{n-2} in (0, pi) and t_{n-1} in (0, 2 pi):
//   y_0 = r cos t_0,  y_k = r sin t_0 ... sin t_{k-1} cos t_k,  y_n = r sin t_0 ... sin t_{n-1}.
inline Chart sphere_polar(int n, double r) {
  Chart c;
  c.dim = n;
  c.label = "sphere/polar";
  const double r2 = r * r;
  c.metric = [r2](Coords x) {
    const int d = static_cast<int>(x.size());
    std::vector<Jet> g(static_cast<std::size_t>(d * d), Jet(d, x[0].order(), 0.0));
    Jet w(d, x[0].order(), r2);
    for (int i = 0; i < d; ++i) {
      g[i * d + i] = w;
      if (i + 1 < d) {
        const Jet s = sin(x[i]);
        w = w * s * s;
      }
    }
    return g;
  };
  c.domain = [](std::span<const double> p) {
    const int d = static_cast<int>(p.size());
    for (int i = 0; i + 1 < d; ++i)
      if (!(p[i] > 0.0 && p[i] < std::numbers::pi)) return false;
    return p[d - 1] > 0.0 && p[d - 1] < 2.0 * std::numbers::pi;
  };
  c.embedding = [r](Coords x) {
    const int d = static_cast<int>(x.size());
    std::vector<Jet> y;
    Jet prod(d, x[0].order(), r);
    for (int k = 0; k < d; ++k) {
      y.push_back(prod * cos(x[k]));
      prod = prod * sin(x[k]);
    }
    y.push_back(prod);
    return y;
  };
  std::vector<double> lo(n, 0.2), hi(n, std::numbers::pi - 0.2);
  lo[n - 1] = 0.1;
  hi[n - 1] = 2.0 * std::numbers::pi - 0.1;
  c.sampling = {lo, hi};
  c.family = Family::sphere;
  c.kind = ChartKind::polar;
  c.radius = r;
  return c;
}

inline Chart hyperbolic_poincare(int n) {
  Chart c;
  c.dim = n;
  c.label = "hyperbolic/poincare_ball";
  c.metric = conformally_flat_metric([](Coords x) {
    const Jet q = 1.0 - squared_norm(x);
    return reciprocal(q * q) * 4.0;
  });
  c.domain = [](std::span<const double> p) {
    double s = 0.0;
    for (double v : p) s += v * v;
    return s < 1.0;
  };
  // hyperboloid -y_0^2 + y_1^2 + ... = -1, y_0 > 0
  c.embedding = [](Coords x) {
    const Jet s = squared_norm(x);
    const Jet inv = reciprocal(1.0 - s);
    std::vector<Jet> y;
    y.push_back((1.0 + s) * inv);
    for (const auto& xi : x) y.push_back(xi * inv * 2.0);
    return y;
  };
  c.sampling = {std::vector<double>(n, -0.8), std::vector<double>(n, 0.8), 0.8};
  c.family = Family::hyperbolic;
  c.kind = ChartKind::poincare_ball;
  return c;
}

}  // namespace detail

inline Chart make_chart(const ModelSpec& spec) {
  detail::check_dims(spec);
  const auto unsupported = [&] {
    return ArgumentError(std::string("unsupported chart '") + to_string(spec.chart) + "' for family '" +
                         to_string(spec.family) + "'");
  };
  switch (spec.family) {
    case Family::euclidean:
      if (spec.chart != ChartKind::cartesian) throw unsupported();
      return detail::euclidean_cartesian(spec.dim);
    case Family::sphere:
      if (spec.chart == ChartKind::stereographic) return detail::sphere_stereographic(spec.dim, spec.radius);
      if (spec.chart == ChartKind::polar) return detail::sphere_polar(spec.dim, spec.radius);
      throw unsupported();
    case Family::hyperbolic:
      if (spec.chart != ChartKind::poincare_ball) throw unsupported();
      return detail::hyperbolic_poincare(spec.dim);
    case Family::custom: break;
  }
  throw unsupported();
}

/// Height function for the canonical ambient axis `v_axis`.
///
/// Sphere: <sigma(x), e_v> through the embedding. Hyperbolic: -<sigma(y), v>_0
/// with v the apex of the hyperboloid, i.e. cosh of the distance to v (>= 1).
/// Euclidean: the linear coordinate x_v.
inline ScalarField height_field(const ModelSpec& spec, int v_axis) {
  detail::check_dims(spec);
  const int n = spec.dim;
  switch (spec.family) {
    case Family::sphere: {
      if (v_axis < 0 || v_axis > n)
        throw ArgumentError("v_axis must lie in [0, n] for the sphere (ambient R^{n+1})");
      const Chart c = make_chart(spec);
      return [emb = *c.embedding, v_axis](Coords x) { return emb(x)[v_axis]; };
    }
    case Family::hyperbolic:
      if (v_axis != 0)
        throw ArgumentError("hyperbolic height functions use the hyperboloid apex: v_axis must be 0");
      return [](Coords x) {
        const Jet s = squared_norm(x);
        return (1.0 + s) / (1.0 - s);
      };
    case Family::euclidean:
      if (v_axis < 0 || v_axis >= n) throw ArgumentError("v_axis must lie in [0, n) for euclidean space");
      return coordinate_field(v_axis);
    case Family::custom: break;
  }
  throw ArgumentError("height_field: unsupported family");
}

/// The function u = exp(-f/m) of the model potential, as a closed-form field.
inline ScalarField model_u_field(const ModelSpec& spec) {
  const double tau = spec.tau;
  const double n = spec.dim;
  switch (spec.family) {
    case Family::sphere: {
      auto h = height_field(spec, spec.v_axis);
      return [h, tau, n](Coords x) { return tau - h(x) * (1.0 / n); };
    }
    case Family::euclidean:
      return [tau](Coords x) { return squared_norm(x) + tau; };
    case Family::hyperbolic: {
      auto h = height_field(spec, spec.v_axis);
      return [h, tau](Coords x) { return h(x) + tau; };
    }
    case Family::custom: break;
  }
  throw ArgumentError("model_u_field: unsupported family");
}

/// Validates the parameter constraints of the model potentials.
inline void check_model_constraints(const ModelSpec& spec) {
  detail::check_dims(spec);
  const double n = spec.dim;
  switch (spec.family) {
    case Family::sphere:
      if (!(spec.tau > 1.0 / n))
        throw ArgumentError("sphere potential requires tau in (1/n, +inf): tau = " + format_real(spec.tau) +
                            " <= 1/n = " + format_real(1.0 / n));
      if (!(spec.tau > spec.radius / n))
        throw ArgumentError("sphere potential requires u = tau - h_v/n > 0, i.e. tau > r/n");
      break;
    case Family::euclidean:
      if (!(spec.tau > 0.0)) throw ArgumentError("euclidean potential requires tau > 0");
      break;
    case Family::hyperbolic:
      if (!(spec.tau > -1.0)) throw ArgumentError("hyperbolic potential requires tau > -1");
      break;
    case Family::custom: throw ArgumentError("example structures exist only for the model families");
  }
}

/// The explicit structure on a model space, with closed-form lambda where available.
inline QemStructure example_structure(const ModelSpec& spec) {
  check_model_constraints(spec);
  Chart chart = make_chart(spec);
  (void)height_field(spec, spec.v_axis);  // validates v_axis
  const ScalarField u = model_u_field(spec);
  const double tau = spec.tau;
  const double n = spec.dim;
  const std::string label = spec.describe();

  if (spec.m.is_infinite()) {
    ScalarField f = [u, tau](Coords x) { return tau - u(x); };
    return make_structure(std::move(chart), std::move(f), spec.m, std::nullopt, label);
  }

  const double m = spec.m.value();
  ScalarField f = [u, m](Coords x) { return log(u(x)) * (-m); };
  std::optional<ScalarField> lambda;
  switch (spec.family) {
    case Family::sphere:
      if (spec.radius == 1.0)
        lambda = [u, tau, m, n](Coords x) {
          const Jet uu = u(x);
          return (n - 1.0) - (tau - uu) / uu * m;
        };
      break;
    case Family::euclidean:
      lambda = [u, m](Coords x) { return reciprocal(u(x)) * (-2.0 * m); };
      break;
    case Family::hyperbolic:
      lambda = [u, tau, m, n](Coords x) {
        const Jet uu = u(x);
        return -(n - 1.0) - (uu - tau) / uu * m;
      };
      break;
    case Family::custom: break;
  }
  return make_structure(std::move(chart), std::move(f), spec.m, std::move(lambda), label);
}

}  // namespace gqem
