#pragma once

// Riemannian integration on round spheres in polar coordinates and the
// integral formulae of compact quasi-Einstein structures.
//
// Nodes are tensor products of interior Gauss-Legendre rules, one per polar
// angle, so no node touches the coordinate singular set. Sums are pairwise in
// a fixed node order.

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"
#include "identities.hpp"
#include "qem.hpp"

namespace gqem {

struct GaussRule {
  std::vector<double> nodes;    // ascending, in (-1, 1)
  std::vector<double> weights;
};

/// k-point Gauss-Legendre rule on [-1, 1] by Newton iteration on P_k.
inline GaussRule gauss_legendre(int k) {
  if (k < 1) throw ArgumentError("Gauss-Legendre rule needs at least one node");
  GaussRule r;
  r.nodes.resize(k);
  r.weights.resize(k);
  for (int i = 0; i < (k + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (k + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= k; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      if (k == 1) p0 = 1.0;
      dp = k * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute the derivative at the converged root
    double p0 = 1.0, p1 = x;
    for (int j = 2; j <= k; ++j) {
      const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
      p0 = p1;
      p1 = p2;
    }
    if (k == 1) p0 = 1.0;
    dp = k * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[i] = -x;
    r.nodes[k - 1 - i] = x;
    r.weights[i] = r.weights[k - 1 - i] = w;
  }
  if (k % 2 == 1) r.nodes[k / 2] = 0.0;
  return r;
}

/// Pairwise summation with a fixed split, so the result depends only on the input order.
inline double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t h = v.size() / 2;
  return pairwise_sum(v.first(h)) + pairwise_sum(v.subspan(h));
}

/// Volume of the round sphere S^n(r).
inline double sphere_volume(int n, double r) {
  return 2.0 * std::pow(std::numbers::pi, (n + 1) / 2.0) / std::tgamma((n + 1) / 2.0) * std::pow(r, n);
}

struct QuadratureGrid {
  Chart chart;
  std::vector<int> resolution;               // nodes per angle
  std::vector<std::vector<double>> nodes;    // last angle varies fastest
  std::vector<double> weights;               // rule weights times sqrt(det g)

  std::size_t size() const noexcept { return nodes.size(); }
  std::string resolution_string() const {
    std::string s;
    for (std::size_t i = 0; i < resolution.size(); ++i) s += (i ? "x" : "") + std::to_string(resolution[i]);
    return s;
  }
};

inline std::vector<int> default_resolution(int n) {
  if (n == 2) return {64, 128};
  if (n == 3) return {32, 64, 128};
  std::vector<int> r(n, 24);
  r[n - 1] = 48;
  return r;
}

/// Parses "64x128" style resolutions.
inline std::vector<int> parse_resolution(const std::string& s) {
  std::vector<int> r;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const std::size_t next = s.find('x', pos);
    const std::string part = s.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
    if (part.empty() || part.find_first_not_of("0123456789") != std::string::npos)
      throw ArgumentError("grid must look like 64x128, got '" + s + "'");
    const long v = std::stol(part);
    if (v < 1 || v > 4096) throw ArgumentError("grid node counts must lie in [1, 4096]");
    r.push_back(static_cast<int>(v));
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return r;
}

inline void require_compact(const Chart& chart, const char* what) {
  if (!chart.compact())
    throw ArgumentError(std::string(what) + " requires a compact model; chart " + chart.label + " is not compact");
  if (chart.kind != ChartKind::polar)
    throw ArgumentError(std::string(what) + " integrates in the polar chart; got " + chart.label);
}

/// Tensor-product grid on a sphere polar chart.
inline QuadratureGrid make_sphere_grid(const Chart& chart, std::vector<int> resolution) {
  require_compact(chart, "quadrature");
  const int n = chart.dim;
  if (static_cast<int>(resolution.size()) != n)
    throw ArgumentError("grid needs " + std::to_string(n) + " node counts, got " + std::to_string(resolution.size()));
  std::vector<GaussRule> rules;
  std::vector<double> half(n);
  for (int i = 0; i < n; ++i) {
    rules.push_back(gauss_legendre(resolution[i]));
    half[i] = (i + 1 < n ? std::numbers::pi : 2.0 * std::numbers::pi) / 2.0;
  }
  QuadratureGrid g;
  g.chart = chart;
  g.resolution = resolution;
  std::size_t total = 1;
  for (int k : resolution) total *= static_cast<std::size_t>(k);
  g.nodes.reserve(total);
  g.weights.reserve(total);
  std::vector<int> idx(n, 0);
  for (std::size_t c = 0; c < total; ++c) {
    std::vector<double> p(n);
    double w = 1.0;
    for (int i = 0; i < n; ++i) {
      p[i] = half[i] * (rules[i].nodes[idx[i]] + 1.0);
      w *= half[i] * rules[i].weights[idx[i]];
    }
    const auto gm = metric_tensor(chart, p);
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = gm(i, j);
    g.weights.push_back(w * std::sqrt(m.determinant()));
    g.nodes.push_back(std::move(p));
    for (int i = n - 1; i >= 0; --i) {
      if (++idx[i] < resolution[i]) break;
      idx[i] = 0;
    }
  }
  return g;
}

inline QuadratureGrid make_sphere_grid(const Chart& chart) { return make_sphere_grid(chart, default_resolution(chart.dim)); }

namespace detail {

// X^i d_i phi at the base point.
inline double dot_values(const JetVector& x, const JetVector& dphi) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i].value() * dphi[i].value();
  return s;
}

inline std::string node_string(const std::vector<double>& p) {
  std::string s = "(";
  for (std::size_t i = 0; i < p.size(); ++i) s += (i ? ", " : "") + format_real(p[i]);
  return s + ")";
}

/// Evaluates `per_node` at every node; failures name the node.
template <class F>
std::vector<double> weighted_values(const QuadratureGrid& grid, F&& per_node) {
  std::vector<double> v(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    double x;
    try {
      x = per_node(grid.nodes[k]);
    } catch (const std::exception& e) {
      throw DomainError("integrand failed at node " + node_string(grid.nodes[k]) + ": " + e.what());
    }
    if (!std::isfinite(x)) throw DomainError("integrand is not finite at node " + node_string(grid.nodes[k]));
    v[k] = grid.weights[k] * x;
  }
  return v;
}

}  // namespace detail

inline double integrate(const QuadratureGrid& grid, const ScalarField& phi) {
  const auto v = detail::weighted_values(grid, [&](const std::vector<double>& p) {
    return phi(seed_point(p, 1)).value();
  });
  return pairwise_sum(v);
}

/// Integral of Delta phi; vanishes on a closed manifold.
inline double stokes_sanity(const QuadratureGrid& grid, const ScalarField& phi) {
  const auto v = detail::weighted_values(grid, [&](const std::vector<double>& p) {
    LocalGeometry geo(grid.chart, p, 2);
    return geo.laplacian(phi(geo.coords())).value();
  });
  return pairwise_sum(v);
}

/// Integral of <grad phi, grad psi> + phi Delta psi; vanishes on a closed manifold.
inline double integration_by_parts_defect(const QuadratureGrid& grid, const ScalarField& phi, const ScalarField& psi) {
  const auto v = detail::weighted_values(grid, [&](const std::vector<double>& p) {
    LocalGeometry geo(grid.chart, p, 2);
    const Jet a = phi(geo.coords());
    const Jet b = psi(geo.coords());
    return geo.dot_covectors(geo.differential(a), geo.differential(b)).value() + a.value() * geo.laplacian(b).value();
  });
  return pairwise_sum(v);
}

// ---- integral identities ------------------------------------------------------

inline const std::vector<CatalogEntry>& integral_catalog() {
  using CK = CheckKind;
  using TC = ToleranceClass;
  static const std::vector<CatalogEntry> list{
      {"thm5_item1", "thm5,intphif2",
       "int |Hess f - (Delta f/n) g|^2 + ((n+2)/(2n)) int (Delta f)^2 = int <grad f, grad R> - ((n+2)/2) int <grad f, grad lambda>",
       CK::integral, {3, 3, 1}, TC::integral},
      {"thm5_item2", "thm5",
       "int (Ric(grad f, grad f) + <grad f, grad R>) = (3/2) int (Delta f)^2 + ((n+2)/2) int <grad f, grad lambda>",
       CK::integral, {3, 3, 1}, TC::integral},
      {"thm5_item3", "thm5,eqncor1",
       "int <grad R, grad f> - ((n+2)/2) int <grad f, grad lambda> > 0 unless the structure is trivial", CK::integral,
       {3, 3, 1}, TC::integral},
      {"thm5_item4", "thm5",
       "int |Hess f - (Delta f/n) g|^2 = ((n-2)/(2n)) int <grad f, grad R> - ((n+2)/(2nm)) int |grad f|^2 Delta f",
       CK::integral, {3, 3, 1}, TC::integral},
      {"thm1_integral", "eqnthm11",
       "int |Hess f|^2 = int Ric(grad f, grad f) - (2/m) int |grad f|^2 Delta f + (n-2) int <grad lambda, grad f>",
       CK::integral, {3, 3, 1}, TC::integral},
      {"integrated_bochner_f", "intboch,eqco1-2",
       "int Ric(grad f, grad f) + int |Hess f - (Delta f/n) g|^2 = ((n-1)/n) int (Delta f)^2", CK::integral,
       {3, 3, 0}, TC::integral},
      {"eqD2u", "eqD2u", "int |Hess u - (Delta u/n) g|^2 = ((n-1)/n) int (Delta u)^2 - int Ric(grad u, grad u)",
       CK::integral, {2, 2, 0}, TC::integral},
      {"corollary_equality", "corthmsph,eqintd2u", "int Ric(grad u, grad u) = ((n-1)/n) int (Delta u)^2 when grad u is conformal",
       CK::integral, {2, 2, 0}, TC::integral},
      {"lemflat_integral", "lemflat", "int |X|^2 div X = 0 for conformal X = grad u", CK::integral, {2, 2, 0},
       TC::integral},
  };
  return list;
}

inline const CatalogEntry& integral_entry(const std::string& id) {
  for (const auto& e : integral_catalog())
    if (e.id == id) return e;
  throw ArgumentError("unknown integral check '" + id + "'");
}

/// Both sides of an integral identity and the gap |lhs - rhs| / (1 + |lhs|).
struct IntegralCheck {
  std::string id;
  std::string anchor;
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;
  std::string resolution;
  double tolerance = 0.0;
  bool pass = false;
};

inline IntegralCheck make_check(const std::string& id, double lhs, double rhs, const QuadratureGrid& grid,
                                double tol) {
  IntegralCheck c{id, integral_entry(id).anchor, lhs, rhs, std::abs(lhs - rhs) / (1.0 + std::abs(lhs)),
                  grid.resolution_string(), tol};
  c.pass = std::isfinite(c.gap) && c.gap < tol;
  return c;
}

/// Integrals over the grid of the per-node quantities the integral formulae use.
struct StructureIntegrals {
  int n = 0;
  double inv_m = 0.0;
  bool has_u = false;
  // f-terms
  double hess_traceless2 = 0.0;  // |Hess f - (Delta f/n) g|^2
  double hess2 = 0.0;            // |Hess f|^2
  double lap2 = 0.0;             // (Delta f)^2
  double grad_f_R = 0.0;         // <grad f, grad R>
  double grad_f_lambda = 0.0;    // <grad f, grad lambda>
  double ric_ff = 0.0;           // Ric(grad f, grad f)
  double grad2_lap = 0.0;        // |grad f|^2 Delta f
  // u-terms, finite m only
  double u_traceless2 = 0.0;     // |Hess u - (Delta u/n) g|^2
  double u_ric = 0.0;            // Ric(grad u, grad u)
  double u_lap2 = 0.0;           // (Delta u)^2
  double u_grad2_lap = 0.0;      // |grad u|^2 Delta u
  std::size_t u_near_critical = 0;  // nodes where |grad u| is below 1e-8
  std::string resolution;
};

/// Tabulates every integrand once per node (jet order 3), then sums each column.
inline StructureIntegrals integrate_structure(const QuadratureGrid& grid, const QemStructure& s) {
  require_compact(s.chart, "integral formulae");
  if (s.chart.dim != grid.chart.dim || s.chart.radius != grid.chart.radius)
    throw ArgumentError("grid and structure live on different spheres");
  const int n = s.dim();
  const bool has_u = !s.m.is_infinite();
  constexpr int kCols = 11;
  std::vector<std::vector<double>> cols(kCols, std::vector<double>(grid.size()));
  StructureIntegrals out;
  out.n = n;
  out.inv_m = s.m.inverse();
  out.has_u = has_u;
  out.resolution = grid.resolution_string();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto& p = grid.nodes[k];
    const double w = grid.weights[k];
    double q[kCols] = {};
    try {
      StructureAt at(s, p, 3);
      const auto& geo = at.geo();
      const auto& v = at.grad_f();
      const double lap = at.lap_f().value();
      const double h2 = geo.norm2_bilinear(at.hess_f()).value();
      q[0] = h2 - lap * lap / n;
      q[1] = h2;
      q[2] = lap * lap;
      q[3] = detail::dot_values(v, geo.differential(geo.scalar_curvature()));
      q[4] = detail::dot_values(v, geo.differential(at.lambda()));
      q[5] = geo.bilinear(geo.ricci(), v, v).value();
      q[6] = at.grad_f_norm2().value() * lap;
      if (has_u) {
        const JetVector hu = geo.hessian(at.u());
        const JetVector gu = geo.gradient(at.u());
        const double lu = geo.trace(hu).value();
        const double gu2 = geo.dot(gu, gu).value();
        q[7] = geo.norm2_bilinear(hu).value() - lu * lu / n;
        q[8] = geo.bilinear(geo.ricci(), gu, gu).value();
        q[9] = lu * lu;
        q[10] = gu2 * lu;
        if (std::sqrt(std::max(0.0, gu2)) < 1e-8) ++out.u_near_critical;
      }
    } catch (const std::exception& e) {
      throw DomainError("integrand failed at node " + detail::node_string(p) + ": " + e.what());
    }
    for (int c = 0; c < kCols; ++c) {
      if (!std::isfinite(q[c])) throw DomainError("integrand is not finite at node " + detail::node_string(p));
      cols[c][k] = w * q[c];
    }
  }
  double* dst[kCols] = {&out.hess_traceless2, &out.hess2, &out.lap2, &out.grad_f_R, &out.grad_f_lambda,
                        &out.ric_ff, &out.grad2_lap, &out.u_traceless2, &out.u_ric, &out.u_lap2, &out.u_grad2_lap};
  for (int c = 0; c < kCols; ++c) *dst[c] = pairwise_sum(cols[c]);
  return out;
}

// Integrands are exact consequences of the structure equations on a closed
// manifold; each function returns both sides.

inline IntegralCheck thm5_item1(const StructureIntegrals& I, const QuadratureGrid& grid, double tol) {
  const double n = I.n;
  return make_check("thm5_item1",
                    I.hess_traceless2 + (n + 2.0) / (2.0 * n) * I.lap2,
                    I.grad_f_R - (n + 2.0) / 2.0 * I.grad_f_lambda, grid, tol);
}

inline IntegralCheck thm5_item2(const StructureIntegrals& I, const QuadratureGrid& grid, double tol) {
  const double n = I.n;
  return make_check("thm5_item2",
                    I.ric_ff + I.grad_f_R, 1.5 * I.lap2 + (n + 2.0) / 2.0 * I.grad_f_lambda, grid, tol);
}

/// The quantity whose nonpositivity forces triviality; positive on nontrivial structures.
struct TrivialityIndicator {
  double value = 0.0;  // int <grad R, grad f> - ((n+2)/2) int <grad f, grad lambda>
  bool positive = false;
};

inline TrivialityIndicator thm5_item3(const StructureIntegrals& I) {
  TrivialityIndicator t;
  t.value = I.grad_f_R - (I.n + 2.0) / 2.0 * I.grad_f_lambda;
  t.positive = t.value > 0.0;
  return t;
}

inline IntegralCheck thm5_item4(const StructureIntegrals& I, const QuadratureGrid& grid, double tol) {
  const double n = I.n;
  return make_check("thm5_item4",
                    I.hess_traceless2,
                    (n - 2.0) / (2.0 * n) * I.grad_f_R - (n + 2.0) / (2.0 * n) * I.inv_m * I.grad2_lap, grid, tol);
}

inline IntegralCheck thm1_integral(const StructureIntegrals& I, const QuadratureGrid& grid, double tol) {
  const double n = I.n;
  return make_check("thm1_integral",
                    I.hess2, I.ric_ff - 2.0 * I.inv_m * I.grad2_lap + (n - 2.0) * I.grad_f_lambda, grid, tol);
}

inline IntegralCheck integrated_bochner_f(const StructureIntegrals& I, const QuadratureGrid& grid, double tol) {
  const double n = I.n;
  return make_check("integrated_bochner_f",
                    I.ric_ff + I.hess_traceless2, (n - 1.0) / n * I.lap2, grid, tol);
}

struct BochnerIntegrals {
  double d2u_traceless = 0.0;  // int |Hess u - (Delta u/n) g|^2
  double ric_term = 0.0;       // int Ric(grad u, grad u)
  double lap_term = 0.0;       // ((n-1)/n) int (Delta u)^2
  double lemflat_term = 0.0;   // int |grad u|^2 Delta u
};

inline BochnerIntegrals bochner_integrals(const StructureIntegrals& I) {
  if (!I.has_u) throw ArgumentError("Bochner integrals of u = exp(-f/m) require finite m");
  const double n = I.n;
  return {I.u_traceless2, I.u_ric, (n - 1.0) / n * I.u_lap2, I.u_grad2_lap};
}

/// The same four integrals for an arbitrary function u on the grid's sphere.
inline BochnerIntegrals bochner_integrals(const QuadratureGrid& grid, const ScalarField& u) {
  const int n = grid.chart.dim;
  std::vector<std::vector<double>> cols(4, std::vector<double>(grid.size()));
  for (std::size_t k = 0; k < grid.size(); ++k) {
    LocalGeometry geo(grid.chart, grid.nodes[k], 2);
    const Jet uj = u(geo.coords());
    const JetVector hu = geo.hessian(uj);
    const JetVector gu = geo.gradient(uj);
    const double lu = geo.trace(hu).value();
    const double w = grid.weights[k];
    cols[0][k] = w * (geo.norm2_bilinear(hu).value() - lu * lu / n);
    cols[1][k] = w * geo.bilinear(geo.ricci(), gu, gu).value();
    cols[2][k] = w * lu * lu;
    cols[3][k] = w * geo.dot(gu, gu).value() * lu;
  }
  return {pairwise_sum(cols[0]), pairwise_sum(cols[1]), (n - 1.0) / n * pairwise_sum(cols[2]), pairwise_sum(cols[3])};
}

inline IntegralCheck eq_d2u(const BochnerIntegrals& b, const QuadratureGrid& grid, double tol) {
  return make_check("eqD2u",
                    b.d2u_traceless, b.lap_term - b.ric_term, grid, tol);
}

/// Equality in the Ricci lower bound: int Ric(grad u, grad u) = ((n-1)/n) int (Delta u)^2,
/// attained when grad u is conformal. Relative gap |a - b| / |b|.
inline IntegralCheck corollary_equality(const BochnerIntegrals& b, const QuadratureGrid& grid, double tol) {
  IntegralCheck c{"corollary_equality", integral_entry("corollary_equality").anchor, b.ric_term, b.lap_term,
                  0.0, grid.resolution_string(), tol};
  c.gap = std::abs(b.ric_term - b.lap_term) / std::max(std::abs(b.lap_term), std::numeric_limits<double>::min());
  c.pass = std::isfinite(c.gap) && c.gap < tol;
  return c;
}

/// For conformal grad u: int |grad u|^2 Delta u = 0 (absolute).
inline IntegralCheck lemflat_integral(const BochnerIntegrals& b, const QuadratureGrid& grid, double tol) {
  IntegralCheck c{"lemflat_integral", integral_entry("lemflat_integral").anchor, b.lemflat_term, 0.0,
                  std::abs(b.lemflat_term), grid.resolution_string(), tol};
  c.pass = std::isfinite(c.gap) && c.gap < tol;
  return c;
}

}  // namespace gqem
