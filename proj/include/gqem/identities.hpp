#pragma once

// Pointwise verifiers for the curvature identities satisfied by generalized
// m-quasi-Einstein structures, plus the geometric identities they rest on.
// Each verifier returns the invariant norm of LHS - RHS; the identity asserts
// that it vanishes.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "geometry.hpp"
#include "qem.hpp"

namespace gqem {

/// Required jet orders of the metric, the potential and lambda.
struct JetOrders {
  int g = 0;
  int f = 0;
  int lambda = 0;
};

enum class ToleranceClass { order2, order3, order4, integral };

inline const char* to_string(ToleranceClass c) {
  switch (c) {
    case ToleranceClass::order2: return "order2";
    case ToleranceClass::order3: return "order3";
    case ToleranceClass::order4: return "order4";
    case ToleranceClass::integral: return "integral";
  }
  return "?";
}

enum class CheckKind { pointwise, sample, integral };

inline const char* to_string(CheckKind k) {
  switch (k) {
    case CheckKind::pointwise: return "pointwise";
    case CheckKind::sample: return "sample";
    case CheckKind::integral: return "integral";
  }
  return "?";
}

struct CatalogEntry {
  std::string id;
  std::string tag;     // label of the equation in the source derivation
  std::string anchor;  // the identity, written out
  CheckKind kind = CheckKind::pointwise;
  JetOrders orders;
  ToleranceClass tolerance_class = ToleranceClass::order3;
};

struct IdentityResult {
  std::string identity_id;
  std::vector<double> point;
  double residual = 0.0;                 // invariant norm, >= 0
  std::vector<double> components;        // raw coordinate components of LHS - RHS
  int required_jet_order = 0;
  double tolerance_used = 0.0;
};

// ---- geometric identities (any metric, any field) --------------------------------

namespace detail {

inline std::vector<double> jet_values(const JetVector& v) { return values(v); }

inline double scalar_residual(const Jet& r, std::vector<double>& comps) {
  comps = {r.value()};
  return std::abs(r.value());
}

inline double covector_residual(const LocalGeometry& geo, const JetVector& w, std::vector<double>& comps) {
  comps = values(w);
  return covector_norm(geo, w);
}

inline double bilinear_residual(const LocalGeometry& geo, const JetVector& t, std::vector<double>& comps) {
  comps = values(t);
  return bilinear_norm(geo, t);
}

/// X(phi) = X^i d_i phi.
inline Jet act(const JetVector& x, const JetVector& dphi) {
  Jet s = x[0] * dphi[0];
  for (std::size_t i = 1; i < x.size(); ++i) s += x[i] * dphi[i];
  return s;
}

}  // namespace detail

/// grad R - 2 div Ric (covector).
inline JetVector contracted_bianchi_jets(const LocalGeometry& geo) {
  geo.require(3, "contracted Bianchi identity");
  return axpy(geo.differential(geo.scalar_curvature()), -2.0, geo.div_bilinear(geo.ricci()));
}

/// div(df (x) df) - (Delta f df + Hess f(grad f, .)).
inline JetVector div_dfdf_jets(const LocalGeometry& geo, const Jet& f) {
  const JetVector df = geo.differential(f);
  const int n = geo.dim();
  JetVector dd(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) dd[i * n + j] = df[i] * df[j];
  const JetVector h = geo.hessian(f);
  const JetVector gf = geo.raise(df);
  const Jet lap = geo.trace(h);
  JetVector r = geo.div_bilinear(dd);
  const JetVector hx = geo.contract(h, gf);
  for (int j = 0; j < n; ++j) r[j] -= lap * df[j] + hx[j];
  return r;
}

/// div Hess f - (Ric(grad f, .) + d Delta f).
inline JetVector div_hessian_jets(const LocalGeometry& geo, const Jet& f) {
  geo.require(3, "divergence of the Hessian");
  const JetVector h = geo.hessian(f);
  const JetVector gf = geo.gradient(f);
  JetVector r = geo.div_bilinear(h);
  const JetVector ric = geo.contract(geo.ricci(), gf);
  const JetVector dlap = geo.differential(geo.trace(h));
  for (int j = 0; j < geo.dim(); ++j) r[j] -= ric[j] + dlap[j];
  return r;
}

/// (1/2) Delta |grad f|^2 - |Hess f|^2 - <grad f, grad Delta f> - Ric(grad f, grad f).
inline Jet bochner_jet(const LocalGeometry& geo, const Jet& f) {
  geo.require(2, "Bochner formula");
  const JetVector df = geo.differential(f);
  const JetVector gf = geo.raise(df);
  const JetVector h = geo.hessian(f);
  const Jet q = geo.dot_covectors(df, df);
  return geo.laplacian(q) * 0.5 - geo.norm2_bilinear(h) - detail::act(gf, geo.differential(geo.trace(h))) -
         geo.bilinear(geo.ricci(), gf, gf);
}

/// div(L_X g)(X) - [(1/2) Delta |X|^2 - |grad X|^2 + Ric(X, X) + X(div X)].
inline Jet lie_divergence_jet(const LocalGeometry& geo, const JetVector& x) {
  geo.require(2, "divergence of the Lie derivative of the metric");
  const JetVector lie = geo.lie_metric(x);
  const Jet lhs = detail::act(x, geo.div_bilinear(lie));
  const JetVector nx = geo.nabla(x);
  const Jet q = geo.dot(x, x);
  const Jet divx = geo.divergence(x);
  const Jet rhs = geo.laplacian(q) * 0.5 - geo.norm2_endomorphism(nx) + geo.bilinear(geo.ricci(), x, x) +
                  detail::act(x, geo.differential(divx));
  return lhs - rhs;
}

/// div(|X|^2 X) - ((n+2)/n) |X|^2 div X; vanishes for conformal X.
inline Jet conformal_divergence_jet(const LocalGeometry& geo, const JetVector& x) {
  const Jet q = geo.dot(x, x);
  const double n = geo.dim();
  return geo.divergence(scaled(x, q)) - q * geo.divergence(x) * ((n + 2.0) / n);
}

/// (1/2) L_X g - (div X / n) g.
inline JetVector conformality_jets(const LocalGeometry& geo, const JetVector& x) {
  JetVector r = geo.lie_metric(x);
  const Jet divx = geo.divergence(x) * (1.0 / geo.dim());
  const auto& g = geo.metric();
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = r[i] * 0.5 - divx * g[i];
  return r;
}

/// Residual of the first Bianchi identity and the antisymmetries of R_abcd, sup over components.
inline double riemann_symmetry_defect(const LocalGeometry& geo) {
  const int n = geo.dim();
  const JetVector rup = geo.riemann();
  // lower the first index: R_abcd = g_ae R^e_bcd
  std::vector<double> r(static_cast<std::size_t>(n * n * n * n), 0.0);
  auto at = [n](int a, int b, int c, int d) { return ((a * n + b) * n + c) * n + d; };
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          double s = 0.0;
          for (int e = 0; e < n; ++e) s += geo.g(a, e).value() * rup[at(e, b, c, d)].value();
          r[at(a, b, c, d)] = s;
        }
  double worst = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          worst = std::max(worst, std::abs(r[at(a, b, c, d)] + r[at(b, a, c, d)]));
          worst = std::max(worst, std::abs(r[at(a, b, c, d)] + r[at(a, b, d, c)]));
          worst = std::max(worst, std::abs(r[at(a, b, c, d)] - r[at(c, d, a, b)]));
          worst = std::max(worst, std::abs(r[at(a, b, c, d)] + r[at(a, c, d, b)] + r[at(a, d, b, c)]));
        }
  return worst;
}

// ---- structure identities -----------------------------------------------------------

/// <grad f, grad R> + <grad f, grad Delta f> - (1/m) <grad f, grad |grad f|^2> - n <grad lambda, grad f>.
inline Jet trace_derivative_jet(const StructureAt& at) {
  const auto& geo = at.geo();
  geo.require(3, "derivative of the trace identity");
  const auto& v = at.grad_f();
  
  return detail::act(v, geo.differential(geo.scalar_curvature())) + detail::act(v, geo.differential(at.lap_f())) -
         detail::act(v, geo.differential(at.grad_f_norm2())) * at.inv_m() -
         detail::act(v, geo.differential(at.lambda())) * static_cast<double>(at.dim());
}

/// R + Delta f - |grad f|^2 / m - n lambda.
inline Jet trace_jet(const StructureAt& at) {
  return at.geo().scalar_curvature() + at.lap_f() - at.grad_f_norm2() * at.inv_m() -
         at.lambda() * static_cast<double>(at.dim());
}

/// (1/2) Delta |grad f|^2 - [|Hess f|^2 - Ric(grad f, grad f) + (2/m)|grad f|^2 Delta f
///                           - (n-2) <grad lambda, grad f>].
inline Jet lemma1_item1_jet(const StructureAt& at) {
  const auto& geo = at.geo();
  geo.require(3, "lemma1_item1");
  const auto& v = at.grad_f();
  const double n = at.dim();
  const Jet rhs = geo.norm2_bilinear(at.hess_f()) - geo.bilinear(geo.ricci(), v, v) +
                  at.grad_f_norm2() * at.lap_f() * (2.0 * at.inv_m()) -
                  detail::act(v, geo.differential(at.lambda())) * (n - 2.0);
  return geo.laplacian(at.grad_f_norm2()) * 0.5 - rhs;
}

/// (1/2) dR - [((m-1)/m) Ric(grad f, .) + (1/m)(R - (n-1) lambda) df + (n-1) d lambda].
inline JetVector lemma1_item2_jets(const StructureAt& at) {
  const auto& geo = at.geo();
  geo.require(3, "lemma1_item2");
  const double n = at.dim();
  const JetVector dr = geo.differential(geo.scalar_curvature());
  const JetVector ric = geo.contract(geo.ricci(), at.grad_f());
  const JetVector dl = geo.differential(at.lambda());
  const Jet coef = (geo.scalar_curvature() - at.lambda() * (n - 1.0)) * at.inv_m();
  const auto& df = at.df();
  JetVector r;
  for (int j = 0; j < at.dim(); ++j)
    r.push_back(dr[j] * 0.5 - ric[j] * (1.0 - at.inv_m()) - coef * df[j] - dl[j] * (n - 1.0));
  return r;
}

/// Fixed test directions Z for the contracted form of lemma1_item2.
inline std::vector<std::vector<double>> probe_directions(int n, int count = 5) {
  std::vector<std::vector<double>> zs;
  for (int k = 0; k < count; ++k) {
    std::vector<double> z(n);
    for (int i = 0; i < n; ++i) z[i] = std::sin(1.3 * (k + 1) * (i + 1) + 0.7);
    zs.push_back(std::move(z));
  }
  return zs;
}

/// d(R + |grad f|^2 - 2(n-1) lambda) - 2 lambda df
///   - (2/m) [Hess f(grad f, .) + (|grad f|^2 - Delta f) df].
inline JetVector lemma1_item3_jets(const StructureAt& at) {
  const auto& geo = at.geo();
  geo.require(3, "lemma1_item3");
  const double n = at.dim();
  const Jet potential = geo.scalar_curvature() + at.grad_f_norm2() - at.lambda() * (2.0 * (n - 1.0));
  const JetVector lhs = geo.differential(potential);
  const JetVector hx = geo.contract(at.hess_f(), at.grad_f());
  const Jet coef = at.grad_f_norm2() - at.lap_f();
  const auto& df = at.df();
  JetVector r;
  for (int j = 0; j < at.dim(); ++j)
    r.push_back(lhs[j] - at.lambda() * df[j] * 2.0 - (hx[j] + coef * df[j]) * (2.0 * at.inv_m()));
  return r;
}

/// m Delta f - |grad f|^2 - m (n lambda - R); divided by m when m is infinite.
inline Jet mdivgrad_jet(const StructureAt& at) {
  const double n = at.dim();
  const Jet gap = at.lambda() * n - at.geo().scalar_curvature();
  if (at.structure().m.is_infinite()) return at.lap_f() - gap;
  const double m = at.structure().m.value();
  return at.lap_f() * m - at.grad_f_norm2() - gap * m;
}

/// Delta u - (u/m)(R - n lambda).
inline Jet laplacian_u_jet(const StructureAt& at) {
  const double m = at.structure().m.value();
  const auto& u = at.u();
  return at.geo().laplacian(u) -
         u * (at.geo().scalar_curvature() - at.lambda() * static_cast<double>(at.dim())) * (1.0 / m);
}

/// (1/2) Delta R minus the right-hand side of the Laplacian-of-scalar-curvature formula.
inline Jet lemma4_jet(const StructureAt& at) {
  const auto& geo = at.geo();
  geo.require(4, "lemma4");
  const double n = at.dim();
  const double im = at.inv_m();
  const auto& v = at.grad_f();
  const Jet& lap = at.lap_f();
  const auto& g = geo.metric();
  JetVector traceless = at.hess_f();
  for (std::size_t i = 0; i < traceless.size(); ++i) traceless[i] -= lap * g[i] * (1.0 / n);
  
  const Jet& r = geo.scalar_curvature();
  const Jet& lambda = at.lambda();
  const Jet grad_grad = geo.divergence(geo.directional(v, v));
  const Jet rhs = -geo.norm2_bilinear(traceless) - lap * lap * (1.0 / n + im) -
                  detail::act(v, geo.differential(lambda)) * (n / 2.0) + detail::act(v, geo.differential(r)) +
                  detail::act(v, geo.differential(lap)) * (0.5 - im) + grad_grad * im +
                  geo.laplacian(lambda) * (n - 1.0) + lambda * lap;
  return geo.laplacian(r) * 0.5 - rhs;
}

// ---- catalog and registry ---------------------------------------------------------

struct Applicability {
  bool finite_m = false;
  bool einstein_model = false;  // chart of a model family (constant curvature)
  bool compact = false;
  int min_dim = 2;
};

struct PointwiseIdentity {
  CatalogEntry entry;
  Applicability needs;
  std::function<double(const StructureAt&, std::vector<double>&)> residual;
};

inline std::string applicability_failure(const Applicability& a, const QemStructure& s) {
  if (a.finite_m && s.m.is_infinite()) return "requires finite m";
  if (a.einstein_model && s.chart.family == Family::custom) return "requires an Einstein model chart";
  if (a.compact && !s.chart.compact()) return "requires a compact model";
  if (s.dim() < a.min_dim) return "requires n >= " + std::to_string(a.min_dim);
  return {};
}

/// Jet order a StructureAt needs so every listed order is available.
inline int required_order(const JetOrders& o, LambdaProvenance p) {
  const int lam = p == LambdaProvenance::trace_solved ? o.lambda + 2 : o.lambda;
  return std::clamp(std::max({o.g, o.f, lam, 1}), 1, kMaxOrder);
}

inline const std::vector<PointwiseIdentity>& pointwise_identities() {
  using TC = ToleranceClass;
  using CK = CheckKind;
  static const std::vector<PointwiseIdentity> list = [] {
    std::vector<PointwiseIdentity> v;
    v.push_back({{"defining_eq", "eqprinc", "Ric + Hess f - (1/m) df (x) df = lambda g", CK::pointwise, {2, 2, 0}, TC::order2},
                 {},
                 [](const StructureAt& at, std::vector<double>& c) {
                   return detail::bilinear_residual(at.geo(), defining_residual_jets(at), c);
                 }});
    v.push_back({{"traceless_eq", "eqntrfr",
                  "Hess f - (Delta f/n) g = (1/m)(df (x) df - (|grad f|^2/n) g) - (Ric - (R/n) g)", CK::pointwise,
                  {2, 2, 0}, TC::order2},
                 {},
                 [](const StructureAt& at, std::vector<double>& c) {
                   return detail::bilinear_residual(at.geo(), traceless_residual_jets(at), c);
                 }});
    v.push_back({{"trace_eq", "eqntrace", "R + Delta f - (1/m)|grad f|^2 = n lambda", CK::pointwise, {2, 2, 0}, TC::order2},
                 {},
                 [](const StructureAt& at, std::vector<double>& c) { return detail::scalar_residual(trace_jet(at), c); }});
    v.push_back({{"radial_eq", "eqprinc1",
                  "Ric(grad f, grad f) + <grad_{grad f} grad f, grad f> = (1/m)|grad f|^4 + lambda |grad f|^2",
                  CK::pointwise, {2, 2, 0}, TC::order3},
                 {},
                 [](const StructureAt& at, std::vector<double>& c) {
                   return detail::scalar_residual(radial_identity_jet(at), c);
                 }});
    v.push_back({{"trace_derivative_eq", "eqntrace2",
                  "<grad f, grad R> + <grad f, grad Delta f> = (1/m)<grad f, grad |grad f|^2> + n <grad lambda, grad f>",
                  CK::pointwise, {3, 3, 1}, TC::order3},
                 {},
                 [](const StructureAt& at, std::vector<double>& c) {
                   return detail::scalar_residual(trace_derivative_jet(at), c);
                 }});
    v.push_back({{"u_transform_eq", "conformal", "Hess f - (1/m) df (x) df = -(m/u) Hess u,  u = exp(-f/m)",
                  CK::pointwise, {1, 2, 0}, TC::order3},
                 {true},
                 [](const StructureAt& at, std::vector<double>& c) {
                   return detail::bilinear_residual(at.geo(), u_transform_jets(at), c);
                 }});
    v.push_back({{"lemma1_item1", "lem1",
                  "(1/2) Delta |grad f|^2 = |Hess f|^2 - Ric(grad f, grad f) + (2/m)|grad f|^2 Delta f - (n-2)<grad lambda, grad f>",
                  CK::pointwise, {3, 3, 1}, TC::order3},
                 {},
                 [](const StructureAt& at, std::vector<double>& c) {
                   return detail::scalar_residual(lemma1_item1_jet(at), c);
                 }});
    v.push_back({{"lemma1_item2", "lem1,equatle",
                  "(1/2) grad R = ((m-1)/m) Ric(grad f) + (1/m)(R - (n-1) lambda) grad f + (n-1) grad lambda",
                  CK::pointwise, {3, 2, 1}, TC::order3},
                 {},
                 [](const StructureAt& at, std::vector<double>& c) {
                   const JetVector w = lemma1_item2_jets(at);
                   double res = detail::covector_residual(at.geo(), w, c);
                   // contracted form against fixed directions Z
                   for (const auto& z : probe_directions(at.dim())) {
                     double wz = 0.0, zz = 0.0;
                     for (int i = 0; i < at.dim(); ++i) wz += w[i].value() * z[i];
                     for (int i = 0; i < at.dim(); ++i)
                       for (int j = 0; j < at.dim(); ++j) zz += at.geo().g(i, j).value() * z[i] * z[j];
                     res = std::max(res, std::abs(wz) / std::sqrt(zz));
                   }
                   return res;
                 }});
    v.push_back({{"lemma1_item3", "lem1",
                  "grad(R + |grad f|^2 - 2(n-1) lambda) = 2 lambda grad f + (2/m){grad_{grad f} grad f + (|grad f|^2 - Delta f) grad f}",
                  CK::pointwise, {3, 3, 1}, TC::order3},
                 {},
                 [](const StructureAt& at, std::vector<double>& c) {
                   return detail::covector_residual(at.geo(), lemma1_item3_jets(at), c);
                 }});
    v.push_back({{"mdivgrad_eq", "eqproteo2", "m div grad f = |grad f|^2 + m (n lambda - R)", CK::pointwise, {2, 2, 0},
                  TC::order3},
                 {},
                 [](const StructureAt& at, std::vector<double>& c) {
                   return detail::scalar_residual(mdivgrad_jet(at), c);
                 }});
    v.push_back({{"laplacian_u_eq", "eqnlapu1", "Delta u = (u/m)(R - lambda n)", CK::pointwise, {2, 2, 0}, TC::order3},
                 {true},
                 [](const StructureAt& at, std::vector<double>& c) {
                   return detail::scalar_residual(laplacian_u_jet(at), c);
                 }});
    v.push_back({{"conformal_grad_u", "conformal", "(1/2) L_{grad u} g = (div grad u / n) g on an Einstein base",
                  CK::pointwise, {1, 2, 0}, TC::order3},
                 {true, true},
                 [](const StructureAt& at, std::vector<double>& c) {
                   const JetVector x = at.geo().gradient(at.u());
                   return detail::bilinear_residual(at.geo(), conformality_jets(at.geo(), x), c);
                 }});
    v.push_back({{"conformal_divergence", "eqnconf2", "div(|X|^2 X) = ((n+2)/n)|X|^2 div X for conformal X = grad u",
                  CK::pointwise, {2, 2, 0}, TC::order3},
                 {true, true},
                 [](const StructureAt& at, std::vector<double>& c) {
                   const JetVector x = at.geo().gradient(at.u());
                   return detail::scalar_residual(conformal_divergence_jet(at.geo(), x), c);
                 }});
    v.push_back({{"lemma4", "lem4",
                  "(1/2) Delta R = -|Hess f - (Delta f/n) g|^2 - ((m+n)/(nm))(Delta f)^2 - (n/2)<grad f, grad lambda> + "
                  "<grad f, grad R> + ((m-2)/(2m))<grad f, grad Delta f> + (1/m) div(grad_{grad f} grad f) + "
                  "(n-1) Delta lambda + lambda Delta f",
                  CK::pointwise, {4, 3, 2}, TC::order4},
                 {},
                 [](const StructureAt& at, std::vector<double>& c) { return detail::scalar_residual(lemma4_jet(at), c); }});
    v.push_back({{"contracted_bianchi", "2bid", "grad R = 2 div Ric", CK::pointwise, {3, 0, 0}, TC::order3},
                 {},
                 [](const StructureAt& at, std::vector<double>& c) {
                   return detail::covector_residual(at.geo(), contracted_bianchi_jets(at.geo()), c);
                 }});
    v.push_back({{"div_dfdf", "divdfodf", "div(df (x) df) = Delta f grad f + grad_{grad f} grad f", CK::pointwise,
                  {2, 3, 0}, TC::order3},
                 {},
                 [](const StructureAt& at, std::vector<double>& c) {
                   return detail::covector_residual(at.geo(), div_dfdf_jets(at.geo(), at.f()), c);
                 }});
    v.push_back({{"div_hessian", "eqbochner1", "div Hess f = Ric(grad f) + grad Delta f", CK::pointwise, {3, 3, 0},
                  TC::order3},
                 {},
                 [](const StructureAt& at, std::vector<double>& c) {
                   return detail::covector_residual(at.geo(), div_hessian_jets(at.geo(), at.f()), c);
                 }});
    v.push_back({{"bochner", "bochnerform",
                  "(1/2) Delta |grad f|^2 = |Hess f|^2 + <grad f, grad Delta f> + Ric(grad f, grad f)", CK::pointwise,
                  {3, 3, 0}, TC::order3},
                 {},
                 [](const StructureAt& at, std::vector<double>& c) {
                   return detail::scalar_residual(bochner_jet(at.geo(), at.f()), c);
                 }});
    v.push_back({{"lie_divergence", "eqbochner",
                  "div(L_X g)(X) = (1/2) Delta |X|^2 - |grad X|^2 + Ric(X, X) + D_X div X,  X = grad f", CK::pointwise,
                  {3, 3, 0}, TC::order3},
                 {},
                 [](const StructureAt& at, std::vector<double>& c) {
                   return detail::scalar_residual(lie_divergence_jet(at.geo(), at.grad_f()), c);
                 }});
    return v;
  }();
  return list;
}

inline const PointwiseIdentity* find_pointwise(const std::string& id) {
  for (const auto& p : pointwise_identities())
    if (p.entry.id == id) return &p;
  return nullptr;
}

/// Evaluates one identity at one point.
inline IdentityResult evaluate_identity(const QemStructure& s, const PointwiseIdentity& identity,
                                        std::span<const double> p, double tol = 0.0) {
  const std::string why = applicability_failure(identity.needs, s);
  if (!why.empty()) throw ArgumentError(identity.entry.id + " " + why);
  const int order = required_order(identity.entry.orders, s.provenance());
  StructureAt at(s, p, order);
  IdentityResult r;
  r.identity_id = identity.entry.id;
  r.point.assign(p.begin(), p.end());
  r.residual = identity.residual(at, r.components);
  r.required_jet_order = order;
  r.tolerance_used = tol;
  return r;
}

inline double lemma1_item1(const QemStructure& s, std::span<const double> p) {
  return evaluate_identity(s, *find_pointwise("lemma1_item1"), p).residual;
}
inline double lemma1_item2(const QemStructure& s, std::span<const double> p) {
  return evaluate_identity(s, *find_pointwise("lemma1_item2"), p).residual;
}
inline double lemma1_item3(const QemStructure& s, std::span<const double> p) {
  return evaluate_identity(s, *find_pointwise("lemma1_item3"), p).residual;
}
inline double lemma4(const QemStructure& s, std::span<const double> p) {
  return evaluate_identity(s, *find_pointwise("lemma4"), p).residual;
}

/// |(1/2) L_X g - (div X / n) g| at p.
inline double conformality_residual(const Chart& chart, const VectorField& x, std::span<const double> p) {
  LocalGeometry geo(chart, p, 2);
  return bilinear_norm(geo, conformality_jets(geo, x(geo.coords())));
}

struct Tolerances {
  double order2 = 1e-8;
  double order3 = 1e-7;
  double order4 = 1e-6;
  double integral = 1e-6;

  double of(ToleranceClass c) const {
    switch (c) {
      case ToleranceClass::order2: return order2;
      case ToleranceClass::order3: return order3;
      case ToleranceClass::order4: return order4;
      case ToleranceClass::integral: return integral;
    }
    return order3;
  }
  Tolerances scaled(double s) const { return {order2 * s, order3 * s, order4 * s, integral * s}; }
};

struct SkippedCheck {
  std::string id;
  std::string reason;
};

struct PointwiseSuiteResult {
  std::vector<ResidualSummary> checks;
  std::vector<SkippedCheck> skipped;
};

/// Runs the selected pointwise identities over a sample, sharing one jet
/// evaluation per point. Results follow catalog order.
inline PointwiseSuiteResult run_pointwise_suite(const QemStructure& s, const std::vector<std::string>& ids,
                                                const PointSet& sample, const Tolerances& tol) {
  if (sample.empty()) throw ArgumentError("pointwise suite needs a nonempty sample");
  PointwiseSuiteResult out;
  std::vector<const PointwiseIdentity*> active;
  int order = 1;
  for (const auto& p : pointwise_identities()) {
    if (std::find(ids.begin(), ids.end(), p.entry.id) == ids.end()) continue;
    const std::string why = applicability_failure(p.needs, s);
    if (!why.empty()) {
      out.skipped.push_back({p.entry.id, why});
      continue;
    }
    active.push_back(&p);
    order = std::max(order, required_order(p.entry.orders, s.provenance()));
  }
  std::vector<ResidualSummary> sums(active.size());
  for (std::size_t k = 0; k < active.size(); ++k) sums[k].id = active[k]->entry.id;
  std::vector<double> comps;
  for (const auto& p : sample) {
    StructureAt at(s, p, order);
    for (std::size_t k = 0; k < active.size(); ++k) {
      const double r = active[k]->residual(at, comps);
      double cmax = 0.0;
      for (double c : comps) cmax = std::max(cmax, std::abs(c));
      sums[k].add(std::isfinite(r) ? r : std::numeric_limits<double>::infinity(), cmax);
    }
  }
  for (std::size_t k = 0; k < active.size(); ++k) sums[k].finish(tol.of(active[k]->entry.tolerance_class));
  out.checks = std::move(sums);
  return out;
}

// ---- sample-level checks ----------------------------------------------------------

inline const std::vector<CatalogEntry>& sample_catalog() {
  static const std::vector<CatalogEntry> list{
      {"lemma_m", "lemM,eqnlapu1,eqngradlambdau",
       "Einstein base, n >= 3: Hess u = (-R u/(n(n-1)) + c/m) g with c constant; Delta u = (R/m) u - (n/m) lambda u; "
       "grad(lambda u) = R (m+n-1)/(n(n-1)) grad u",
       CheckKind::sample, {2, 3, 1}, ToleranceClass::order2},
      {"sign_scan", "thm2", "compact and nontrivial: R - n lambda takes both signs", CheckKind::sample, {2, 2, 0},
       ToleranceClass::order2},
  };
  return list;
}

struct LemmaMReport {
  std::size_t n_points = 0;
  double c_estimate = 0.0;
  double c_spread = 0.0;
  double hessian_residual = 0.0;
  double lap_residual = 0.0;
  double gradlam_residual = 0.0;
};

/// On an Einstein base with n >= 3: Hess u = (-R u/(n(n-1)) + c/m) g with constant c,
/// Delta u = (R/m) u - (n/m) lambda u and grad(lambda u) = R (m+n-1)/(n(n-1)) grad u.
inline LemmaMReport lemma_m(const QemStructure& s, const PointSet& sample) {
  if (s.dim() < 3) throw ArgumentError("lemma_m requires n >= 3");
  if (s.m.is_infinite()) throw ArgumentError("lemma_m requires finite m");
  if (s.chart.family == Family::custom) throw ArgumentError("lemma_m requires an Einstein model chart");
  if (sample.empty()) throw ArgumentError("lemma_m needs a nonempty sample");
  const double n = s.dim();
  const double m = s.m.value();
  const int order = required_order({2, 3, 1}, s.provenance());
  LemmaMReport r;
  r.n_points = sample.size();
  double cmin = std::numeric_limits<double>::infinity(), cmax = -cmin;
  bool first = true;
  for (const auto& p : sample) {
    StructureAt at(s, p, order);
    const auto& geo = at.geo();
    const Jet& u = at.u();
    const Jet& rs = geo.scalar_curvature();
    const JetVector hu = geo.hessian(u);
    const Jet lap = geo.trace(hu);
    const double c = m * (lap.value() / n + rs.value() * u.value() / (n * (n - 1.0)));
    if (first) {
      r.c_estimate = c;
      first = false;
    }
    cmin = std::min(cmin, c);
    cmax = std::max(cmax, c);
    const Jet coef = rs * u * (-1.0 / (n * (n - 1.0))) + r.c_estimate / m;
    JetVector hres = hu;
    for (std::size_t i = 0; i < hres.size(); ++i) hres[i] -= coef * geo.metric()[i];
    r.hessian_residual = std::max(r.hessian_residual, bilinear_norm(geo, hres));
    const Jet lres = lap - rs * u * (1.0 / m) + at.lambda() * u * (n / m);
    r.lap_residual = std::max(r.lap_residual, std::abs(lres.value()));
    const JetVector dlu = geo.differential(at.lambda() * u);
    const JetVector du = geo.differential(u);
    JetVector gres;
    for (int j = 0; j < s.dim(); ++j) gres.push_back(dlu[j] - rs * du[j] * ((m + n - 1.0) / (n * (n - 1.0))));
    r.gradlam_residual = std::max(r.gradlam_residual, covector_norm(geo, gres));
  }
  r.c_spread = cmax - cmin;
  return r;
}

struct SignScan {
  double min = 0.0;
  double max = 0.0;
  bool sign_changes = false;
  bool asserted = false;  // whether the compactness hypothesis holds, so the conclusion applies
};

/// Extremes of R - n lambda over a sample; values within `zero_tol` of 0 count as zero.
inline SignScan sign_scan_R_minus_nlambda(const QemStructure& s, const PointSet& sample, double zero_tol = 1e-10) {
  if (sample.empty()) throw ArgumentError("sign scan needs a nonempty sample");
  SignScan r;
  r.min = std::numeric_limits<double>::infinity();
  r.max = -r.min;
  const int order = required_order({2, 2, 0}, s.provenance());
  for (const auto& p : sample) {
    StructureAt at(s, p, order);
    const double v = at.geo().scalar_curvature().value() - static_cast<double>(s.dim()) * at.lambda().value();
    r.min = std::min(r.min, v);
    r.max = std::max(r.max, v);
  }
  r.sign_changes = r.min < -zero_tol && r.max > zero_tol;
  r.asserted = s.chart.compact();
  return r;
}

}  // namespace gqem
