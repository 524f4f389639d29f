#pragma once

// Generalized m-quasi-Einstein structures (g, f, m, lambda):
//   Ric + Hess f - (1/m) df (x) df = lambda g,   0 < m <= infinity.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "chart.hpp"
#include "errors.hpp"
#include "geometry.hpp"
#include "tensor.hpp"

namespace gqem {

/// The parameter m, with m = infinity kept as an exact state (1/m = 0).
class SyntheticDimension {
 public:
  static SyntheticDimension finite(double m) {
    if (!(m > 0.0) || !std::isfinite(m)) throw ArgumentError("m must be a positive real or infinity");
    return SyntheticDimension(m);
  }
  static SyntheticDimension infinite() noexcept { return SyntheticDimension(); }

  bool is_infinite() const noexcept { return !value_; }
  bool is_finite() const noexcept { return value_.has_value(); }
  double value() const {
    if (!value_) throw CapabilityError("m is infinite; a finite m is required");
    return *value_;
  }
  /// 1/m, exactly zero for m = infinity.
  double inverse() const noexcept { return value_ ? 1.0 / *value_ : 0.0; }

  std::string str() const;

  friend bool operator==(const SyntheticDimension&, const SyntheticDimension&) = default;

 private:
  SyntheticDimension() = default;
  explicit SyntheticDimension(double m) : value_(m) {}
  std::optional<double> value_;
};

inline std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  // shortest representation that round-trips
  for (int prec = 1; prec <= 17; ++prec) {
    char tmp[32];
    std::snprintf(tmp, sizeof tmp, "%.*g", prec, v);
    if (std::strtod(tmp, nullptr) == v) return tmp;
  }
  return buf;
}

inline std::string SyntheticDimension::str() const { return value_ ? format_real(*value_) : "inf"; }

enum class LambdaProvenance { closed_form, trace_solved };

inline const char* to_string(LambdaProvenance p) {
  return p == LambdaProvenance::closed_form ? "closed_form" : "trace_solved";
}

struct QemStructure {
  Chart chart;
  ScalarField f;
  SyntheticDimension m = SyntheticDimension::infinite();
  /// Closed-form lambda; empty means lambda is solved from the trace identity pointwise.
  std::optional<ScalarField> lambda;
  std::string label;

  LambdaProvenance provenance() const noexcept {
    return lambda ? LambdaProvenance::closed_form : LambdaProvenance::trace_solved;
  }
  int dim() const noexcept { return chart.dim; }
};

inline QemStructure make_structure(Chart chart, ScalarField f, SyntheticDimension m,
                                   std::optional<ScalarField> lambda = std::nullopt,
                                   std::string label = {}) {
  QemStructure s{std::move(chart), std::move(f), m, std::move(lambda), std::move(label)};
  if (s.label.empty()) s.label = s.chart.label;
  return s;
}

/// Everything about a structure at one point, as jets of the requested order.
///
/// With metric order K: df carries K-1 orders, Hess f and Delta f carry K-2,
/// and a trace-solved lambda carries K-2 (it contains R and Delta f).
class StructureAt {
 public:
  StructureAt(const QemStructure& s, std::span<const double> p, int order)
      : s_(&s), geo_(s.chart, p, order), f_(s.f(geo_.coords())) {}

  const QemStructure& structure() const noexcept { return *s_; }
  const LocalGeometry& geo() const noexcept { return geo_; }
  int dim() const noexcept { return geo_.dim(); }
  double inv_m() const noexcept { return s_->m.inverse(); }

  const Jet& f() const noexcept { return f_; }

  const Jet& lambda() const {
    if (!lambda_) {
      if (s_->lambda) {
        lambda_ = (*s_->lambda)(geo_.coords());
      } else {
        geo_.require(2, "trace-solved lambda");
        lambda_ = (geo_.scalar_curvature() + lap_f() - grad_f_norm2() * inv_m()) * (1.0 / dim());
      }
    }
    return *lambda_;
  }

  const JetVector& df() const { return cache(df_, [&] { return geo_.differential(f_); }); }
  const JetVector& grad_f() const { return cache(grad_f_, [&] { return geo_.raise(df()); }); }
  const JetVector& hess_f() const { return cache(hess_f_, [&] { return geo_.hessian(f_); }); }
  const Jet& lap_f() const { return cache(lap_f_, [&] { return geo_.trace(hess_f()); }); }
  const Jet& grad_f_norm2() const {
    return cache(grad_f_norm2_, [&] { return geo_.dot_covectors(df(), df()); });
  }

  /// u = exp(-f/m); requires finite m.
  const Jet& u() const {
    if (s_->m.is_infinite()) throw CapabilityError("u = exp(-f/m) requires finite m");
    return cache(u_, [&] { return exp(f_ * (-inv_m())); });
  }

  /// df (x) df as a bilinear form.
  JetVector df_outer() const {
    const int n = dim();
    const auto& d = df();
    JetVector r(static_cast<std::size_t>(n * n));
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        r[i * n + j] = d[i] * d[j];
        if (j != i) r[j * n + i] = r[i * n + j];
      }
    return r;
  }

 private:
  template <class T, class Make>
  const T& cache(std::optional<T>& slot, Make make) const {
    if (!slot) slot = make();
    return *slot;
  }

  const QemStructure* s_;
  LocalGeometry geo_;
  Jet f_;
  mutable std::optional<Jet> lambda_;
  mutable std::optional<JetVector> df_, grad_f_, hess_f_;
  mutable std::optional<Jet> lap_f_, grad_f_norm2_, u_;
};

// ---- small jet-tensor helpers -------------------------------------------------

inline JetVector axpy(const JetVector& a, double s, const JetVector& b) {
  JetVector r = a;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += b[i] * s;
  return r;
}

inline JetVector scaled(const JetVector& a, const Jet& s) {
  JetVector r;
  r.reserve(a.size());
  for (const auto& v : a) r.push_back(v * s);
  return r;
}

/// Invariant norm of a bilinear residual.
inline double bilinear_norm(const LocalGeometry& geo, const JetVector& t) {
  const double v = geo.norm2_bilinear(t).value();
  return std::sqrt(std::max(0.0, v));
}

/// Invariant norm of a covector residual.
inline double covector_norm(const LocalGeometry& geo, const JetVector& w) {
  return std::sqrt(std::max(0.0, geo.dot_covectors(w, w).value()));
}

/// Invariant norm of a vector residual.
inline double vector_norm(const LocalGeometry& geo, const JetVector& x) {
  return std::sqrt(std::max(0.0, geo.dot(x, x).value()));
}

// ---- structure tensors at a point (jet level) ----------------------------------

/// Ric + Hess f - (1/m) df (x) df.
inline JetVector bakry_emery_jets(const StructureAt& at) {
  const auto& geo = at.geo();
  geo.require(2, "Bakry-Emery Ricci tensor");
  JetVector r = geo.ricci();
  const auto& h = at.hess_f();
  const JetVector dd = at.df_outer();
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = r[i] + h[i] - dd[i] * at.inv_m();
  return r;
}

/// Ric_f - lambda g.
inline JetVector defining_residual_jets(const StructureAt& at) {
  JetVector r = bakry_emery_jets(at);
  const auto& g = at.geo().metric();
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= at.lambda() * g[i];
  return r;
}

/// Hess f - (Delta f / n) g - (1/m)(df (x) df - |grad f|^2 g / n) + (Ric - R g / n).
inline JetVector traceless_residual_jets(const StructureAt& at) {
  const auto& geo = at.geo();
  geo.require(2, "traceless residual");
  const double n = at.dim();
  const auto& g = geo.metric();
  const auto& h = at.hess_f();
  const auto& ric = geo.ricci();
  const JetVector dd = at.df_outer();
  const Jet scalar = (at.lap_f() - at.grad_f_norm2() * at.inv_m() + geo.scalar_curvature()) * (1.0 / n);
  JetVector r(h.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = h[i] - dd[i] * at.inv_m() + ric[i] - scalar * g[i];
  return r;
}

// ---- value-level operations ---------------------------------------------------

inline TensorValue bakry_emery_ricci(const QemStructure& s, std::span<const double> p) {
  StructureAt at(s, p, 2);
  return to_tensor(at.geo(), kBilinear, bakry_emery_jets(at));
}

/// lambda = (R + Delta f - |grad f|^2 / m) / n.
inline double solve_lambda(const Chart& chart, const ScalarField& f, SyntheticDimension m,
                           std::span<const double> p) {
  const QemStructure s = make_structure(chart, f, m);
  StructureAt at(s, p, 2);
  return at.lambda().value();
}

inline TensorValue defining_residual(const QemStructure& s, std::span<const double> p) {
  StructureAt at(s, p, 2);
  return to_tensor(at.geo(), kBilinear, defining_residual_jets(at));
}

inline TensorValue traceless_residual(const QemStructure& s, std::span<const double> p) {
  StructureAt at(s, p, 2);
  return to_tensor(at.geo(), kBilinear, traceless_residual_jets(at));
}

/// Hess f - (1/m) df (x) df + (m/u) Hess u; vanishes for every smooth f.
inline JetVector u_transform_jets(const StructureAt& at) {
  const double m = at.structure().m.value();
  const auto& h = at.hess_f();
  const JetVector hu = at.geo().hessian(at.u());
  const JetVector dd = at.df_outer();
  const Jet w = reciprocal(at.u()) * m;
  JetVector r(h.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = h[i] - dd[i] * at.inv_m() + w * hu[i];
  return r;
}

inline TensorValue u_transform_residual(const QemStructure& s, std::span<const double> p) {
  if (s.m.is_infinite()) throw CapabilityError("u-transform residual requires finite m");
  StructureAt at(s, p, 2);
  return to_tensor(at.geo(), kBilinear, u_transform_jets(at));
}

/// Ric(grad f, grad f) + <grad_{grad f} grad f, grad f> - |grad f|^4 / m - lambda |grad f|^2.
inline Jet radial_identity_jet(const StructureAt& at) {
  const auto& geo = at.geo();
  const auto& v = at.grad_f();
  const Jet ric = geo.bilinear(geo.ricci(), v, v);
  const Jet hv = geo.bilinear(at.hess_f(), v, v);
  const Jet& q = at.grad_f_norm2();
  return ric + hv - q * q * at.inv_m() - at.lambda() * q;
}

inline double radial_identity_residual(const QemStructure& s, std::span<const double> p) {
  StructureAt at(s, p, 2);
  return radial_identity_jet(at).value();
}

// ---- summaries ----------------------------------------------------------------

struct ResidualSummary {
  std::string id;
  std::size_t n_points = 0;
  double max_residual = 0.0;    // invariant norm
  double mean_residual = 0.0;
  double max_component = 0.0;   // coordinate-frame sup
  double tolerance = 0.0;
  bool pass = false;

  void add(double residual, double component) {
    ++n_points;
    max_residual = std::max(max_residual, residual);
    mean_residual += (residual - mean_residual) / static_cast<double>(n_points);
    max_component = std::max(max_component, component);
  }
  void finish(double tol) {
    tolerance = tol;
    pass = n_points > 0 && max_residual < tol && std::isfinite(max_residual);
  }
};

struct GqemReport {
  ResidualSummary defining;
  ResidualSummary traceless;
  bool pass = false;
};

using PointSet = std::vector<std::vector<double>>;

/// Checks the defining equation and its traceless form over a sample.
inline GqemReport is_gqem(const QemStructure& s, const PointSet& sample, double tol) {
  if (sample.empty()) throw ArgumentError("is_gqem: sample must be nonempty");
  GqemReport r;
  r.defining.id = "defining_eq";
  r.traceless.id = "traceless_eq";
  for (const auto& p : sample) {
    StructureAt at(s, p, 2);
    const JetVector d = defining_residual_jets(at);
    const JetVector t = traceless_residual_jets(at);
    r.defining.add(bilinear_norm(at.geo(), d), to_tensor(at.geo(), kBilinear, d).max_abs());
    r.traceless.add(bilinear_norm(at.geo(), t), to_tensor(at.geo(), kBilinear, t).max_abs());
  }
  r.defining.finish(tol);
  r.traceless.finish(tol);
  r.pass = r.defining.pass && r.traceless.pass;
  return r;
}

// ---- degenerate rank-one equation ---------------------------------------------

enum class RankOneOutcome { zero, impossible };

struct RankOneResult {
  RankOneOutcome outcome;
  double rho = 0.0;                  // only meaningful for `zero`
  double norm2 = 0.0;                // |v|^2 in the metric
  std::vector<double> eigenvalues;   // of v (x) v relative to g, ascending
  double eigen_gap = 0.0;            // largest - smallest
};

/// Decides whether v (x) v = rho g is solvable at a point: only by v = 0, since
/// v (x) v has rank <= 1 < n.
inline RankOneResult rank_one_proportionality(std::span<const double> v, const TensorValue& g, double tol) {
  g.require(kBilinear, "rank_one_proportionality");
  const int n = g.dim();
  if (n < 2) throw ArgumentError("rank_one_proportionality needs dimension >= 2");
  if (static_cast<int>(v.size()) != n) throw ArgumentError("rank_one_proportionality: covector length mismatch");
  Eigen::MatrixXd gm(n, n), vv(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      gm(i, j) = g(i, j);
      vv(i, j) = v[i] * v[j];
    }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(vv, gm);
  if (es.info() != Eigen::Success) throw DegeneracyError("rank_one_proportionality: metric not positive definite");
  RankOneResult r{RankOneOutcome::impossible};
  const Eigen::VectorXd ev = es.eigenvalues();
  r.eigenvalues.assign(ev.data(), ev.data() + n);
  r.eigen_gap = ev.maxCoeff() - ev.minCoeff();
  r.norm2 = gm.ldlt().solve(Eigen::Map<const Eigen::VectorXd>(v.data(), n)).dot(
      Eigen::Map<const Eigen::VectorXd>(v.data(), n));
  if (std::sqrt(std::max(0.0, r.norm2)) < tol) {
    r.outcome = RankOneOutcome::zero;
    r.rho = 0.0;
  }
  return r;
}

}  // namespace gqem
