#pragma once

// Levi-Civita calculus evaluated pointwise from jets.
//
// LocalGeometry seeds the coordinates of a point at jet order K and carries
// the metric (order K), its inverse (order K), the Christoffel symbols
// (order K-1) and, on demand, Ricci and scalar curvature (order K-2) as jets.
// Every derived tensor is itself a jet, so covariant derivatives of derived
// quantities (grad R, Laplacian of R, div of a vector built from grad f) are
// ordinary partial derivatives plus Christoffel terms. Each operation checks
// that enough order remains and throws CapabilityError otherwise.
//
// Flattened layouts: vectors and covectors [i]; bilinear forms T_ij and
// endomorphisms (grad X)^i_j at [i*n + j]; Gamma^k_ij at [(k*n + i)*n + j].

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chart.hpp"
#include "errors.hpp"
#include "jet.hpp"
#include "tensor.hpp"

namespace gqem {

using JetVector = std::vector<Jet>;

class LocalGeometry {
 public:
  LocalGeometry(const Chart& chart, std::span<const double> point, int order)
      : n_(chart.dim), order_(order), point_(point.begin(), point.end()) {
    if (!chart.contains(point)) throw ArgumentError("point outside the domain of chart " + chart.label);
    if (order < 1 || order > kMaxOrder)
      throw ArgumentError("geometry jet order must lie in [1, " + std::to_string(kMaxOrder) + "]");
    x_ = seed_point(point, order);
    g_ = chart.metric(x_);
    if (static_cast<int>(g_.size()) != n_ * n_)
      throw ArgumentError("metric of chart " + chart.label + " has wrong component count");
    check_positive_definite(chart.label);
    invert_metric();
    build_christoffel();
  }

  int dim() const noexcept { return n_; }
  int order() const noexcept { return order_; }
  const std::vector<double>& point() const noexcept { return point_; }
  Coords coords() const noexcept { return x_; }

  const JetVector& metric() const noexcept { return g_; }
  const JetVector& inverse_metric() const noexcept { return gi_; }
  const JetVector& christoffel() const noexcept { return gamma_; }

  const Jet& g(int i, int j) const { return g_[i * n_ + j]; }
  const Jet& ginv(int i, int j) const { return gi_[i * n_ + j]; }
  const Jet& gamma(int k, int i, int j) const { return gamma_[(k * n_ + i) * n_ + j]; }

  /// Ricci tensor R_ij, jets of order K-2.
  const JetVector& ricci() const {
    require(2, "Ricci curvature");
    if (!ricci_) build_ricci();
    return *ricci_;
  }

  /// Scalar curvature, jet of order K-2.
  const Jet& scalar_curvature() const {
    require(2, "scalar curvature");
    if (!scalar_) {
      const auto& ric = ricci();
      Jet r = zero(order_ - 2);
      for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) r += ginv(i, j) * ric[i * n_ + j];
      scalar_ = r;
    }
    return *scalar_;
  }

  /// Riemann tensor R^a_bcd, jets of order K-2.
  JetVector riemann() const {
    require(2, "Riemann curvature");
    const int n = n_;
    JetVector r(static_cast<std::size_t>(n * n * n * n), zero(order_ - 2));
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c)
          for (int d = 0; d < n; ++d) {
            Jet v = gamma(a, d, b).derivative(c) - gamma(a, c, b).derivative(d);
            for (int e = 0; e < n; ++e) v += gamma(a, c, e) * gamma(e, d, b) - gamma(a, d, e) * gamma(e, c, b);
            r[((a * n + b) * n + c) * n + d] = v;
          }
    return r;
  }

  Jet zero(int order) const { return Jet(n_, order, 0.0); }

  // ---- scalar calculus ------------------------------------------------------

  /// Components d_i phi.
  JetVector differential(const Jet& phi) const {
    need(phi, 1, "differential");
    JetVector d;
    d.reserve(n_);
    for (int i = 0; i < n_; ++i) d.push_back(phi.derivative(i));
    return d;
  }

  JetVector gradient(const Jet& phi) const { return raise(differential(phi)); }

  /// Hess(phi)_ij = d_i d_j phi - Gamma^k_ij d_k phi.
  JetVector hessian(const Jet& phi) const {
    need(phi, 2, "Hessian");
    const JetVector d = differential(phi);
    JetVector h(static_cast<std::size_t>(n_ * n_));
    for (int i = 0; i < n_; ++i)
      for (int j = i; j < n_; ++j) {
        Jet v = d[i].derivative(j);
        for (int k = 0; k < n_; ++k) v -= gamma(k, i, j) * d[k];
        h[i * n_ + j] = v;
        if (j != i) h[j * n_ + i] = v;
      }
    return h;
  }

  Jet laplacian(const Jet& phi) const { return trace(hessian(phi)); }

  // ---- vector calculus ------------------------------------------------------

  /// (grad X)^i_j = d_j X^i + Gamma^i_jk X^k.
  JetVector nabla(const JetVector& x) const {
    need_all(x, 1, "covariant derivative");
    JetVector r(static_cast<std::size_t>(n_ * n_));
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) {
        Jet v = x[i].derivative(j);
        for (int k = 0; k < n_; ++k) v += gamma(i, j, k) * x[k];
        r[i * n_ + j] = v;
      }
    return r;
  }

  /// grad_X Y.
  JetVector directional(const JetVector& x, const JetVector& y) const {
    const JetVector dy = nabla(y);
    JetVector r;
    r.reserve(n_);
    for (int i = 0; i < n_; ++i) {
      Jet v = x[0] * dy[i * n_];
      for (int j = 1; j < n_; ++j) v += x[j] * dy[i * n_ + j];
      r.push_back(v);
    }
    return r;
  }

  Jet divergence(const JetVector& x) const {
    const JetVector dx = nabla(x);
    Jet v = dx[0];
    for (int i = 1; i < n_; ++i) v += dx[i * n_ + i];
    return v;
  }

  /// (div T)_j = g^{ik} (grad_k T)_ij.
  JetVector div_bilinear(const JetVector& t) const {
    need_all(t, 1, "divergence of a (0,2) tensor");
    const int n = n_;
    // grad_k T_ij
    JetVector dt(static_cast<std::size_t>(n * n * n));
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          Jet v = t[i * n + j].derivative(k);
          for (int l = 0; l < n; ++l) v -= gamma(l, k, i) * t[l * n + j] + gamma(l, k, j) * t[i * n + l];
          dt[(k * n + i) * n + j] = v;
        }
    JetVector r;
    r.reserve(n);
    for (int j = 0; j < n; ++j) {
      Jet v = zero(dt[0].order());
      for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) v += ginv(i, k) * dt[(k * n + i) * n + j];
      r.push_back(v);
    }
    return r;
  }

  /// (L_X g)_ij = X^k d_k g_ij + g_kj d_i X^k + g_ik d_j X^k.
  JetVector lie_metric(const JetVector& x) const {
    need_all(x, 1, "Lie derivative of the metric");
    const int n = n_;
    JetVector dx(static_cast<std::size_t>(n * n));  // [k*n + i] = d_i X^k
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i) dx[k * n + i] = x[k].derivative(i);
    JetVector r(static_cast<std::size_t>(n * n));
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        Jet v = zero(dx[0].order());
        for (int k = 0; k < n; ++k)
          v += x[k] * g(i, j).derivative(k) + g(k, j) * dx[k * n + i] + g(i, k) * dx[k * n + j];
        r[i * n + j] = v;
        if (j != i) r[j * n + i] = v;
      }
    return r;
  }

  // ---- index gymnastics and contractions -------------------------------------

  JetVector raise(const JetVector& w) const { return matvec(gi_, w); }
  JetVector lower(const JetVector& x) const { return matvec(g_, x); }

  /// <X, Y> for vectors.
  Jet dot(const JetVector& x, const JetVector& y) const { return bilinear(g_, x, y); }
  /// <a, b> for covectors.
  Jet dot_covectors(const JetVector& a, const JetVector& b) const { return bilinear(gi_, a, b); }

  /// T(X, Y).
  Jet bilinear(const JetVector& t, const JetVector& x, const JetVector& y) const {
    Jet s = zero(std::min({t[0].order(), x[0].order(), y[0].order()}));
    for (int i = 0; i < n_; ++i) {
      Jet row = t[i * n_] * y[0];
      for (int j = 1; j < n_; ++j) row += t[i * n_ + j] * y[j];
      s += x[i] * row;
    }
    return s;
  }

  /// T(X, .) as a covector.
  JetVector contract(const JetVector& t, const JetVector& x) const {
    JetVector r;
    r.reserve(n_);
    for (int j = 0; j < n_; ++j) {
      Jet v = t[j] * x[0];
      for (int i = 1; i < n_; ++i) v += t[i * n_ + j] * x[i];
      r.push_back(v);
    }
    return r;
  }

  /// g^{ij} T_ij.
  Jet trace(const JetVector& t) const {
    Jet s = zero(t[0].order());
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) s += ginv(i, j) * t[i * n_ + j];
    return s;
  }

  /// |T|^2 = g^{ik} g^{jl} T_ij T_kl.
  Jet norm2_bilinear(const JetVector& t) const {
    const JetVector a = matmul(gi_, t);  // a^i_j = g^ik T_kj
    Jet s = zero(a[0].order());
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) s += a[i * n_ + j] * a[j * n_ + i];
    return s;
  }

  /// |A|^2 = g_ij g^{kl} A^i_k A^j_l for an endomorphism.
  Jet norm2_endomorphism(const JetVector& a) const {
    const JetVector low = matmul(g_, a);  // A_jk = g_ji A^i_k
    Jet s = zero(low[0].order());
    for (int j = 0; j < n_; ++j)
      for (int k = 0; k < n_; ++k) {
        Jet col = zero(a[0].order());
        for (int l = 0; l < n_; ++l) col += ginv(k, l) * a[j * n_ + l];
        s += low[j * n_ + k] * col;
      }
    return s;
  }

  /// Fails with CapabilityError unless the metric carries `needed` orders.
  void require(int needed, const char* what) const {
    if (order_ < needed) throw CapabilityError(what, needed, order_);
  }

 private:
  static void need(const Jet& j, int needed, const char* what) {
    if (j.order() < needed) throw CapabilityError(what, needed, j.order());
  }
  static void need_all(const JetVector& v, int needed, const char* what) {
    for (const auto& j : v) need(j, needed, what);
  }

  JetVector matvec(const JetVector& m, const JetVector& v) const {
    JetVector r;
    r.reserve(n_);
    for (int i = 0; i < n_; ++i) {
      Jet s = m[i * n_] * v[0];
      for (int j = 1; j < n_; ++j) s += m[i * n_ + j] * v[j];
      r.push_back(s);
    }
    return r;
  }

  JetVector matmul(const JetVector& a, const JetVector& b) const {
    JetVector r(static_cast<std::size_t>(n_ * n_));
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) {
        Jet s = a[i * n_] * b[j];
        for (int k = 1; k < n_; ++k) s += a[i * n_ + k] * b[k * n_ + j];
        r[i * n_ + j] = s;
      }
    return r;
  }

  void check_positive_definite(const std::string& label) const {
    // Cholesky on the values
    std::vector<double> l(static_cast<std::size_t>(n_ * n_), 0.0);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j <= i; ++j) {
        double s = g(i, j).value();
        if (std::abs(s - g(j, i).value()) > 1e-12 * (1.0 + std::abs(s)))
          throw DegeneracyError("metric of chart " + label + " is not symmetric");
        for (int k = 0; k < j; ++k) s -= l[i * n_ + k] * l[j * n_ + k];
        if (i == j) {
          if (!(s > 0.0)) throw DegeneracyError("metric of chart " + label + " is not positive definite at the point");
          l[i * n_ + i] = std::sqrt(s);
        } else {
          l[i * n_ + j] = s / l[j * n_ + j];
        }
      }
  }

  void invert_metric() {
    // Gauss-Jordan on jets; no pivoting needed for a positive definite matrix.
    const int n = n_;
    JetVector a = g_;
    gi_.assign(static_cast<std::size_t>(n * n), zero(order_));
    for (int i = 0; i < n; ++i) gi_[i * n + i] += 1.0;
    for (int c = 0; c < n; ++c) {
      const Jet inv = reciprocal(a[c * n + c]);
      for (int j = 0; j < n; ++j) {
        a[c * n + j] = a[c * n + j] * inv;
        gi_[c * n + j] = gi_[c * n + j] * inv;
      }
      for (int r = 0; r < n; ++r) {
        if (r == c) continue;
        const Jet f = a[r * n + c];
        if (f.value() == 0.0 && is_zero(f)) continue;
        for (int j = 0; j < n; ++j) {
          a[r * n + j] -= f * a[c * n + j];
          gi_[r * n + j] -= f * gi_[c * n + j];
        }
      }
    }
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        Jet s = (gi_[i * n + j] + gi_[j * n + i]) * 0.5;
        gi_[i * n + j] = s;
        gi_[j * n + i] = s;
      }
  }

  static bool is_zero(const Jet& j) {
    for (double c : j.coefficients())
      if (c != 0.0) return false;
    return true;
  }

  void build_christoffel() {
    const int n = n_;
    // dg[(l*n + i)*n + j] = d_l g_ij
    JetVector dg(static_cast<std::size_t>(n * n * n));
    for (int l = 0; l < n; ++l)
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
          dg[(l * n + i) * n + j] = g(i, j).derivative(l);
          if (j != i) dg[(l * n + j) * n + i] = dg[(l * n + i) * n + j];
        }
    auto d = [&](int l, int i, int j) -> const Jet& { return dg[(l * n + i) * n + j]; };
    // first kind: Gamma_lij = (d_i g_jl + d_j g_il - d_l g_ij) / 2
    JetVector first(static_cast<std::size_t>(n * n * n));
    for (int l = 0; l < n; ++l)
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) first[(l * n + i) * n + j] = (d(i, j, l) + d(j, i, l) - d(l, i, j)) * 0.5;
    gamma_.assign(static_cast<std::size_t>(n * n * n), zero(order_ - 1));
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
          Jet s = zero(order_ - 1);
          for (int l = 0; l < n; ++l) s += ginv(k, l) * first[(l * n + i) * n + j];
          gamma_[(k * n + i) * n + j] = s;
          if (j != i) gamma_[(k * n + j) * n + i] = s;
        }
  }

  void build_ricci() const {
    // R_ij = d_k Gamma^k_ij - d_j Gamma^k_ik + Gamma^k_kl Gamma^l_ij - Gamma^k_jl Gamma^l_ik
    const int n = n_;
    JetVector contracted;  // Gamma^k_ik
    for (int i = 0; i < n; ++i) {
      Jet s = zero(order_ - 1);
      for (int k = 0; k < n; ++k) s += gamma(k, i, k);
      contracted.push_back(s);
    }
    JetVector r(static_cast<std::size_t>(n * n));
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        Jet v = contracted[i].derivative(j) * -1.0;
        for (int k = 0; k < n; ++k) v += gamma(k, i, j).derivative(k);
        for (int l = 0; l < n; ++l) v += contracted[l] * gamma(l, i, j);
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) v -= gamma(k, j, l) * gamma(l, i, k);
        r[i * n + j] = v;
        if (j != i) r[j * n + i] = v;
      }
    ricci_ = std::move(r);
  }

  int n_;
  int order_;
  std::vector<double> point_;
  JetVector x_;
  JetVector g_;
  JetVector gi_;
  JetVector gamma_;
  mutable std::optional<JetVector> ricci_;
  mutable std::optional<Jet> scalar_;
};

// ---- value-level API ------------------------------------------------------------

inline std::vector<double> values(const JetVector& v) {
  std::vector<double> r;
  r.reserve(v.size());
  for (const auto& j : v) r.push_back(j.value());
  return r;
}

inline TensorValue to_tensor(const LocalGeometry& geo, Valence valence, const JetVector& v) {
  return TensorValue(geo.dim(), valence, values(v), geo.point());
}

inline TensorValue metric_tensor(const Chart& chart, std::span<const double> p) {
  LocalGeometry geo(chart, p, 1);
  return to_tensor(geo, kBilinear, geo.metric());
}

inline TensorValue christoffel(const Chart& chart, std::span<const double> p) {
  LocalGeometry geo(chart, p, 1);
  return to_tensor(geo, Valence{1, 2}, geo.christoffel());
}

inline TensorValue riemann(const Chart& chart, std::span<const double> p) {
  LocalGeometry geo(chart, p, 2);
  return to_tensor(geo, Valence{1, 3}, geo.riemann());
}

inline TensorValue ricci(const Chart& chart, std::span<const double> p) {
  LocalGeometry geo(chart, p, 2);
  return to_tensor(geo, kBilinear, geo.ricci());
}

inline double scalar_curvature(const Chart& chart, std::span<const double> p) {
  LocalGeometry geo(chart, p, 2);
  return geo.scalar_curvature().value();
}

inline TensorValue gradient(const Chart& chart, const ScalarField& phi, std::span<const double> p) {
  LocalGeometry geo(chart, p, 1);
  return to_tensor(geo, kVector, geo.gradient(phi(geo.coords())));
}

inline TensorValue hessian(const Chart& chart, const ScalarField& phi, std::span<const double> p) {
  LocalGeometry geo(chart, p, 2);
  return to_tensor(geo, kBilinear, geo.hessian(phi(geo.coords())));
}

inline double laplacian(const Chart& chart, const ScalarField& phi, std::span<const double> p) {
  LocalGeometry geo(chart, p, 2);
  return geo.laplacian(phi(geo.coords())).value();
}

inline TensorValue covariant_derivative_vector(const Chart& chart, const VectorField& x,
                                               std::span<const double> p) {
  LocalGeometry geo(chart, p, 1);
  return to_tensor(geo, kEndomorphism, geo.nabla(x(geo.coords())));
}

inline TensorValue directional(const Chart& chart, const VectorField& x, const VectorField& y,
                               std::span<const double> p) {
  LocalGeometry geo(chart, p, 1);
  return to_tensor(geo, kVector, geo.directional(x(geo.coords()), y(geo.coords())));
}

inline double div_vector(const Chart& chart, const VectorField& x, std::span<const double> p) {
  LocalGeometry geo(chart, p, 1);
  return geo.divergence(x(geo.coords())).value();
}

inline TensorValue div_tensor2(const Chart& chart, const BilinearField& t, std::span<const double> p) {
  LocalGeometry geo(chart, p, 1);
  return to_tensor(geo, kCovector, geo.div_bilinear(t(geo.coords())));
}

inline TensorValue lie_metric(const Chart& chart, const VectorField& x, std::span<const double> p) {
  LocalGeometry geo(chart, p, 1);
  return to_tensor(geo, kBilinear, geo.lie_metric(x(geo.coords())));
}

namespace detail {

// Applies the n x n matrix m to tensor index `slot` of a row-major rank-r array.
inline std::vector<double> apply_on_slot(std::span<const double> t, int n, int rank, int slot,
                                         std::span<const double> m) {
  const std::size_t inner = ipow(n, rank - slot - 1);
  const std::size_t outer = ipow(n, slot);
  std::vector<double> r(t.size(), 0.0);
  for (std::size_t o = 0; o < outer; ++o)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        const double w = m[a * n + b];
        if (w == 0.0) continue;
        for (std::size_t in = 0; in < inner; ++in)
          r[(o * n + a) * inner + in] += w * t[(o * n + b) * inner + in];
      }
  return r;
}

}  // namespace detail

/// Full contraction <A, B> using g on contravariant and g^-1 on covariant slots.
inline double inner(const Chart& chart, const TensorValue& a, const TensorValue& b,
                    std::span<const double> p) {
  if (a.valence() != b.valence() || a.dim() != b.dim())
    throw ArgumentError("inner: valence mismatch " + a.valence().to_string() + " vs " +
                        b.valence().to_string());
  if (a.dim() != chart.dim) throw ArgumentError("inner: tensor dimension does not match chart");
  LocalGeometry geo(chart, p, 1);
  const auto g = values(geo.metric());
  const auto gi = values(geo.inverse_metric());
  const int rank = a.rank();
  std::vector<double> t(b.components().begin(), b.components().end());
  for (int slot = 0; slot < rank; ++slot)
    t = detail::apply_on_slot(t, a.dim(), rank, slot, slot < a.valence().contravariant ? g : gi);
  double s = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) s += a[i] * t[i];
  return s;
}

inline double tensor_norm2(const Chart& chart, const TensorValue& t, std::span<const double> p) {
  return std::max(0.0, inner(chart, t, t, p));
}

}  // namespace gqem
