#pragma once

// Truncated multivariate Taylor arithmetic.
//
// A Jet of dimension n and order K holds every partial derivative d^alpha of a
// scalar at a fixed base point for |alpha| <= K. Coefficients store the
// derivative itself, not the normalized Taylor coefficient d^alpha / alpha!.
// Products use the multivariate Leibniz rule; elementary functions are applied
// by composing their univariate derivative sequence with powers of the
// zero-valued remainder (a - a(x0)), so every operation is exact for the
// represented derivatives.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "multi_index.hpp"

namespace gqem {

class Jet {
 public:
  Jet() noexcept = default;

  /// Constant jet: value `value`, every derivative zero.
  Jet(int dim, int order, double value = 0.0) : table_(&checked_table(dim)), order_(order) {
    if (order < 0 || order > kMaxOrder)
      throw ArgumentError("jet order must lie in [0, " + std::to_string(kMaxOrder) + "]");
    std::fill_n(c_, size(), 0.0);
    c_[0] = value;
  }

  Jet(const Jet& o) noexcept : table_(o.table_), order_(o.order_) {
    std::copy_n(o.c_, o.size(), c_);
  }
  Jet& operator=(const Jet& o) noexcept {
    table_ = o.table_;
    order_ = o.order_;
    std::copy_n(o.c_, o.size(), c_);
    return *this;
  }

  /// Independent variable x_axis seeded at x0.
  static Jet variable(int axis, double x0, int dim, int order) {
    if (dim < 1 || dim > kMaxDim)
      throw ArgumentError("jet dimension must lie in [1, " + std::to_string(kMaxDim) + "]");
    if (order < 1 || order > kMaxOrder)
      throw ArgumentError("seeded jet order must lie in [1, " + std::to_string(kMaxOrder) + "]");
    if (axis < 0 || axis >= dim)
      throw ArgumentError("axis " + std::to_string(axis) + " out of range for dimension " +
                          std::to_string(dim));
    Jet j(dim, order, x0);
    MultiIndex e{};
    e[axis] = 1;
    j.c_[j.table_->index_of(e)] = 1.0;
    return j;
  }

  int dim() const noexcept { return table_ ? table_->dim() : 0; }
  int order() const noexcept { return order_; }
  int size() const noexcept { return table_ ? table_->count(order_) : 0; }
  bool empty() const noexcept { return table_ == nullptr; }

  double value() const noexcept { return c_[0]; }
  /// Raw coefficient in graded layout.
  double coeff(int idx) const noexcept { return c_[idx]; }
  double& coeff(int idx) noexcept { return c_[idx]; }
  std::span<const double> coefficients() const noexcept {
    return {c_, static_cast<std::size_t>(size())};
  }
  const detail::MultiIndexTable& table() const noexcept { return *table_; }

  /// d^alpha of the represented function at the base point.
  double partial(std::span<const int> alpha) const {
    if (static_cast<int>(alpha.size()) != dim())
      throw ArgumentError("multi-index length " + std::to_string(alpha.size()) +
                          " does not match jet dimension " + std::to_string(dim()));
    MultiIndex a{};
    int total = 0;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
      if (alpha[i] < 0) throw ArgumentError("multi-index entries must be nonnegative");
      total += alpha[i];
      if (total > order_) break;
      a[i] = static_cast<std::uint8_t>(alpha[i]);
    }
    if (total > order_)
      throw ArgumentError("partial of total order " + std::to_string(total) +
                          " exceeds jet order " + std::to_string(order_));
    return c_[table_->index_of(a)];
  }
  double partial(std::initializer_list<int> alpha) const {
    return partial(std::span<const int>(alpha.begin(), alpha.size()));
  }

  /// First partial derivative along `axis` as a jet one order lower.
  Jet derivative(int axis) const {
    if (order_ < 1) throw CapabilityError("derivative", 1, order_);
    if (axis < 0 || axis >= dim()) throw ArgumentError("derivative axis out of range");
    Jet r;
    r.table_ = table_;
    r.order_ = order_ - 1;
    const int n = r.size();
    for (int idx = 0; idx < n; ++idx) r.c_[idx] = c_[table_->shifted(axis, idx)];
    return r;
  }

  /// Drop every coefficient above `order`.
  Jet truncated(int order) const {
    if (order < 0 || order > order_) throw ArgumentError("truncation order out of range");
    Jet r(*this);
    r.order_ = order;
    return r;
  }

  Jet operator-() const noexcept {
    Jet r(*this);
    for (int i = 0, n = size(); i < n; ++i) r.c_[i] = -r.c_[i];
    return r;
  }

  Jet& operator+=(const Jet& b) {
    conform(b);
    for (int i = 0, n = size(); i < n; ++i) c_[i] += b.c_[i];
    return *this;
  }
  Jet& operator-=(const Jet& b) {
    conform(b);
    for (int i = 0, n = size(); i < n; ++i) c_[i] -= b.c_[i];
    return *this;
  }
  Jet& operator+=(double s) noexcept {
    c_[0] += s;
    return *this;
  }
  Jet& operator-=(double s) noexcept {
    c_[0] -= s;
    return *this;
  }
  Jet& operator*=(double s) noexcept {
    for (int i = 0, n = size(); i < n; ++i) c_[i] *= s;
    return *this;
  }
  Jet& operator*=(const Jet& b) {
    *this = *this * b;
    return *this;
  }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator+(Jet a, double s) noexcept { return a += s; }
  friend Jet operator+(double s, Jet a) noexcept { return a += s; }
  friend Jet operator-(Jet a, double s) noexcept { return a -= s; }
  friend Jet operator-(double s, const Jet& a) noexcept { return (-a) += s; }
  friend Jet operator*(Jet a, double s) noexcept { return a *= s; }
  friend Jet operator*(double s, Jet a) noexcept { return a *= s; }
  friend Jet operator/(Jet a, double s) {
    if (s == 0.0) throw DomainError("division: zero divisor");
    return a *= 1.0 / s;
  }

  friend Jet operator*(const Jet& a, const Jet& b) {
    check_dims(a, b, "multiplication");
    Jet r;
    r.table_ = a.table_;
    r.order_ = std::min(a.order_, b.order_);
    const auto offsets = a.table_->leibniz_offsets();
    const auto terms = a.table_->leibniz_upto(r.order_);
    const int n = r.size();
    for (int idx = 0; idx < n; ++idx) {
      double s = 0.0;
      for (int t = offsets[idx]; t < offsets[idx + 1]; ++t)
        s += terms[t].weight * a.c_[terms[t].left] * b.c_[terms[t].right];
      r.c_[idx] = s;
    }
    return r;
  }

  friend Jet reciprocal(const Jet& a) {
    const double v = a.value();
    if (v == 0.0) throw DomainError("division: zero value coefficient");
    double d[kMaxOrder + 1];
    double p = 1.0 / v;
    for (int k = 0; k <= a.order_; ++k) {
      d[k] = p;  // (-1)^k k! / v^(k+1)
      p *= -(k + 1) / v;
    }
    return compose(a, d);
  }

  friend Jet operator/(const Jet& a, const Jet& b) {
    check_dims(a, b, "division");
    return a * reciprocal(b);
  }
  friend Jet operator/(double s, const Jet& b) { return reciprocal(b) *= s; }

  friend Jet exp(const Jet& a) {
    double d[kMaxOrder + 1];
    std::fill_n(d, a.order_ + 1, std::exp(a.value()));
    return compose(a, d);
  }

  friend Jet log(const Jet& a) {
    const double v = a.value();
    if (!(v > 0.0)) throw DomainError("ln: nonpositive value coefficient " + std::to_string(v));
    double d[kMaxOrder + 1];
    d[0] = std::log(v);
    double p = 1.0 / v;
    for (int k = 1; k <= a.order_; ++k) {
      d[k] = p;  // (-1)^(k-1) (k-1)! / v^k
      p *= -k / v;
    }
    return compose(a, d);
  }

  friend Jet sqrt(const Jet& a) {
    if (!(a.value() > 0.0))
      throw DomainError("sqrt: nonpositive value coefficient " + std::to_string(a.value()));
    return pow(a, 0.5);
  }

  friend Jet pow(const Jet& a, double p) {
    const double v = a.value();
    const bool natural = p >= 0.0 && std::floor(p) == p;
    if (natural && p <= 16.0) {
      Jet r(a.dim(), a.order_, 1.0);
      Jet base = a;
      for (auto e = static_cast<unsigned>(p); e; e >>= 1) {
        if (e & 1u) r = r * base;
        if (e > 1u) base = base * base;
      }
      return r;
    }
    if (!(v > 0.0))
      throw DomainError("pow: nonpositive base " + std::to_string(v) + " with exponent " +
                        std::to_string(p));
    double d[kMaxOrder + 1];
    double falling = 1.0;
    for (int k = 0; k <= a.order_; ++k) {
      d[k] = falling * std::pow(v, p - k);
      falling *= p - k;
    }
    return compose(a, d);
  }

  friend Jet sin(const Jet& a) {
    const double s = std::sin(a.value()), c = std::cos(a.value());
    const double cycle[4] = {s, c, -s, -c};
    double d[kMaxOrder + 1];
    for (int k = 0; k <= a.order_; ++k) d[k] = cycle[k % 4];
    return compose(a, d);
  }

  friend Jet cos(const Jet& a) {
    const double s = std::sin(a.value()), c = std::cos(a.value());
    const double cycle[4] = {c, -s, -c, s};
    double d[kMaxOrder + 1];
    for (int k = 0; k <= a.order_; ++k) d[k] = cycle[k % 4];
    return compose(a, d);
  }

  friend Jet sinh(const Jet& a) {
    const double s = std::sinh(a.value()), c = std::cosh(a.value());
    double d[kMaxOrder + 1];
    for (int k = 0; k <= a.order_; ++k) d[k] = (k % 2 == 0) ? s : c;
    return compose(a, d);
  }

  friend Jet cosh(const Jet& a) {
    const double s = std::sinh(a.value()), c = std::cosh(a.value());
    double d[kMaxOrder + 1];
    for (int k = 0; k <= a.order_; ++k) d[k] = (k % 2 == 0) ? c : s;
    return compose(a, d);
  }

 private:
  static const detail::MultiIndexTable& checked_table(int dim) {
    if (dim < 1 || dim > kMaxDim)
      throw ArgumentError("jet dimension must lie in [1, " + std::to_string(kMaxDim) + "]");
    return multi_index_table(dim);
  }

  static void check_dims(const Jet& a, const Jet& b, const char* op) {
    if (a.table_ != b.table_ || a.table_ == nullptr)
      throw ArgumentError(std::string(op) + ": jet dimension mismatch (" +
                          std::to_string(a.dim()) + " vs " + std::to_string(b.dim()) + ")");
  }

  // Mixed-order operands truncate to the lower order.
  void conform(const Jet& b) {
    check_dims(*this, b, "addition");
    order_ = std::min(order_, b.order_);
  }

  // phi(a) = sum_k d[k] / k! * (a - a0)^k, with d[k] = phi^(k)(a0).
  static Jet compose(const Jet& a, const double* d) {
    Jet rem(a);
    rem.c_[0] = 0.0;
    Jet r(a.dim(), a.order_, d[0]);
    if (a.order_ == 0) return r;
    Jet power = rem;
    double inv_fact = 1.0;
    for (int k = 1; k <= a.order_; ++k) {
      inv_fact /= k;
      const double w = d[k] * inv_fact;
      for (int i = 1, n = r.size(); i < n; ++i) r.c_[i] += w * power.c_[i];
      if (k < a.order_) power = power * rem;
    }
    return r;
  }

  const detail::MultiIndexTable* table_ = nullptr;
  int order_ = 0;
  double c_[kMaxCoeffs];
};

/// Independent variable x_axis at x0 in `dim` variables with derivative order `order`.
inline Jet seed_variable(int axis, double x0, int dim, int order) {
  return Jet::variable(axis, x0, dim, order);
}

/// Seeds every coordinate of `point` as an independent variable.
inline std::vector<Jet> seed_point(std::span<const double> point, int order) {
  const int n = static_cast<int>(point.size());
  std::vector<Jet> x;
  x.reserve(point.size());
  for (int i = 0; i < n; ++i) x.push_back(Jet::variable(i, point[i], n, order));
  return x;
}

}  // namespace gqem
