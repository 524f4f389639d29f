#pragma once

// Dense tensors at a point with valence bookkeeping.
//
// Components are stored row-major with contravariant indices first, then
// covariant ones: Gamma^k_ij lives at [k][i][j], R^a_bcd at [a][b][c][d].

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"

namespace gqem {

struct Valence {
  int contravariant = 0;
  int covariant = 0;

  int rank() const noexcept { return contravariant + covariant; }
  friend bool operator==(const Valence&, const Valence&) = default;
  std::string to_string() const {
    return "(" + std::to_string(contravariant) + "," + std::to_string(covariant) + ")";
  }
};

inline constexpr Valence kScalar{0, 0};
inline constexpr Valence kVector{1, 0};
inline constexpr Valence kCovector{0, 1};
inline constexpr Valence kBilinear{0, 2};
inline constexpr Valence kEndomorphism{1, 1};

inline std::size_t ipow(int n, int k) {
  std::size_t r = 1;
  for (int i = 0; i < k; ++i) r *= static_cast<std::size_t>(n);
  return r;
}

class TensorValue {
 public:
  TensorValue() = default;
  TensorValue(int dim, Valence valence, std::vector<double> point = {})
      : dim_(dim), valence_(valence), components_(ipow(dim, valence.rank()), 0.0),
        point_(std::move(point)) {}
  TensorValue(int dim, Valence valence, std::vector<double> components, std::vector<double> point)
      : dim_(dim), valence_(valence), components_(std::move(components)), point_(std::move(point)) {
    if (components_.size() != ipow(dim, valence.rank()))
      throw ArgumentError("tensor component count " + std::to_string(components_.size()) +
                          " does not match n^rank = " +
                          std::to_string(ipow(dim, valence.rank())));
  }

  int dim() const noexcept { return dim_; }
  Valence valence() const noexcept { return valence_; }
  int rank() const noexcept { return valence_.rank(); }
  const std::vector<double>& point() const noexcept { return point_; }
  std::span<const double> components() const noexcept { return components_; }
  std::span<double> components() noexcept { return components_; }

  double& operator[](std::size_t flat) { return components_[flat]; }
  double operator[](std::size_t flat) const { return components_[flat]; }

  double& operator()(int i) { return components_[i]; }
  double operator()(int i) const { return components_[i]; }
  double& operator()(int i, int j) { return components_[i * dim_ + j]; }
  double operator()(int i, int j) const { return components_[i * dim_ + j]; }
  double& operator()(int i, int j, int k) { return components_[(i * dim_ + j) * dim_ + k]; }
  double operator()(int i, int j, int k) const { return components_[(i * dim_ + j) * dim_ + k]; }
  double& operator()(int a, int b, int c, int d) {
    return components_[((a * dim_ + b) * dim_ + c) * dim_ + d];
  }
  double operator()(int a, int b, int c, int d) const {
    return components_[((a * dim_ + b) * dim_ + c) * dim_ + d];
  }

  /// Largest absolute component in the coordinate frame.
  double max_abs() const noexcept {
    double m = 0.0;
    for (double c : components_) m = std::max(m, std::abs(c));
    return m;
  }

  void require(Valence v, const char* op) const {
    if (valence_ != v)
      throw ArgumentError(std::string(op) + ": expected valence " + v.to_string() + ", got " +
                          valence_.to_string());
  }

  TensorValue& operator+=(const TensorValue& o) {
    same_shape(o, "tensor addition");
    for (std::size_t i = 0; i < components_.size(); ++i) components_[i] += o.components_[i];
    return *this;
  }
  TensorValue& operator-=(const TensorValue& o) {
    same_shape(o, "tensor subtraction");
    for (std::size_t i = 0; i < components_.size(); ++i) components_[i] -= o.components_[i];
    return *this;
  }
  TensorValue& operator*=(double s) noexcept {
    for (double& c : components_) c *= s;
    return *this;
  }
  friend TensorValue operator+(TensorValue a, const TensorValue& b) { return a += b; }
  friend TensorValue operator-(TensorValue a, const TensorValue& b) { return a -= b; }
  friend TensorValue operator*(TensorValue a, double s) { return a *= s; }
  friend TensorValue operator*(double s, TensorValue a) { return a *= s; }

 private:
  void same_shape(const TensorValue& o, const char* op) const {
    if (dim_ != o.dim_ || valence_ != o.valence_)
      throw ArgumentError(std::string(op) + ": valence mismatch " + valence_.to_string() +
                          " vs " + o.valence_.to_string());
  }

  int dim_ = 0;
  Valence valence_{};
  std::vector<double> components_;
  std::vector<double> point_;
};

/// Tensor product v (x) w; valences add.
inline TensorValue outer(const TensorValue& v, const TensorValue& w) {
  if (v.dim() != w.dim()) throw ArgumentError("outer: dimension mismatch");
  const Valence val{v.valence().contravariant + w.valence().contravariant,
                    v.valence().covariant + w.valence().covariant};
  if (v.valence().covariant > 0 && w.valence().contravariant > 0)
    throw ArgumentError("outer: left operand must not carry covariant indices when the right "
                        "carries contravariant ones");
  TensorValue r(v.dim(), val, v.point());
  const auto a = v.components();
  const auto b = w.components();
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i * b.size() + j] = a[i] * b[j];
  return r;
}

}  // namespace gqem
