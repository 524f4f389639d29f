#pragma once

// Dense multi-index tables for truncated Taylor arithmetic.
//
// Coefficients of a jet are laid out in graded order: all multi-indices of
// total degree 0, then degree 1, and so on up to kMaxOrder. A jet of order K
// therefore occupies a prefix of the order-kMaxOrder layout, which makes
// truncation a prefix cut and keeps index lookup independent of K.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace gqem {

inline constexpr int kMaxDim = 5;
inline constexpr int kMaxOrder = 4;
// C(kMaxDim + kMaxOrder, kMaxOrder)
inline constexpr int kMaxCoeffs = 126;

using MultiIndex = std::array<std::uint8_t, kMaxDim>;

namespace detail {

struct LeibnizTerm {
  std::uint16_t left;
  std::uint16_t right;
  double weight;  // prod_i binom(alpha_i, beta_i)
};

class MultiIndexTable {
 public:
  explicit MultiIndexTable(int dim) : dim_(dim) {
    lookup_.fill(-1);
    for (int deg = 0; deg <= kMaxOrder; ++deg) {
      MultiIndex a{};
      enumerate(a, 0, deg);
      count_upto_[deg] = static_cast<int>(alphas_.size());
    }
    for (int axis = 0; axis < dim_; ++axis) {
      shift_[axis].assign(alphas_.size(), -1);
      for (std::size_t idx = 0; idx < alphas_.size(); ++idx) {
        MultiIndex b = alphas_[idx];
        if (degree(b) == kMaxOrder) continue;
        ++b[axis];
        shift_[axis][idx] = lookup_[key(b)];
      }
    }
    leibniz_begin_.push_back(0);
    for (const auto& alpha : alphas_) {
      // enumerate beta <= alpha componentwise
      MultiIndex beta{};
      add_leibniz(alpha, beta, 0);
      leibniz_begin_.push_back(static_cast<int>(terms_.size()));
    }
  }

  int dim() const noexcept { return dim_; }
  int count(int order) const noexcept { return count_upto_[order]; }
  const MultiIndex& alpha(int idx) const noexcept { return alphas_[idx]; }

  int index_of(const MultiIndex& a) const noexcept { return lookup_[key(a)]; }
  // index of alpha + e_axis, or -1 past kMaxOrder
  int shifted(int axis, int idx) const noexcept { return shift_[axis][idx]; }

  std::span<const LeibnizTerm> leibniz(int idx) const noexcept {
    return {terms_.data() + leibniz_begin_[idx],
            static_cast<std::size_t>(leibniz_begin_[idx + 1] - leibniz_begin_[idx])};
  }
  // all terms for multi-indices [0, count(order))
  std::span<const LeibnizTerm> leibniz_upto(int order) const noexcept {
    return {terms_.data(), static_cast<std::size_t>(leibniz_begin_[count(order)])};
  }
  std::span<const int> leibniz_offsets() const noexcept { return leibniz_begin_; }

  static int degree(const MultiIndex& a) noexcept {
    int s = 0;
    for (auto v : a) s += v;
    return s;
  }

 private:
  static int key(const MultiIndex& a) noexcept {
    int k = 0;
    for (int i = kMaxDim - 1; i >= 0; --i) k = k * (kMaxOrder + 1) + a[i];
    return k;
  }

  void enumerate(MultiIndex& a, int axis, int remaining) {
    if (axis == dim_ - 1) {
      a[axis] = static_cast<std::uint8_t>(remaining);
      lookup_[key(a)] = static_cast<int>(alphas_.size());
      alphas_.push_back(a);
      a[axis] = 0;
      return;
    }
    for (int v = remaining; v >= 0; --v) {
      a[axis] = static_cast<std::uint8_t>(v);
      enumerate(a, axis + 1, remaining - v);
    }
    a[axis] = 0;
  }

  void add_leibniz(const MultiIndex& alpha, MultiIndex& beta, int axis) {
    if (axis == dim_) {
      MultiIndex rest{};
      double w = 1.0;
      for (int i = 0; i < dim_; ++i) {
        rest[i] = static_cast<std::uint8_t>(alpha[i] - beta[i]);
        w *= binomial(alpha[i], beta[i]);
      }
      terms_.push_back({static_cast<std::uint16_t>(lookup_[key(beta)]),
                        static_cast<std::uint16_t>(lookup_[key(rest)]), w});
      return;
    }
    for (int v = 0; v <= alpha[axis]; ++v) {
      beta[axis] = static_cast<std::uint8_t>(v);
      add_leibniz(alpha, beta, axis + 1);
    }
    beta[axis] = 0;
  }

  static double binomial(int n, int k) noexcept {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
  }

  int dim_;
  std::vector<MultiIndex> alphas_;
  std::array<int, kMaxOrder + 1> count_upto_{};
  std::array<int, 3125> lookup_{};
  std::array<std::vector<int>, kMaxDim> shift_;
  std::vector<LeibnizTerm> terms_;
  std::vector<int> leibniz_begin_;
};

}  // namespace detail

/// Shared, lazily built table for dimension `dim` (1..kMaxDim).
inline const detail::MultiIndexTable& multi_index_table(int dim) {
  static const std::array<detail::MultiIndexTable, kMaxDim> tables = [] {
    return std::array<detail::MultiIndexTable, kMaxDim>{
        detail::MultiIndexTable(1), detail::MultiIndexTable(2), detail::MultiIndexTable(3),
        detail::MultiIndexTable(4), detail::MultiIndexTable(5)};
  }();
  return tables[dim - 1];
}

}  // namespace gqem
