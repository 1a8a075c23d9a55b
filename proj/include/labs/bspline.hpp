#pragma once

// Single B-spline basis functions on private knot vectors.
//
// Every atom of a LABS mean function owns its own knot vector of length k+2,
// so evaluation works one basis function at a time: the Cox-de Boor
// triangle is rebuilt per call over the k+1 degree-0 indicators of that
// vector. Templated on the scalar so the same code path can be driven in
// extended precision by the finite-difference smoothness checks.

#include <algorithm>
#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "labs/types.hpp"

namespace lbs {

template <typename T>
class BasicKnotVector {
 public:
  BasicKnotVector() = default;

  /// Throws PreconditionError unless `knots` has degree+2 non-descending entries.
  BasicKnotVector(int degree, std::vector<T> knots)
      : degree_(degree), knots_(std::move(knots)) {
    require(degree_ >= 0, "KnotVector: degree must be non-negative");
    require(knots_.size() == static_cast<std::size_t>(degree_) + 2,
            "KnotVector: degree " + std::to_string(degree_) + " needs " +
                std::to_string(degree_ + 2) + " knots, got " +
                std::to_string(knots_.size()));
    for (std::size_t i = 0; i + 1 < knots_.size(); ++i) {
      require(knots_[i] <= knots_[i + 1], "KnotVector: knots must be non-descending");
    }
  }

  int degree() const { return degree_; }
  std::size_t size() const { return knots_.size(); }
  const std::vector<T>& knots() const { return knots_; }
  std::span<const T> span() const { return knots_; }
  const T& operator[](std::size_t i) const { return knots_[i]; }
  const T& front() const { return knots_.front(); }
  const T& back() const { return knots_.back(); }

  template <typename U>
  bool within(U lo, U hi) const {
    return !knots_.empty() && knots_.front() >= lo && knots_.back() <= hi;
  }
  bool within(const Interval& d) const { return within(d.lo, d.hi); }

  /// Replaces knot i; the caller keeps the ordering (relocation proposals
  /// are drawn between the neighbours).
  void set(std::size_t i, T value) { knots_[i] = value; }

  friend bool operator==(const BasicKnotVector&, const BasicKnotVector&) = default;

 private:
  int degree_ = 0;
  std::vector<T> knots_;
};

typedef BasicKnotVector<Scalar> KnotVector;

namespace detail {

// Cox-de Boor triangle on t[0..k+1]; `work` must hold k+1 entries.
template <typename T>
T cox_de_boor(std::span<const T> t, const T& x, std::span<T> work) {
  const std::size_t k = t.size() - 2;
  for (std::size_t j = 0; j <= k; ++j) {
    work[j] = (t[j] <= x && x < t[j + 1]) ? T(1) : T(0);
  }
  for (std::size_t d = 1; d <= k; ++d) {
    for (std::size_t j = 0; j + d <= k; ++j) {
      T value(0);
      const T left_den = t[j + d] - t[j];
      if (left_den != T(0) && work[j] != T(0)) value += (x - t[j]) / left_den * work[j];
      const T right_den = t[j + d + 1] - t[j + 1];
      if (right_den != T(0) && work[j + 1] != T(0))
        value += (t[j + d + 1] - x) / right_den * work[j + 1];
      work[j] = value;
    }
  }
  return work[0];
}

}  // namespace detail

/// B_k(x; t) for a raw knot span of length k+2. Support is [t_0, t_{k+1});
/// zero-denominator terms vanish.
template <typename T>
T eval_basis(std::span<const T> t, const T& x) {
  if (t.size() < 2) throw PreconditionError("eval_basis: need at least two knots");
  if (!(x >= t.front() && x < t.back())) return T(0);
  constexpr std::size_t kStack = 16;
  const std::size_t k = t.size() - 2;
  T value;
  if (k + 1 <= kStack) {
    std::array<T, kStack> work;
    value = detail::cox_de_boor(t, x, std::span<T>(work.data(), k + 1));
  } else {
    std::vector<T> work(k + 1);
    value = detail::cox_de_boor(t, x, std::span<T>(work));
  }
  // Rounding can push a single basis a few ulp past one.
  return value > T(1) ? T(1) : value;
}

template <typename T>
T eval_basis(const BasicKnotVector<T>& kv, const T& x) {
  return eval_basis(kv.span(), x);
}

/// Exact integral of B_k over its support, (t_{k+1} - t_0)/(k+1).
template <typename T>
T basis_integral(const BasicKnotVector<T>& kv) {
  return (kv.back() - kv.front()) / T(kv.degree() + 1);
}

/// Basis values at every entry of `xs`.
inline Vector basis_column(const KnotVector& kv, const Vector& xs) {
  return xs.unaryExpr([&kv](Scalar x) { return eval_basis(kv, x); });
}

/// Indices [begin, end) of the sorted abscissae that fall in [t_0, t_{k+1}).
inline std::pair<Index, Index> support_range(const KnotVector& kv, const Vector& sorted_xs) {
  const Scalar* first = sorted_xs.data();
  const Scalar* last = first + sorted_xs.size();
  const Scalar* lo = std::lower_bound(first, last, kv.front());
  const Scalar* hi = std::lower_bound(lo, last, kv.back());
  return {static_cast<Index>(lo - first), static_cast<Index>(hi - first)};
}

}  // namespace lbs
