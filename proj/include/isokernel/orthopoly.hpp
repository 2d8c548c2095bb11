#pragma once

#include "isokernel/dimension.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace isokernel {

namespace detail {

inline constexpr double kUnitIntervalSlack = 1e-12;

template <typename Scalar>
Scalar clamp_unit(Scalar t) {
  using std::abs;
  if (!(abs(t) <= Scalar(1) + Scalar(kUnitIntervalSlack))) {
    throw std::domain_error("argument of normalized Gegenbauer polynomial outside [-1, 1]");
  }
  if (t > Scalar(1)) return Scalar(1);
  if (t < Scalar(-1)) return Scalar(-1);
  return t;
}

inline void check_degree(int n) {
  if (n < 0) throw std::invalid_argument("polynomial degree must be >= 0 (got " + std::to_string(n) + ")");
}

}  // namespace detail

/// Normalized Gegenbauer polynomials P̄_0..P̄_{n_max} at t, in one pass.
///
/// The recurrence runs directly on the normalized family,
///   P̄_{n+1}(t) = (2(n + λ) t P̄_n(t) - n P̄_{n-1}(t)) / (n + 2λ),
/// which is bounded by 1 on [-1, 1] for every λ >= 0. At λ = 0 it reduces
/// to the Chebyshev recurrence, and at d = inf the family is t^n.
template <typename Scalar>
std::vector<Scalar> normalized_gegenbauer_all(const Dimension& dim, int n_max, Scalar t) {
  detail::check_degree(n_max);
  t = detail::clamp_unit(t);
  std::vector<Scalar> p(static_cast<std::size_t>(n_max) + 1);
  p[0] = Scalar(1);
  if (n_max == 0) return p;
  p[1] = t;
  if (!dim.is_finite()) {
    for (int n = 2; n <= n_max; ++n) p[n] = p[n - 1] * t;
    return p;
  }
  const Scalar lambda = Scalar(dim.value() - 2) / Scalar(2);
  for (int n = 1; n < n_max; ++n) {
    const Scalar nn(n);
    p[n + 1] = (Scalar(2) * (nn + lambda) * t * p[n] - nn * p[n - 1]) / (nn + Scalar(2) * lambda);
  }
  return p;
}

/// P̄_n(t) = C_n^λ(t) / C_n^λ(1) for finite d, t^n for d = inf.
template <typename Scalar>
Scalar normalized_gegenbauer(const Dimension& dim, int n, Scalar t) {
  detail::check_degree(n);
  return normalized_gegenbauer_all(dim, n, t)[static_cast<std::size_t>(n)];
}

/// ‖P̄_n‖²_w under w(ρ) = (1 - ρ²)^(λ - 1/2); finite d only.
double weighted_norm_sq(const Dimension& dim, int n);

}  // namespace isokernel
