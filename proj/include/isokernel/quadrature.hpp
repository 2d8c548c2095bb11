#pragma once

#include <Eigen/Dense>

#include <span>

namespace isokernel {

enum class WeightKind {
  gegenbauer,  // (1 - x²)^(λ - 1/2) on (-1, 1)
  hermite,     // standard normal density on R
  rayleigh,    // ρ exp(-ρ²/2) on (0, inf)
};

/// Gauss rule: nodes strictly increasing, weights positive, exact for
/// polynomials of degree <= exactness against its weight.
struct QuadratureRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
  WeightKind weight_kind = WeightKind::gegenbauer;
  double lambda = 0.0;  // gegenbauer only
  int exactness = 0;

  Eigen::Index size() const { return nodes.size(); }

  template <typename F>
  double integrate(F&& f) const {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < nodes.size(); ++i) sum += weights[i] * f(nodes[i]);
    return sum;
  }
};

/// Gauss rule from the three-term recurrence of the monic orthogonal
/// polynomials: x π_j = π_{j+1} + a_j π_j + b_j π_{j-1}.
///
/// `a` holds a_0..a_{k-1}, `b` holds b_1..b_k (b_k is only used to polish
/// the nodes) and `mass` is the total mass of the weight. Nodes come from the
/// symmetric tridiagonal (Jacobi) matrix, then get one Newton polish on the
/// orthonormal polynomial; weights are the Christoffel numbers.
QuadratureRule gauss_from_recurrence(std::span<const double> a, std::span<const double> b, double mass);

/// Gauss rule for the Gegenbauer weight (1 - x²)^(λ - 1/2), λ >= 0.
QuadratureRule gauss_gegenbauer(double lambda, int k);

/// Gauss rule for standard-normal expectations: Σ w_i f(x_i) ≈ E[f(Z)].
QuadratureRule gauss_hermite(int k);

/// Gauss rule for the Rayleigh density ρ exp(-ρ²/2) on (0, inf), built by a
/// discretized Stieltjes procedure. Integrates half-line polynomials, which is
/// what the radial part of a polar Gaussian expectation needs.
QuadratureRule gauss_rayleigh(int k);

/// Total mass √π Γ(λ + 1/2) / Γ(λ + 1) of the Gegenbauer weight.
double gegenbauer_weight_mass(double lambda);

}  // namespace isokernel
