#pragma once

#include "isokernel/kernel.hpp"
#include <boost/math/constants/constants.hpp>

#include <vector>

namespace isokernel {

/// Finite Schoenberg measure μ = Σ m_i δ_{s_i} mixing Gaussian kernels.
struct SchoenbergAtom {
  double scale = 1.0;  // s_i >= 0
  double mass = 1.0;   // m_i > 0
};

struct SchoenbergMeasure {
  std::vector<SchoenbergAtom> atoms;

  static SchoenbergMeasure dirac(double scale, double mass = 1.0) { return {{{scale, mass}}}; }
  void validate() const;
  double total_mass() const;
};

/// K(x, y) = ∫ exp(-s² ‖x - y‖² / 2) dμ(s), i.e.
/// κ(r, s, γ) = Σ m_i exp(-s_i² (r² + s² - 2γ) / 2).
IsotropicKernel gaussian_mixture(const SchoenbergMeasure& mu, Dimension dim = Dimension::infinite());

/// Closed-form l^2 coefficients of the Gaussian mixture:
/// α_n(r, s) = (1/n!) Σ m_i φ_n(s_i r) φ_n(s_i s) with φ_n(t) = exp(-t²/2) t^n.
double gaussian_alpha_analytic(const SchoenbergMeasure& mu, int n, double r, double s);

/// K(x, y) = Σ a_n ⟨x, y⟩^n with a_n >= 0.
IsotropicKernel dot_product(std::vector<double> coeffs, Dimension dim = Dimension::infinite());

/// K ≡ c, c >= 0.
IsotropicKernel constant_kernel(double c, Dimension dim = Dimension::infinite());

/// K(x, y) = (1/π) ‖x‖ ‖y‖ J_1(θ), θ = arccos(⟨x, y⟩ / (‖x‖ ‖y‖)),
/// J_1(θ) = sin θ + (π - θ) cos θ.
IsotropicKernel arccos_kernel(Dimension dim = Dimension::infinite());

/// K(x, y) = arcsin(⟨x, y⟩ / √((1 + ‖x‖²)(1 + ‖y‖²))).
IsotropicKernel arcsin_kernel(Dimension dim = Dimension::infinite());

IsotropicKernel sum(const IsotropicKernel& a, const IsotropicKernel& b);
IsotropicKernel product(const IsotropicKernel& a, const IsotropicKernel& b);
/// c K for c >= 0.
IsotropicKernel scale(const IsotropicKernel& k, double factor);

/// J_1(θ) = sin θ + (π - θ) cos θ evaluated at θ = arccos(t).
template <typename Scalar>
Scalar arccos_j1(Scalar t) {
  using std::acos;
  using std::sqrt;
  if (t > Scalar(1)) t = Scalar(1);
  if (t < Scalar(-1)) t = Scalar(-1);
  const Scalar pi = boost::math::constants::pi<Scalar>();
  // sin(arccos t) = √(1 - t²)
  return sqrt((Scalar(1) - t) * (Scalar(1) + t)) + (pi - acos(t)) * t;
}

}  // namespace isokernel
