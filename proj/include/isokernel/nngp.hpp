#pragma once

#include "isokernel/builtins.hpp"
#include "isokernel/kernel.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <stdexcept>

namespace isokernel {

enum class Activation { relu, erf, custom };

/// How F_φ is computed: closed form when one exists, or always by quadrature.
enum class FPhiMethod { automatic, quadrature };

struct NetworkSpec {
  int depth = 1;
  Activation activation = Activation::relu;
  std::function<double(double)> custom;  // used when activation == custom
  bool bias = true;                      // bias variance 1, or no bias at all
  int hermite_nodes = 40;
  FPhiMethod method = FPhiMethod::automatic;

  void validate() const;
};

/// E[max(0, u) max(0, v)] = √(ab) / (2π) J_1(arccos(c / √(ab))).
template <typename Scalar>
Scalar f_phi_closed_relu(Scalar c, Scalar a, Scalar b) {
  using std::sqrt;
  if (a < Scalar(0) || b < Scalar(0)) throw std::domain_error("f_phi: negative variance");
  const Scalar ab = sqrt(a * b);
  if (!(ab > Scalar(0))) return Scalar(0);
  const Scalar t = c / ab;
  using std::abs;
  if (abs(t) > Scalar(1) + Scalar(1e-10)) throw std::domain_error("f_phi: |c| exceeds sqrt(ab)");
  return ab / (2 * boost::math::constants::pi<Scalar>()) * arccos_j1(t);
}

/// E[erf(u) erf(v)] = (2/π) arcsin(2c / √((1 + 2a)(1 + 2b))).
template <typename Scalar>
Scalar f_phi_closed_erf(Scalar c, Scalar a, Scalar b) {
  using std::asin;
  using std::sqrt;
  if (a < Scalar(0) || b < Scalar(0)) throw std::domain_error("f_phi: negative variance");
  using std::abs;
  if (abs(c) > sqrt(a * b) * (Scalar(1) + Scalar(1e-10))) throw std::domain_error("f_phi: |c| exceeds sqrt(ab)");
  Scalar t = 2 * c / sqrt((1 + 2 * a) * (1 + 2 * b));
  if (t > Scalar(1)) t = Scalar(1);
  if (t < Scalar(-1)) t = Scalar(-1);
  return 2 / boost::math::constants::pi<Scalar>() * asin(t);
}

/// E[φ(u) φ(v)] for (u, v) centered Gaussian with Var u = a, Var v = b,
/// Cov = c. Polar product rule: Rayleigh radial nodes times Gauss-Legendre
/// angular panels split where u or v changes sign, `nodes` points each.
double f_phi_quadrature(const std::function<double(double)>& phi, double c, double a, double b, int nodes);

/// F_φ as selected by the spec.
double f_phi(const NetworkSpec& spec, double c, double a, double b);

/// Σ^(L)(x, y) from the invariants r² = ‖x‖², s² = ‖y‖², γ = ⟨x, y⟩.
double nngp_from_invariants(const NetworkSpec& spec, double r, double s, double gamma);

double nngp_eval(const NetworkSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x,
                 const Eigen::Ref<const Eigen::VectorXd>& y);

/// The NNGP covariance as an isotropic kernel; closed-form relu and erf
/// networks also get an extended-precision channel.
IsotropicKernel nngp_as_kernel(const NetworkSpec& spec, Dimension dim = Dimension::infinite());

const char* to_string(Activation a);

}  // namespace isokernel
