#pragma once

#include "isokernel/dimension.hpp"
#include "isokernel/precision.hpp"

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <string>
#include <utility>

namespace isokernel {

/// Continuous isotropic kernel K(x, y) = κ(‖x‖, ‖y‖, ⟨x, y⟩) on R^d.
///
/// κ lives on the cone M = {(r, s, γ) : r, s >= 0, |γ| <= r s}. Every
/// evaluation validates the triple: |γ| up to r s (1 + 1e-12) is clamped onto
/// the cone, anything further out is a domain error.
///
/// A kernel carries a double evaluator and, when the construction allows it,
/// an extended-precision evaluator of the same κ. The precise channel falls
/// back to the double one when absent.
class IsotropicKernel {
 public:
  using Evaluator = std::function<double(double, double, double)>;
  using PreciseEvaluator = std::function<Precise(const Precise&, const Precise&, const Precise&)>;

  IsotropicKernel(Dimension dim, std::string name, Evaluator kappa, PreciseEvaluator precise = {});

  /// Builds both channels from one scalar-generic callable `f(r, s, γ)`.
  template <typename F>
  static IsotropicKernel generic(Dimension dim, std::string name, F f) {
    auto shared = std::make_shared<const F>(std::move(f));
    return IsotropicKernel(
        dim, std::move(name), [shared](double r, double s, double g) { return (*shared)(r, s, g); },
        [shared](const Precise& r, const Precise& s, const Precise& g) { return (*shared)(r, s, g); });
  }

  double operator()(double r, double s, double gamma) const;
  Precise precise(const Precise& r, const Precise& s, const Precise& gamma) const;
  bool has_precise() const { return static_cast<bool>(precise_); }

  /// K(x, y) from coordinates. For d = inf any common length is accepted
  /// (finite vectors embed into l^2); for finite d the length must equal d.
  double at_points(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y) const;

  const Dimension& dim() const { return dim_; }
  const std::string& name() const { return name_; }

  /// Same κ, tagged with another ambient dimension.
  IsotropicKernel in_dimension(Dimension dim) const;

 private:
  Dimension dim_;
  std::string name_;
  Evaluator kappa_;
  PreciseEvaluator precise_;
};

/// Clamps (r, s, γ) onto the cone M; throws std::domain_error outside the slack.
void check_cone(double r, double s, double& gamma);
void check_cone(const Precise& r, const Precise& s, Precise& gamma);

}  // namespace isokernel
