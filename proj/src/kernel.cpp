#include "isokernel/kernel.hpp"

#include <cmath>
#include <stdexcept>

namespace isokernel {

namespace {

constexpr double kConeSlack = 1e-12;

template <typename Scalar>
void check_cone_impl(const Scalar& r, const Scalar& s, Scalar& gamma) {
  using std::abs;
  using std::isfinite;
  if (!(r >= 0) || !(s >= 0) || !isfinite(r) || !isfinite(s) || !isfinite(gamma)) {
    throw std::domain_error("kernel arguments must be finite with r, s >= 0");
  }
  const Scalar bound = r * s;
  if (abs(gamma) > bound * (1 + Scalar(kConeSlack))) {
    throw std::domain_error("kernel argument outside the cone |gamma| <= r s");
  }
  if (gamma > bound) gamma = bound;
  if (gamma < -bound) gamma = -bound;
}

}  // namespace

void check_cone(double r, double s, double& gamma) { check_cone_impl(r, s, gamma); }
void check_cone(const Precise& r, const Precise& s, Precise& gamma) { check_cone_impl(r, s, gamma); }

IsotropicKernel::IsotropicKernel(Dimension dim, std::string name, Evaluator kappa, PreciseEvaluator precise)
    : dim_(dim), name_(std::move(name)), kappa_(std::move(kappa)), precise_(std::move(precise)) {
  if (!kappa_) throw std::invalid_argument("IsotropicKernel requires an evaluator");
}

double IsotropicKernel::operator()(double r, double s, double gamma) const {
  check_cone(r, s, gamma);
  return kappa_(r, s, gamma);
}

Precise IsotropicKernel::precise(const Precise& r, const Precise& s, const Precise& gamma) const {
  Precise g = gamma;
  check_cone(r, s, g);
  if (precise_) return precise_(r, s, g);
  return Precise(kappa_(static_cast<double>(r), static_cast<double>(s), static_cast<double>(g)));
}

double IsotropicKernel::at_points(const Eigen::Ref<const Eigen::VectorXd>& x,
                                  const Eigen::Ref<const Eigen::VectorXd>& y) const {
  if (x.size() != y.size()) throw std::invalid_argument("points have different lengths");
  if (dim_.is_finite() && x.size() != dim_.value()) {
    throw std::invalid_argument("point length " + std::to_string(x.size()) + " does not match dimension " +
                                dim_.to_string());
  }
  if (!x.allFinite() || !y.allFinite()) throw std::invalid_argument("points must have finite coordinates");
  return (*this)(x.norm(), y.norm(), x.dot(y));
}

IsotropicKernel IsotropicKernel::in_dimension(Dimension dim) const {
  IsotropicKernel copy = *this;
  copy.dim_ = dim;
  return copy;
}

}  // namespace isokernel
