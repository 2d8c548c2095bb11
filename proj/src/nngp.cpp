#include "isokernel/nngp.hpp"

#include "isokernel/quadrature.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <vector>

namespace isokernel {

namespace {

struct PolarRules {
  QuadratureRule radial;
  QuadratureRule legendre;
};

const PolarRules& polar_rules(int nodes) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<PolarRules>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[nodes];
  if (!slot) slot = std::make_unique<PolarRules>(PolarRules{gauss_rayleigh(nodes), gauss_gegenbauer(0.5, nodes)});
  return *slot;
}

double wrap_angle(double t) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  t = std::fmod(t, two_pi);
  return t < 0.0 ? t + two_pi : t;
}

template <typename Scalar, typename F>
Scalar recurse(const NetworkSpec& spec, Scalar r, Scalar s, Scalar gamma, F&& f) {
  using std::abs;
  using std::sqrt;
  const Scalar bias = spec.bias ? Scalar(1) : Scalar(0);
  Scalar xy = bias + gamma;
  Scalar xx = bias + r * r;
  Scalar yy = bias + s * s;
  for (int layer = 2; layer <= spec.depth; ++layer) {
    const Scalar nxy = bias + f(xy, xx, yy);
    const Scalar nxx = bias + f(xx, xx, xx);
    const Scalar nyy = bias + f(yy, yy, yy);
    xy = nxy;
    xx = nxx;
    yy = nyy;
    if (!(abs(xy) <= sqrt(xx * yy) * (Scalar(1) + Scalar(1e-10)) + Scalar(1e-300))) {
      throw NumericalError("nngp: covariance exceeds Cauchy-Schwarz bound at layer " + std::to_string(layer));
    }
  }
  return xy;
}

}  // namespace

void NetworkSpec::validate() const {
  if (depth < 1) throw std::invalid_argument("network spec: depth must be >= 1");
  if (hermite_nodes < 8) throw std::invalid_argument("network spec: hermite_nodes must be >= 8");
  if (activation == Activation::custom && !custom) {
    throw std::invalid_argument("network spec: custom activation requires a function");
  }
}

const char* to_string(Activation a) {
  switch (a) {
    case Activation::relu: return "relu";
    case Activation::erf: return "erf";
    case Activation::custom: return "custom";
  }
  return "custom";
}

double f_phi_quadrature(const std::function<double(double)>& phi, double c, double a, double b, int nodes) {
  if (a < 0.0 || b < 0.0) throw std::domain_error("f_phi: negative variance");
  const double bound = std::sqrt(a * b);
  if (std::abs(c) > bound * (1.0 + 1e-10)) throw std::domain_error("f_phi: |c| exceeds sqrt(ab)");
  if (nodes < 8) throw std::invalid_argument("f_phi: need at least 8 nodes");
  c = std::clamp(c, -bound, bound);

  const double l11 = std::sqrt(a);
  const double l21 = a > 0.0 ? c / l11 : 0.0;
  const double l22 = std::sqrt(std::max(0.0, b - l21 * l21));

  std::vector<double> cuts{0.0, 2.0 * std::numbers::pi};
  if (l11 > 0.0) {
    cuts.push_back(0.5 * std::numbers::pi);
    cuts.push_back(1.5 * std::numbers::pi);
  }
  if (l21 != 0.0 || l22 != 0.0) {
    const double t0 = std::atan2(-l21, l22);
    cuts.push_back(wrap_angle(t0));
    cuts.push_back(wrap_angle(t0 + std::numbers::pi));
  }
  std::sort(cuts.begin(), cuts.end());

  const auto& rules = polar_rules(nodes);
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double lo = cuts[k], hi = cuts[k + 1];
    if (hi - lo <= 1e-15) continue;
    const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
    for (Eigen::Index j = 0; j < rules.legendre.size(); ++j) {
      const double theta = mid + half * rules.legendre.nodes[j];
      const double cu = l11 * std::cos(theta);
      const double cv = l21 * std::cos(theta) + l22 * std::sin(theta);
      double radial = 0.0;
      for (Eigen::Index i = 0; i < rules.radial.size(); ++i) {
        const double rho = rules.radial.nodes[i];
        radial += rules.radial.weights[i] * phi(rho * cu) * phi(rho * cv);
      }
      total += half * rules.legendre.weights[j] * radial;
    }
  }
  return total / (2.0 * std::numbers::pi);
}

double f_phi(const NetworkSpec& spec, double c, double a, double b) {
  const bool closed = spec.method == FPhiMethod::automatic;
  switch (spec.activation) {
    case Activation::relu:
      if (closed) return f_phi_closed_relu(c, a, b);
      return f_phi_quadrature([](double u) { return u > 0.0 ? u : 0.0; }, c, a, b, spec.hermite_nodes);
    case Activation::erf:
      if (closed) return f_phi_closed_erf(c, a, b);
      return f_phi_quadrature([](double u) { return std::erf(u); }, c, a, b, spec.hermite_nodes);
    case Activation::custom:
      return f_phi_quadrature(spec.custom, c, a, b, spec.hermite_nodes);
  }
  throw std::invalid_argument("f_phi: unknown activation");
}

double nngp_from_invariants(const NetworkSpec& spec, double r, double s, double gamma) {
  spec.validate();
  return recurse<double>(spec, r, s, gamma, [&](double c, double a, double b) { return f_phi(spec, c, a, b); });
}

double nngp_eval(const NetworkSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x,
                 const Eigen::Ref<const Eigen::VectorXd>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("nngp_eval: x and y differ in length");
  if (!x.allFinite() || !y.allFinite()) throw std::invalid_argument("nngp_eval: non-finite coordinates");
  const double r = x.norm(), s = y.norm();
  double gamma = x.dot(y);
  check_cone(r, s, gamma);
  return nngp_from_invariants(spec, r, s, gamma);
}

IsotropicKernel nngp_as_kernel(const NetworkSpec& spec, Dimension dim) {
  spec.validate();
  std::string name = std::string("nngp_") + to_string(spec.activation) + "_L" + std::to_string(spec.depth) +
                     (spec.bias ? "_bias" : "_nobias");
  IsotropicKernel::Evaluator eval = [spec](double r, double s, double g) {
    return nngp_from_invariants(spec, r, s, g);
  };
  IsotropicKernel::PreciseEvaluator precise;
  if (spec.method == FPhiMethod::automatic && spec.activation != Activation::custom) {
    const bool relu = spec.activation == Activation::relu;
    precise = [spec, relu](const Precise& r, const Precise& s, const Precise& g) {
      return recurse<Precise>(spec, r, s, g, [relu](const Precise& c, const Precise& a, const Precise& b) {
        return relu ? f_phi_closed_relu(c, a, b) : f_phi_closed_erf(c, a, b);
      });
    };
  }
  return IsotropicKernel(dim, std::move(name), std::move(eval), std::move(precise));
}

}  // namespace isokernel
