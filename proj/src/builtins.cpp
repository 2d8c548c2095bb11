#include "isokernel/builtins.hpp"

#include <boost/math/constants/constants.hpp>

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace isokernel {

void SchoenbergMeasure::validate() const {
  if (atoms.empty()) throw std::invalid_argument("Schoenberg measure needs at least one atom");
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const auto& a = atoms[i];
    if (!std::isfinite(a.scale) || a.scale < 0.0) {
      throw std::invalid_argument("atoms[" + std::to_string(i) + "].scale must be finite and >= 0");
    }
    if (!std::isfinite(a.mass) || a.mass <= 0.0) {
      throw std::invalid_argument("atoms[" + std::to_string(i) + "].mass must be finite and > 0");
    }
  }
}

double SchoenbergMeasure::total_mass() const {
  double m = 0.0;
  for (const auto& a : atoms) m += a.mass;
  return m;
}

IsotropicKernel gaussian_mixture(const SchoenbergMeasure& mu, Dimension dim) {
  mu.validate();
  return IsotropicKernel::generic(dim, "gaussian_mixture", [atoms = mu.atoms](auto r, auto s, auto g) {
    using Scalar = decltype(r);
    using std::exp;
    // r² + s² - 2γ >= 0 on the cone; clamp the roundoff.
    Scalar dist_sq = r * r + s * s - Scalar(2) * g;
    if (dist_sq < Scalar(0)) dist_sq = Scalar(0);
    Scalar out(0);
    for (const auto& a : atoms) {
      const Scalar sc(a.scale);
      out += Scalar(a.mass) * exp(-sc * sc * dist_sq / Scalar(2));
    }
    return out;
  });
}

double gaussian_alpha_analytic(const SchoenbergMeasure& mu, int n, double r, double s) {
  mu.validate();
  if (n < 0) throw std::invalid_argument("degree must be >= 0");
  if (r < 0.0 || s < 0.0) throw std::invalid_argument("radii must be >= 0");
  double out = 0.0;
  for (const auto& a : mu.atoms) {
    const double u = a.scale * r;
    const double v = a.scale * s;
    const double gauss = -0.5 * (u * u + v * v);
    if (n == 0) {
      out += a.mass * std::exp(gauss);
    } else if (u > 0.0 && v > 0.0) {
      out += a.mass * std::exp(gauss + n * std::log(u * v) - std::lgamma(n + 1.0));
    }
  }
  return out;
}

IsotropicKernel dot_product(std::vector<double> coeffs, Dimension dim) {
  if (coeffs.empty()) throw std::invalid_argument("dot_product needs at least one coefficient");
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    if (!std::isfinite(coeffs[i]) || coeffs[i] < 0.0) {
      throw std::invalid_argument("coeffs[" + std::to_string(i) + "] must be finite and >= 0");
    }
  }
  return IsotropicKernel::generic(dim, "dot_product", [a = std::move(coeffs)](auto, auto, auto g) {
    using Scalar = decltype(g);
    Scalar out(0);
    for (auto it = a.rbegin(); it != a.rend(); ++it) out = out * g + Scalar(*it);
    return out;
  });
}

IsotropicKernel constant_kernel(double c, Dimension dim) {
  if (!std::isfinite(c) || c < 0.0) throw std::invalid_argument("constant kernel value must be finite and >= 0");
  return IsotropicKernel::generic(dim, "constant", [c](auto r, auto, auto) { return decltype(r)(c); });
}

IsotropicKernel arccos_kernel(Dimension dim) {
  return IsotropicKernel::generic(dim, "arccos", [](auto r, auto s, auto g) {
    using Scalar = decltype(r);
    const Scalar rs = r * s;
    if (rs == Scalar(0)) return Scalar(0);
    return rs * arccos_j1(g / rs) / boost::math::constants::pi<Scalar>();
  });
}

IsotropicKernel arcsin_kernel(Dimension dim) {
  return IsotropicKernel::generic(dim, "arcsin", [](auto r, auto s, auto g) {
    using std::asin;
    using std::sqrt;
    using Scalar = decltype(r);
    return asin(g / sqrt((Scalar(1) + r * r) * (Scalar(1) + s * s)));
  });
}

namespace {

void check_same_dim(const IsotropicKernel& a, const IsotropicKernel& b) {
  if (!(a.dim() == b.dim())) {
    throw std::invalid_argument("cannot combine kernels of dimension " + a.dim().to_string() + " and " +
                                b.dim().to_string());
  }
}

IsotropicKernel::PreciseEvaluator precise_of(const IsotropicKernel& k) {
  return [k](const Precise& r, const Precise& s, const Precise& g) { return k.precise(r, s, g); };
}

}  // namespace

IsotropicKernel sum(const IsotropicKernel& a, const IsotropicKernel& b) {
  check_same_dim(a, b);
  IsotropicKernel::PreciseEvaluator pa = precise_of(a), pb = precise_of(b);
  IsotropicKernel::PreciseEvaluator precise;
  if (a.has_precise() && b.has_precise()) {
    precise = [pa, pb](const Precise& r, const Precise& s, const Precise& g) { return pa(r, s, g) + pb(r, s, g); };
  }
  return IsotropicKernel(
      a.dim(), "sum(" + a.name() + "," + b.name() + ")",
      [a, b](double r, double s, double g) { return a(r, s, g) + b(r, s, g); }, precise);
}

IsotropicKernel product(const IsotropicKernel& a, const IsotropicKernel& b) {
  check_same_dim(a, b);
  IsotropicKernel::PreciseEvaluator pa = precise_of(a), pb = precise_of(b);
  IsotropicKernel::PreciseEvaluator precise;
  if (a.has_precise() && b.has_precise()) {
    precise = [pa, pb](const Precise& r, const Precise& s, const Precise& g) { return pa(r, s, g) * pb(r, s, g); };
  }
  return IsotropicKernel(
      a.dim(), "product(" + a.name() + "," + b.name() + ")",
      [a, b](double r, double s, double g) { return a(r, s, g) * b(r, s, g); }, precise);
}

IsotropicKernel scale(const IsotropicKernel& k, double factor) {
  if (!std::isfinite(factor) || factor < 0.0) throw std::invalid_argument("scale factor must be finite and >= 0");
  std::ostringstream name;
  name << "scale(" << factor << "," << k.name() << ")";
  IsotropicKernel::PreciseEvaluator precise;
  if (k.has_precise()) {
    precise = [k, factor](const Precise& r, const Precise& s, const Precise& g) {
      return Precise(factor) * k.precise(r, s, g);
    };
  }
  return IsotropicKernel(
      k.dim(), name.str(), [k, factor](double r, double s, double g) { return factor * k(r, s, g); }, precise);
}

}  // namespace isokernel
