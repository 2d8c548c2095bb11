#include "isokernel/orthopoly.hpp"

#include "isokernel/quadrature.hpp"

namespace isokernel {

double weighted_norm_sq(const Dimension& dim, int n) {
  detail::check_degree(n);
  if (!dim.is_finite()) {
    throw std::invalid_argument("weighted_norm_sq is undefined for d = inf");
  }
  // n + 2 nodes integrate degree 2n + 3 exactly.
  const QuadratureRule rule = gauss_gegenbauer(dim.lambda(), n + 2);
  return rule.integrate([&](double x) {
    const double p = normalized_gegenbauer(dim, n, x);
    return p * p;
  });
}

}  // namespace isokernel
