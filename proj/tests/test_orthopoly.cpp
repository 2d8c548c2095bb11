#include "isokernel/orthopoly.hpp"
#include "isokernel/quadrature.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/legendre.hpp>
#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace isokernel;

namespace {

// C_n^λ on the unnormalized three-term recurrence, divided by the same
// recurrence at t = 1.
double gegenbauer_ratio(double lambda, int n, double t) {
  auto c = [lambda, n](double x) {
    double prev = 1.0, cur = 2.0 * lambda * x;
    if (n == 0) return prev;
    for (int k = 1; k < n; ++k) {
      const double next = (2.0 * (k + lambda) * x * cur - (k + 2.0 * lambda - 1.0) * prev) / (k + 1.0);
      prev = cur;
      cur = next;
    }
    return cur;
  };
  return c(t) / c(1.0);
}

std::vector<Dimension> regimes() {
  return {Dimension::finite(2), Dimension::finite(3), Dimension::finite(4), Dimension::finite(7),
          Dimension::finite(50), Dimension::infinite()};
}

}  // namespace

TEST_CASE("spot values") {
  CHECK(normalized_gegenbauer(Dimension::finite(5), 0, 0.3) == 1.0);
  CHECK(normalized_gegenbauer(Dimension::infinite(), 3, 0.5) == 0.125);
  CHECK(normalized_gegenbauer(Dimension::finite(3), 2, 0.5) == doctest::Approx(-0.125).epsilon(1e-15));
  CHECK(normalized_gegenbauer(Dimension::finite(3), 2, 0.5) == doctest::Approx(boost::math::legendre_p(2, 0.5)));
  CHECK(normalized_gegenbauer(Dimension::finite(2), 3, std::cos(0.7)) == doctest::Approx(std::cos(2.1)).epsilon(1e-14));
}

TEST_CASE("batch matches single evaluation") {
  const auto a = normalized_gegenbauer_all(Dimension::finite(3), 2, 1.0);
  CHECK(a == std::vector<double>{1.0, 1.0, 1.0});
  CHECK(normalized_gegenbauer_all(Dimension::infinite(), 4, 0.0) == std::vector<double>{1, 0, 0, 0, 0});
  const auto b = normalized_gegenbauer_all(Dimension::finite(3), 2, 0.5);
  CHECK(b[1] == 0.5);
  CHECK(b[2] == doctest::Approx(-0.125));
  for (const auto& dim : regimes()) {
    for (double t : {-0.93, -0.2, 0.0, 0.41, 0.999}) {
      const auto all = normalized_gegenbauer_all(dim, 25, t);
      for (int n = 0; n <= 25; ++n) CHECK(std::abs(all[n] - normalized_gegenbauer(dim, n, t)) <= 1e-13);
    }
  }
}

TEST_CASE("recurrence oracle for finite lambda") {
  for (int d : {3, 4, 5, 8, 12}) {
    const auto dim = Dimension::finite(d);
    for (int n = 0; n <= 20; ++n) {
      for (double t = -1.0; t <= 1.0; t += 0.125) {
        CHECK(normalized_gegenbauer(dim, n, t) == doctest::Approx(gegenbauer_ratio(dim.lambda(), n, t)).epsilon(1e-12));
      }
    }
  }
  for (int n = 0; n <= 40; ++n) {
    for (double theta : {0.1, 0.9, 2.0, 3.1}) {
      CHECK(std::abs(normalized_gegenbauer(Dimension::finite(2), n, std::cos(theta)) - std::cos(n * theta)) <= 1e-12);
    }
  }
}

TEST_CASE("boundedness and normalization") {
  for (const auto& dim : regimes()) {
    for (int n = 0; n <= 64; ++n) {
      CHECK(std::abs(normalized_gegenbauer(dim, n, 1.0) - 1.0) <= 1e-12);
      for (int k = 0; k <= 200; ++k) {
        const double t = -1.0 + k / 100.0;
        CHECK(std::abs(normalized_gegenbauer(dim, n, t)) <= 1.0 + 1e-12);
      }
    }
  }
}

TEST_CASE("degree one is the identity") {
  std::vector<Dimension> dims{Dimension::finite(2), Dimension::finite(3), Dimension::finite(4), Dimension::finite(7),
                              Dimension::infinite()};
  for (const auto& dim : dims) {
    for (double t : {-1.0, -0.3, 0.0, 0.77}) CHECK(normalized_gegenbauer(dim, 1, t) == t);
  }
}

TEST_CASE("orthogonality under the weight") {
  for (int d : {2, 3, 6, 9}) {
    const auto dim = Dimension::finite(d);
    const auto rule = gauss_gegenbauer(dim.lambda(), 31);
    for (int m = 0; m <= 30; ++m) {
      for (int n = 0; n < m; ++n) {
        const double ip = rule.integrate([&](double x) {
          return normalized_gegenbauer(dim, m, x) * normalized_gegenbauer(dim, n, x);
        });
        CHECK(std::abs(ip) < 1e-10);
      }
    }
  }
}

TEST_CASE("weighted norms") {
  CHECK(weighted_norm_sq(Dimension::finite(3), 0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(std::abs(weighted_norm_sq(Dimension::finite(3), 1) - 2.0 / 3.0) <= 1e-11);
  CHECK(std::abs(weighted_norm_sq(Dimension::finite(2), 2) - std::numbers::pi / 2) <= 1e-11);
  boost::math::quadrature::tanh_sinh<double> ts;
  for (int d : {2, 3, 4, 7}) {
    const auto dim = Dimension::finite(d);
    for (int n = 0; n <= 10; ++n) {
      // x = cos θ turns the weight into sin^{2λ} θ
      const double ref = ts.integrate(
          [&](double theta) {
            const double q = d == 2 ? std::cos(n * theta) : gegenbauer_ratio(dim.lambda(), n, std::cos(theta));
            return std::pow(std::sin(theta), 2.0 * dim.lambda()) * q * q;
          },
          0.0, std::numbers::pi);
      CHECK(weighted_norm_sq(dim, n) == doctest::Approx(ref).epsilon(1e-10));
      CHECK(weighted_norm_sq(dim, n) > 0.0);
    }
  }
  CHECK_THROWS_AS(weighted_norm_sq(Dimension::infinite(), 2), std::invalid_argument);
}

TEST_CASE("convergence to monomials as d grows") {
  for (int n = 0; n <= 8; ++n) {
    double previous = INFINITY;
    for (int d : {12, 102, 1002}) {
      double dev = 0.0;
      for (int k = 0; k <= 100; ++k) {
        const double t = -1.0 + k / 50.0;
        dev = std::max(dev, std::abs(normalized_gegenbauer(Dimension::finite(d), n, t) - std::pow(t, n)));
      }
      CHECK(dev <= previous);
      previous = dev;
    }
  }
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(Dimension::finite(1), std::invalid_argument);
  CHECK_THROWS_AS(normalized_gegenbauer(Dimension::finite(3), -1, 0.2), std::invalid_argument);
  CHECK_THROWS_AS(normalized_gegenbauer(Dimension::finite(3), 2, 1.001), std::domain_error);
  CHECK(normalized_gegenbauer(Dimension::finite(3), 2, 1.0 + 5e-13) == 1.0);
  CHECK(Dimension::parse("inf") == Dimension::infinite());
  CHECK(Dimension::parse("3") == Dimension::finite(3));
  CHECK(Dimension::finite(2).lambda() == 0.0);
  CHECK(Dimension::finite(2).family() == PolyFamily::chebyshev);
  CHECK(Dimension::finite(5).family() == PolyFamily::gegenbauer);
  CHECK(Dimension::infinite().family() == PolyFamily::monomial);
}
