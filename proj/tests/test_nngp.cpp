#include "isokernel/builtins.hpp"
#include "isokernel/diagnostics.hpp"
#include "isokernel/nngp.hpp"
#include "isokernel/quadrature.hpp"
#include "isokernel/schoenberg.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace isokernel;

namespace {

double relu(double u) { return u > 0.0 ? u : 0.0; }

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double a : v) x[i++] = a;
  return x;
}

// Tensor Gauss-Hermite on the Cholesky map, for smooth activations.
double tensor_hermite(const std::function<double(double)>& phi, double c, double a, double b, int k) {
  const auto q = gauss_hermite(k);
  const double l11 = std::sqrt(a), l21 = c / l11, l22 = std::sqrt(std::max(0.0, b - l21 * l21));
  double sum = 0.0;
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    for (Eigen::Index j = 0; j < q.size(); ++j) {
      sum += q.weights[i] * q.weights[j] * phi(l11 * q.nodes[i]) * phi(l21 * q.nodes[i] + l22 * q.nodes[j]);
    }
  }
  return sum;
}

std::vector<std::array<double, 3>> cab_grid() {
  std::vector<std::array<double, 3>> g;
  for (double a : {0.1, 0.7, 1.9, 4.0}) {
    for (double b : {0.1, 1.0, 3.3}) {
      for (double t : {-1.0, -0.6, 0.0, 0.35, 0.9, 1.0}) g.push_back({t * std::sqrt(a * b), a, b});
    }
  }
  return g;
}

}  // namespace

TEST_CASE("recursion examples") {
  NetworkSpec one{.depth = 1};
  CHECK(nngp_eval(one, vec({1, 0}), vec({0, 1})) == 1.0);
  NetworkSpec two{.depth = 2};
  CHECK(nngp_eval(two, vec({0, 0}), vec({0, 0})) == doctest::Approx(1.5).epsilon(1e-15));
  NetworkSpec nobias{.depth = 2, .bias = false};
  const auto x = vec({0.6, -1.2, 2.0});
  CHECK(nngp_eval(nobias, x, x) == doctest::Approx(x.squaredNorm() / 2).epsilon(1e-14));
  const auto k = nngp_as_kernel(nobias);
  CHECK(k.at_points(2.0 * Eigen::VectorXd::Unit(3, 0), 2.0 * Eigen::VectorXd::Unit(3, 0)) !=
        doctest::Approx(k.at_points(Eigen::VectorXd::Unit(3, 0), Eigen::VectorXd::Unit(3, 0))));
}

TEST_CASE("relu closed form") {
  CHECK(f_phi_closed_relu(2.5, 2.5, 2.5) == doctest::Approx(1.25).epsilon(1e-15));
  CHECK(f_phi_closed_relu(0.0, 1.0, 1.0) == doctest::Approx(1.0 / (2 * std::numbers::pi)).epsilon(1e-15));
  CHECK(std::abs(f_phi_closed_relu(-1.0, 1.0, 1.0)) <= 1e-16);
  for (const auto& [c, a, b] : cab_grid()) {
    CHECK(std::abs(f_phi_closed_relu(c, a, b) - f_phi_quadrature(relu, c, a, b, 40)) <= 1e-6);
  }
  CHECK_THROWS_AS(f_phi_closed_relu(1.1, 1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(f_phi_closed_relu(0.0, -1.0, 1.0), std::domain_error);
}

TEST_CASE("arccos builtin is twice the relu expectation") {
  const auto k = arccos_kernel();
  for (double r : {0.3, 1.0, 2.2}) {
    for (double s : {0.5, 1.7}) {
      for (double t : {-0.8, 0.0, 0.5}) {
        CHECK(k(r, s, t * r * s) == doctest::Approx(2.0 * f_phi_closed_relu(t * r * s, r * r, s * s)).epsilon(1e-14));
      }
    }
  }
}

TEST_CASE("erf closed form against independent quadratures") {
  const auto erf = [](double u) { return std::erf(u); };
  for (const auto& [c, a, b] : cab_grid()) {
    const double closed = f_phi_closed_erf(c, a, b);
    CHECK(std::abs(closed - f_phi_quadrature(erf, c, a, b, 40)) <= 1e-8);
    if (a <= 2.0 && b <= 2.0) CHECK(std::abs(closed - tensor_hermite(erf, c, a, b, 60)) <= 1e-6);
  }
}

TEST_CASE("quadrature converges between 20 and 60 nodes") {
  const auto erf = [](double u) { return std::erf(u); };
  for (const auto& [c, a, b] : cab_grid()) {
    CHECK(std::abs(f_phi_quadrature(relu, c, a, b, 20) - f_phi_quadrature(relu, c, a, b, 60)) <= 1e-8);
    CHECK(std::abs(f_phi_quadrature(erf, c, a, b, 20) - f_phi_quadrature(erf, c, a, b, 60)) <= 1e-8);
  }
}

TEST_CASE("degenerate variances") {
  const auto shifted = [](double u) { return std::erf(u) + 0.5; };
  // a = 0: F = φ(0) E[φ(v)] = 0.5 * 0.5
  CHECK(f_phi_quadrature(shifted, 0.0, 0.0, 2.0, 30) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(f_phi_quadrature(shifted, 0.0, 0.0, 0.0, 30) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(f_phi_closed_relu(0.0, 0.0, 3.0) == 0.0);
  CHECK_THROWS_AS(f_phi_quadrature(relu, 1.5, 1.0, 1.0, 20), std::domain_error);
}

TEST_CASE("quadrature path matches closed forms through the recursion") {
  for (auto act : {Activation::relu, Activation::erf}) {
    for (bool bias : {true, false}) {
      NetworkSpec closed{.depth = 3, .activation = act, .bias = bias};
      NetworkSpec quad = closed;
      quad.method = FPhiMethod::quadrature;
      for (double t : {-0.9, 0.1, 0.8}) {
        const auto x = vec({1.2, 0.0}), y = vec({0.7 * t, 0.7 * std::sqrt(1 - t * t)});
        CHECK(nngp_eval(quad, x, y) == doctest::Approx(nngp_eval(closed, x, y)).epsilon(1e-8));
      }
    }
  }
}

TEST_CASE("arcsin kernel is the scaled-erf network") {
  NetworkSpec net{.depth = 2};
  net.activation = Activation::custom;
  net.custom = [](double u) { return std::sqrt(std::numbers::pi / 2) * std::erf(u / std::numbers::sqrt2); };
  net.bias = false;
  const auto nn = nngp_as_kernel(net);
  const auto as = arcsin_kernel();
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> rad(0.0, 2.0), cosine(-1.0, 1.0);
  for (int i = 0; i < 40; ++i) {
    const double r = rad(rng), s = rad(rng), g = cosine(rng) * r * s;
    CHECK(std::abs(nn(r, s, g) - as(r, s, g)) <= 2e-4);
    CHECK(std::abs(nn(r, s, g) - as(r, s, g)) <= 1e-8);
  }
}

TEST_CASE("isotropy, Cauchy-Schwarz and PSD Grams") {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> normal;
  NetworkSpec nets[] = {{.depth = 3}, {.depth = 2, .activation = Activation::erf, .bias = false}};
  for (const auto& net : nets) {
    const auto k = nngp_as_kernel(net, Dimension::finite(5));
    CHECK(check_isotropy(k, 50, 3) <= 1e-12 * 10);
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<Eigen::VectorXd> pts(12, Eigen::VectorXd(5));
      for (auto& p : pts) {
        for (int i = 0; i < 5; ++i) p[i] = normal(rng);
      }
      const auto g = gram(k, pts).entries;
      CHECK(check_pd(g).psd);
      for (int i = 0; i < 12; ++i) {
        for (int j = 0; j < 12; ++j) CHECK(std::abs(g(i, j)) <= std::sqrt(g(i, i) * g(j, j)) * (1 + 1e-10));
      }
    }
  }
}

TEST_CASE("l2 coefficients of a no-bias relu network") {
  const auto k = nngp_as_kernel({.depth = 2, .bias = false});
  const auto t = decompose(k, std::vector<double>{0.0, 1.0}, 20);
  for (int n = 0; n <= 20; ++n) {
    CHECK(t(n, 1, 1) >= -1e-14);
    if (n >= 1) CHECK(t(n, 1, 0) == 0.0);
  }
  // κ(1, 1, ρ) = J_1(arccos ρ) / (2π): α_0 = 1/(2π), α_1 = 1/4.
  CHECK(t(0, 1, 1) == doctest::Approx(1.0 / (2 * std::numbers::pi)).epsilon(1e-12));
  CHECK(t(1, 1, 1) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("network validation") {
  CHECK_THROWS_AS(nngp_as_kernel({.depth = 0}), std::invalid_argument);
  CHECK_THROWS_AS(nngp_as_kernel({.depth = 2, .hermite_nodes = 4}), std::invalid_argument);
  CHECK_THROWS_AS(nngp_as_kernel({.depth = 2, .activation = Activation::custom}), std::invalid_argument);
  CHECK_THROWS_AS(nngp_eval({.depth = 2}, vec({1, 0}), vec({1, 0, 0})), std::invalid_argument);
}
