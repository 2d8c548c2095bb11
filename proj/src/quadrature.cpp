#include "isokernel/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace isokernel {

namespace {

void check_node_count(int k) {
  if (k < 1) throw std::invalid_argument("quadrature node count must be >= 1 (got " + std::to_string(k) + ")");
}

// Orthonormal p_k and its derivative at x.
std::pair<double, double> orthonormal_with_derivative(std::span<const double> a, std::span<const double> b,
                                                      double mass, double x) {
  const std::size_t k = a.size();
  double p_prev = 0.0, p = 1.0 / std::sqrt(mass);
  double d_prev = 0.0, d = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    const double sb_next = std::sqrt(b[j]);
    const double sb = j == 0 ? 0.0 : std::sqrt(b[j - 1]);
    const double p_next = ((x - a[j]) * p - sb * p_prev) / sb_next;
    const double d_next = (p + (x - a[j]) * d - sb * d_prev) / sb_next;
    p_prev = p;
    p = p_next;
    d_prev = d;
    d = d_next;
  }
  return {p, d};
}

double christoffel_weight(std::span<const double> a, std::span<const double> b, double mass, double x) {
  const std::size_t k = a.size();
  double p_prev = 0.0, p = 1.0 / std::sqrt(mass);
  double sum = p * p;
  for (std::size_t j = 0; j + 1 < k; ++j) {
    const double sb = j == 0 ? 0.0 : std::sqrt(b[j - 1]);
    const double p_next = ((x - a[j]) * p - sb * p_prev) / std::sqrt(b[j]);
    p_prev = p;
    p = p_next;
    sum += p * p;
  }
  return 1.0 / sum;
}

void symmetrize(QuadratureRule& rule) {
  const Eigen::Index k = rule.size();
  for (Eigen::Index i = 0; i < k / 2; ++i) {
    const Eigen::Index j = k - 1 - i;
    const double x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
    const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
    rule.nodes[i] = -x;
    rule.nodes[j] = x;
    rule.weights[i] = w;
    rule.weights[j] = w;
  }
  if (k % 2 == 1) rule.nodes[k / 2] = 0.0;
}

}  // namespace

QuadratureRule gauss_from_recurrence(std::span<const double> a, std::span<const double> b, double mass) {
  const auto k = static_cast<Eigen::Index>(a.size());
  if (k < 1 || b.size() < a.size()) {
    throw std::invalid_argument("gauss_from_recurrence: need k >= 1 diagonal and k off-diagonal coefficients");
  }
  Eigen::VectorXd diag(k);
  Eigen::VectorXd sub(std::max<Eigen::Index>(k - 1, 0));
  for (Eigen::Index j = 0; j < k; ++j) diag[j] = a[j];
  for (Eigen::Index j = 0; j + 1 < k; ++j) sub[j] = std::sqrt(b[j]);

  QuadratureRule rule;
  if (k == 1) {
    rule.nodes = diag;
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw std::runtime_error("Golub-Welsch eigensolve failed");
    rule.nodes = solver.eigenvalues();
  }

  // Newton polish, accepted only while it stays inside the node's own gap.
  for (Eigen::Index i = 0; i < k; ++i) {
    const double left = i > 0 ? rule.nodes[i] - rule.nodes[i - 1] : INFINITY;
    const double right = i + 1 < k ? rule.nodes[i + 1] - rule.nodes[i] : INFINITY;
    const double gap = std::min(left, right);
    double x = rule.nodes[i];
    for (int it = 0; it < 2; ++it) {
      const auto [p, dp] = orthonormal_with_derivative(a, b, mass, x);
      if (dp == 0.0 || !std::isfinite(p / dp)) break;
      const double step = p / dp;
      if (std::abs(step) > 0.1 * gap) break;
      x -= step;
    }
    rule.nodes[i] = x;
  }

  rule.weights.resize(k);
  for (Eigen::Index i = 0; i < k; ++i) rule.weights[i] = christoffel_weight(a, b, mass, rule.nodes[i]);
  rule.exactness = 2 * static_cast<int>(k) - 1;
  return rule;
}

double gegenbauer_weight_mass(double lambda) {
  return std::sqrt(std::numbers::pi) * std::exp(std::lgamma(lambda + 0.5) - std::lgamma(lambda + 1.0));
}

QuadratureRule gauss_gegenbauer(double lambda, int k) {
  if (!std::isfinite(lambda) || lambda < 0.0) {
    throw std::invalid_argument("gauss_gegenbauer: lambda must be finite and >= 0");
  }
  check_node_count(k);
  std::vector<double> a(static_cast<std::size_t>(k), 0.0);
  std::vector<double> b(static_cast<std::size_t>(k));
  for (int n = 1; n <= k; ++n) {
    const double nn = n;
    b[n - 1] = n == 1 ? 1.0 / (2.0 * (1.0 + lambda))
                      : nn * (nn + 2.0 * lambda - 1.0) / (4.0 * (nn + lambda) * (nn + lambda - 1.0));
  }
  QuadratureRule rule = gauss_from_recurrence(a, b, gegenbauer_weight_mass(lambda));
  symmetrize(rule);
  rule.weight_kind = WeightKind::gegenbauer;
  rule.lambda = lambda;
  return rule;
}

QuadratureRule gauss_hermite(int k) {
  check_node_count(k);
  // Probabilists' Hermite: x He_j = He_{j+1} + j He_{j-1}, unit mass.
  std::vector<double> a(static_cast<std::size_t>(k), 0.0);
  std::vector<double> b(static_cast<std::size_t>(k));
  for (int n = 1; n <= k; ++n) b[n - 1] = n;
  QuadratureRule rule = gauss_from_recurrence(a, b, 1.0);
  symmetrize(rule);
  rule.weight_kind = WeightKind::hermite;
  return rule;
}

QuadratureRule gauss_rayleigh(int k) {
  check_node_count(k);
  // Discretize the weight with composite 20-point Gauss-Legendre panels; the
  // integrands ρ^j ρ exp(-ρ²/2), j <= 2k + 1, are negligible beyond `upper`.
  const QuadratureRule panel = gauss_gegenbauer(0.5, 20);
  const double upper = 30.0 + 2.0 * std::sqrt(2.0 * k);
  const int panels = 300 + 4 * k;
  const double h = upper / panels;
  const std::size_t m = static_cast<std::size_t>(panels) * static_cast<std::size_t>(panel.size());
  std::vector<double> x(m), w(m);
  std::size_t idx = 0;
  for (int p = 0; p < panels; ++p) {
    const double mid = (p + 0.5) * h;
    for (Eigen::Index i = 0; i < panel.size(); ++i, ++idx) {
      x[idx] = mid + 0.5 * h * panel.nodes[i];
      w[idx] = 0.5 * h * panel.weights[i] * x[idx] * std::exp(-0.5 * x[idx] * x[idx]);
    }
  }

  // Stieltjes procedure on normalized vectors.
  std::vector<double> a(static_cast<std::size_t>(k)), b(static_cast<std::size_t>(k));
  std::vector<double> p_prev(m, 0.0), p(m), q(m);
  double mass = 0.0;
  for (double wi : w) mass += wi;
  for (std::size_t i = 0; i < m; ++i) p[i] = 1.0 / std::sqrt(mass);
  double sb_prev = 0.0;
  for (int j = 0; j < k; ++j) {
    double aj = 0.0;
    for (std::size_t i = 0; i < m; ++i) aj += w[i] * x[i] * p[i] * p[i];
    double norm = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      q[i] = (x[i] - aj) * p[i] - sb_prev * p_prev[i];
      norm += w[i] * q[i] * q[i];
    }
    const double sb = std::sqrt(norm);
    a[j] = aj;
    b[j] = norm;
    for (std::size_t i = 0; i < m; ++i) {
      p_prev[i] = p[i];
      p[i] = q[i] / sb;
    }
    sb_prev = sb;
  }
  QuadratureRule rule = gauss_from_recurrence(a, b, mass);
  rule.weight_kind = WeightKind::rayleigh;
  return rule;
}

}  // namespace isokernel
