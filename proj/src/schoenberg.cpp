#include "isokernel/schoenberg.hpp"

#include "isokernel/orthopoly.hpp"
#include "isokernel/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>

namespace isokernel {

namespace {

void check_radii(std::span<const double> radii) {
  if (radii.empty()) throw std::invalid_argument("radii must not be empty");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!std::isfinite(radii[i]) || radii[i] < 0.0) {
      throw std::invalid_argument("radii[" + std::to_string(i) + "] must be finite and >= 0");
    }
    if (i > 0 && !(radii[i] > radii[i - 1])) throw std::invalid_argument("radii must be strictly increasing");
  }
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("ISOKERNEL_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 1;
}

// Runs fn(0..count-1); every index writes only its own output slot.
template <typename Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
  if (count == 0) return;
  // The first item runs alone.
  fn(std::size_t{0});
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(threads), count - 1);
  if (workers <= 1) {
    for (std::size_t i = 1; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = 1 + w; i < count; i += workers) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  pool.clear();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

template <typename Scalar>
Scalar checked(Scalar v) {
  using std::isfinite;
  if (!isfinite(v)) throw NumericalError("kernel evaluation returned a non-finite value");
  return v;
}

// Gauss-Gegenbauer projection onto P̄_0..P̄_N. Uses the nonnegative half of a
// symmetric rule and the even/odd parts of the sampled function.
class GegenbauerProjector {
 public:
  GegenbauerProjector(const Dimension& dim, int n_max, int nodes) : n_max_(n_max) {
    const QuadratureRule rule = gauss_gegenbauer(dim.lambda(), nodes);
    const Eigen::Index k = rule.size();
    const Eigen::Index first = k / 2;  // first nonnegative node
    has_center_ = k % 2 == 1;
    const Eigen::Index half = k - first;
    nodes_ = rule.nodes.tail(half);
    weights_ = rule.weights.tail(half);
    basis_.resize(half, n_max + 1);
    for (Eigen::Index i = 0; i < half; ++i) {
      const auto p = normalized_gegenbauer_all(dim, n_max, nodes_[i]);
      for (int n = 0; n <= n_max; ++n) basis_(i, n) = p[n];
    }
    // Mirrored nodes count twice, the center node once.
    pair_weights_ = 2.0 * weights_;
    if (has_center_) pair_weights_[0] = weights_[0];
    norms_ = (basis_.array().square().colwise() * pair_weights_.array()).colwise().sum().transpose();
  }

  Eigen::VectorXd project(const IsotropicKernel& kernel, double r, double s) const {
    const Eigen::Index half = nodes_.size();
    const double rs = r * s;
    Eigen::VectorXd even(half), odd(half);
    for (Eigen::Index i = 0; i < half; ++i) {
      const double plus = checked(kernel(r, s, rs * nodes_[i]));
      const double minus = (has_center_ && i == 0) ? plus : checked(kernel(r, s, -rs * nodes_[i]));
      even[i] = 0.5 * (plus + minus);
      odd[i] = 0.5 * (plus - minus);
    }
    const Eigen::VectorXd we = pair_weights_.cwiseProduct(even);
    const Eigen::VectorXd wo = pair_weights_.cwiseProduct(odd);
    Eigen::VectorXd alpha(n_max_ + 1);
    for (int n = 0; n <= n_max_; ++n) {
      const double num = (n % 2 == 0 ? we : wo).dot(basis_.col(n));
      alpha[n] = num / norms_[n];
    }
    return alpha;
  }

 private:
  int n_max_;
  bool has_center_ = false;
  Eigen::VectorXd nodes_, weights_, pair_weights_, norms_;
  Eigen::MatrixXd basis_;  // basis_(i, n) = P̄_n(x_i)
};

// Monomial coefficients of ρ ↦ κ(r, s, rs ρ) for the l^2 case.
//
// The function is sampled on ρ ∈ [-h, h], h = 1/2, at K mirrored Chebyshev
// points in extended precision. Its Chebyshev coefficients (in u = ρ / h)
// are truncated at the sampling precision and converted to the monomial
// basis exactly, then rescaled by h^{-n}.
class MonomialExtractor {
 public:
  static constexpr int kMinSamples = 192;

  explicit MonomialExtractor(int n_max) : n_max_(n_max) {
    k_ = std::max(kMinSamples, 2 * (n_max + 1));
    if (k_ % 2) ++k_;
    const int half = k_ / 2;
    const Precise pi = boost::math::constants::pi<Precise>();
    nodes_.resize(half);
    // u_j = cos(π (j + 1/2) / K) for j < K/2 is positive; -u_j is its mirror.
    for (int j = 0; j < half; ++j) nodes_[j] = cos(pi * (Precise(j) + Precise(0.5)) / Precise(k_));
    // cheb_[k * half + j] = T_k(u_j)
    cheb_.resize(static_cast<std::size_t>(k_) * half);
    for (int j = 0; j < half; ++j) {
      Precise t_prev = 1, t = nodes_[j];
      cheb_[j] = t_prev;
      cheb_[static_cast<std::size_t>(half) + j] = t;
      for (int k = 2; k < k_; ++k) {
        const Precise t_next = 2 * nodes_[j] * t - t_prev;
        t_prev = t;
        t = t_next;
        cheb_[static_cast<std::size_t>(k) * half + j] = t;
      }
    }
    // to_mono_[k * (N + 1) + n] = coefficient of u^n in T_k, n <= N.
    const int width = n_max + 1;
    to_mono_.assign(static_cast<std::size_t>(k_) * width, Precise(0));
    to_mono_[0] = 1;
    if (k_ > 1 && width > 1) to_mono_[static_cast<std::size_t>(width) + 1] = 1;
    for (int k = 1; k + 1 < k_; ++k) {
      for (int n = 0; n < width; ++n) {
        Precise v = -to_mono_[static_cast<std::size_t>(k - 1) * width + n];
        if (n > 0) v += 2 * to_mono_[static_cast<std::size_t>(k) * width + n - 1];
        to_mono_[static_cast<std::size_t>(k + 1) * width + n] = v;
      }
    }
  }

  Eigen::VectorXd extract(const IsotropicKernel& kernel, double r, double s) const {
    const int half = k_ / 2;
    const Precise pr(r), ps(s);
    const Precise scale = pr * ps * Precise(0.5);
    std::vector<Precise> even(half), odd(half);
    for (int j = 0; j < half; ++j) {
      const Precise plus = checked(kernel.precise(pr, ps, scale * nodes_[j]));
      const Precise minus = checked(kernel.precise(pr, ps, -(scale * nodes_[j])));
      even[j] = (plus + minus) / 2;
      odd[j] = (plus - minus) / 2;
    }
    std::vector<Precise> cheb(k_);
    Precise largest = 0;
    for (int k = 0; k < k_; ++k) {
      const auto& part = (k % 2 == 0) ? even : odd;
      Precise acc = 0;
      for (int j = 0; j < half; ++j) acc += cheb_[static_cast<std::size_t>(k) * half + j] * part[j];
      cheb[k] = acc * 4 / Precise(k_);
      if (k == 0) cheb[k] /= 2;
      largest = std::max(largest, abs(cheb[k]));
    }
    // Truncate at the sampling precision.
    const Precise eps = kernel.has_precise() ? Precise("1e-95") : Precise(64 * std::numeric_limits<double>::epsilon());
    int last = -1;
    for (int k = 0; k < k_; ++k) {
      if (abs(cheb[k]) > eps * largest) last = k;
    }
    const int width = n_max_ + 1;
    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(width);
    Precise inv_h_pow = 1;
    for (int n = 0; n < width; ++n) {
      Precise acc = 0;
      for (int k = n; k <= last; k += 2) acc += cheb[k] * to_mono_[static_cast<std::size_t>(k) * width + n];
      alpha[n] = static_cast<double>(acc * inv_h_pow);
      inv_h_pow *= 2;
    }
    return alpha;
  }

 private:
  int n_max_;
  int k_ = 0;
  std::vector<Precise> nodes_;
  std::vector<Precise> cheb_;
  std::vector<Precise> to_mono_;
};

}  // namespace

void CoefficientTable::validate() const {
  const Eigen::Index m = num_radii();
  try {
    check_radii(radii);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string("table: ") + e.what());
  }
  if (n_max < 0) throw std::invalid_argument("table: n_max must be >= 0");
  if (values.size() != static_cast<std::size_t>(n_max) + 1) {
    throw std::invalid_argument("table: expected n_max + 1 coefficient matrices");
  }
  for (int n = 0; n <= n_max; ++n) {
    const auto& v = values[n];
    if (v.rows() != m || v.cols() != m) {
      throw std::invalid_argument("table: values[" + std::to_string(n) + "] must be a square matrix over the radii");
    }
    if (!v.allFinite()) throw std::invalid_argument("table: values[" + std::to_string(n) + "] has non-finite entries");
    const double scale = v.cwiseAbs().maxCoeff();
    if ((v - v.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
      throw std::invalid_argument("table: values[" + std::to_string(n) + "] is not symmetric");
    }
    if (m > 0 && v.diagonal().minCoeff() < -1e-10) {
      throw std::invalid_argument("table: values[" + std::to_string(n) + "] has a negative diagonal entry");
    }
    if (n >= 1) {
      for (Eigen::Index i = 0; i < m; ++i) {
        if (radii[i] != 0.0) continue;
        if (v.row(i).cwiseAbs().maxCoeff() > 1e-10) {
          throw std::invalid_argument("table: values[" + std::to_string(n) + "] is not zero at the origin");
        }
      }
    }
  }
}

double CoefficientTable::total_trace() const {
  double t = 0.0;
  for (const auto& v : values) t += v.trace();
  return t;
}

std::optional<Eigen::Index> CoefficientTable::find_radius(double r) const {
  auto it = std::lower_bound(radii.begin(), radii.end(), r);
  for (auto cand : {it, it == radii.begin() ? it : std::prev(it)}) {
    if (cand == radii.end()) continue;
    if (std::abs(*cand - r) <= 1e-12 * std::max(1.0, std::abs(r))) return cand - radii.begin();
  }
  return std::nullopt;
}

CoefficientTable decompose(const IsotropicKernel& kernel, std::span<const double> radii, int n_max,
                           const DecomposeOptions& options) {
  check_radii(radii);
  if (n_max < 0) throw std::invalid_argument("n_max must be >= 0");
  const Dimension dim = kernel.dim();
  if (!dim.is_finite() && n_max > kMaxInfiniteDegree && !options.allow_high_degree) {
    throw std::invalid_argument("n_max " + std::to_string(n_max) + " exceeds the d = inf conditioning cap of " +
                                std::to_string(kMaxInfiniteDegree) + " (pass allow_high_degree to override)");
  }
  const int nodes = options.quad_nodes.value_or(n_max + 16);
  if (dim.is_finite() && nodes < n_max + 1) {
    throw std::invalid_argument("quad_nodes must be at least n_max + 1");
  }

  CoefficientTable table;
  table.dim = dim;
  table.radii.assign(radii.begin(), radii.end());
  table.n_max = n_max;
  const auto m = static_cast<Eigen::Index>(radii.size());
  table.values.assign(static_cast<std::size_t>(n_max) + 1, Eigen::MatrixXd::Zero(m, m));

  std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) pairs.emplace_back(i, j);
  }

  std::unique_ptr<GegenbauerProjector> projector;
  std::unique_ptr<MonomialExtractor> extractor;
  if (dim.is_finite()) {
    projector = std::make_unique<GegenbauerProjector>(dim, n_max, nodes);
  } else {
    extractor = std::make_unique<MonomialExtractor>(n_max);
  }

  std::vector<Eigen::VectorXd> results(pairs.size());
  parallel_for(pairs.size(), resolve_threads(options.threads), [&](std::size_t p) {
    const auto [i, j] = pairs[p];
    const double r = radii[i], s = radii[j];
    if (r == 0.0 || s == 0.0) {
      Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n_max + 1);
      alpha[0] = checked(kernel(r, s, 0.0));
      results[p] = std::move(alpha);
    } else if (projector) {
      results[p] = projector->project(kernel, r, s);
    } else {
      results[p] = extractor->extract(kernel, r, s);
    }
  });

  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto [i, j] = pairs[p];
    for (int n = 0; n <= n_max; ++n) {
      table.values[n](i, j) = results[p][n];
      table.values[n](j, i) = results[p][n];
    }
  }
  return table;
}

IsotropicKernel reconstruct(const CoefficientTable& table) {
  table.validate();
  auto shared = std::make_shared<const CoefficientTable>(table);
  auto eval = [shared](auto r, auto s, auto g) {
    using Scalar = decltype(r);
    const auto i = shared->find_radius(static_cast<double>(r));
    const auto j = shared->find_radius(static_cast<double>(s));
    if (!i || !j) throw std::domain_error("reconstruct: radius not on the table grid");
    const Scalar rs = r * s;
    if (rs == Scalar(0)) return Scalar(shared->values[0](*i, *j));
    Scalar t = g / rs;
    if (t > Scalar(1)) t = Scalar(1);
    if (t < Scalar(-1)) t = Scalar(-1);
    const auto p = normalized_gegenbauer_all(shared->dim, shared->n_max, t);
    Scalar out(0);
    for (int n = shared->n_max; n >= 0; --n) out += Scalar(shared->values[n](*i, *j)) * p[n];
    return out;
  };
  return IsotropicKernel::generic(table.dim, "reconstruct", eval);
}

double residual(const IsotropicKernel& kernel, const CoefficientTable& table, int gamma_samples) {
  if (gamma_samples < 2) throw std::invalid_argument("gamma_samples must be >= 2");
  const IsotropicKernel approx = reconstruct(table);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < table.num_radii(); ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double r = table.radii[i], s = table.radii[j], rs = r * s;
      const int samples = rs == 0.0 ? 1 : gamma_samples;
      for (int t = 0; t < samples; ++t) {
        const double g = samples == 1 ? 0.0 : -rs + 2.0 * rs * t / (samples - 1);
        worst = std::max(worst, std::abs(kernel(r, s, g) - approx(r, s, g)));
      }
    }
  }
  return worst;
}

DimensionLimitReport dim_limit_check(const IsotropicKernel& kernel, std::span<const int> dims,
                                     std::span<const double> radii, int n_max, const DecomposeOptions& options) {
  const CoefficientTable limit = decompose(kernel.in_dimension(Dimension::infinite()), radii, n_max, options);
  DimensionLimitReport report;
  report.dims.assign(dims.begin(), dims.end());
  report.deviation.resize(static_cast<Eigen::Index>(dims.size()), n_max + 1);
  for (std::size_t k = 0; k < dims.size(); ++k) {
    const CoefficientTable t = decompose(kernel.in_dimension(Dimension::finite(dims[k])), radii, n_max, options);
    for (int n = 0; n <= n_max; ++n) {
      report.deviation(static_cast<Eigen::Index>(k), n) = (t.values[n] - limit.values[n]).cwiseAbs().maxCoeff();
    }
  }
  return report;
}

double min_eigenvalue(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  if (!m.allFinite()) throw NumericalError("eigensolve on a matrix with non-finite entries");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("symmetric eigensolve failed");
  return solver.eigenvalues()[0];
}

}  // namespace isokernel
