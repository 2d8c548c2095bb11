#include "isokernel/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

namespace isokernel {

namespace {

using Indices = std::vector<Eigen::Index>;

Eigen::MatrixXd restrict(const Eigen::MatrixXd& m, const Indices& idx) { return m(idx, idx); }

bool in_upper_window(int n, int cap) { return 2 * std::abs(n) > cap && std::abs(n) <= cap; }

int positive_mod(int n, int k) { return ((n % k) + k) % k; }

std::string format_indices(const std::vector<int>& v) {
  std::ostringstream out;
  out << "[";
  for (std::size_t i = 0; i < v.size(); ++i) out << (i ? "," : "") << v[i];
  out << "]";
  return out.str();
}

}  // namespace

const char* to_string(Verdict v) { return v == Verdict::consistent ? "consistent" : "inconsistent"; }

GramMatrix gram(const IsotropicKernel& kernel, const std::vector<Eigen::VectorXd>& points) {
  const auto m = static_cast<Eigen::Index>(points.size());
  GramMatrix g{points, Eigen::MatrixXd(m, m)};
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) g.entries(i, j) = kernel.at_points(points[i], points[j]);
  }
  g.entries = 0.5 * (g.entries + g.entries.transpose()).eval();
  return g;
}

PdCheck check_pd(const Eigen::MatrixXd& entries) {
  if (entries.rows() != entries.cols()) throw std::invalid_argument("check_pd: matrix must be square");
  PdCheck out;
  out.min_eigenvalue = min_eigenvalue(entries);
  const double tol = kEigenTolerance * std::abs(entries.trace());
  out.psd = out.min_eigenvalue >= -tol;
  out.strictly_pd_witness = out.min_eigenvalue > tol;
  return out;
}

Eigen::MatrixXd parity_tail(const CoefficientTable& table, int gamma, Parity parity) {
  if (gamma < 0 || gamma > table.n_max) {
    throw std::invalid_argument("parity_tail: gamma must lie in [0, n_max]");
  }
  Indices pos;
  for (Eigen::Index i = 0; i < table.num_radii(); ++i) {
    if (table.radii[i] > 0.0) pos.push_back(i);
  }
  const auto p = static_cast<Eigen::Index>(pos.size());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(p, p);
  const int start = parity == Parity::even ? 0 : 1;
  for (int n = start; n <= table.n_max; n += 2) {
    if (n >= gamma) out += restrict(table.values[n], pos);
  }
  return out;
}

StrictPDReport strict_pd_evidence(const CoefficientTable& table, const StrictPdOptions& options) {
  table.validate();
  const int cap = std::min(options.degree_cap.value_or(table.n_max), table.n_max);
  if (cap < 4) throw std::invalid_argument("strict_pd_evidence: degree cap must be >= 4");
  if (options.probes < 1) throw std::invalid_argument("strict_pd_evidence: probes must be >= 1");
  if (options.k_max < 1) throw std::invalid_argument("strict_pd_evidence: k_max must be >= 1");

  std::optional<Eigen::Index> origin;
  Indices pos;
  for (Eigen::Index i = 0; i < table.num_radii(); ++i) {
    if (table.radii[i] == 0.0) {
      origin = i;
    } else {
      pos.push_back(i);
    }
  }
  if (!origin) throw std::invalid_argument("strict_pd_evidence: insufficient radii (r = 0 must be on the grid)");
  if (pos.size() < 2) throw std::invalid_argument("strict_pd_evidence: insufficient radii (need >= 2 positive)");

  const bool planar = table.dim.is_finite() && table.dim.value() == 2;
  StrictPDReport report;
  report.dim = table.dim;
  report.degree_cap = cap;
  for (auto i : pos) report.positive_radii.push_back(table.radii[i]);

  double total = 0.0;
  for (int n = 0; n <= cap; ++n) total += table.values[n].trace();
  report.alpha0_at_origin = table.values[0](*origin, *origin);
  report.origin_tolerance = kEigenTolerance * std::abs(total);
  if (!(report.alpha0_at_origin > report.origin_tolerance)) {
    std::ostringstream w;
    w << "alpha_0(0,0) = " << report.alpha0_at_origin << " <= " << report.origin_tolerance;
    report.violations.push_back({"alpha0_at_origin", w.str()});
  }

  std::vector<Eigen::MatrixXd> sub(static_cast<std::size_t>(cap) + 1);
  for (int n = 0; n <= cap; ++n) {
    sub[n] = restrict(table.values[n], pos);
    const double tr = sub[n].trace();
    const double lo = min_eigenvalue(sub[n]);
    report.per_degree.push_back({n, lo, tr > 0.0 && lo > kEigenTolerance * tr});
  }

  for (int gamma = 0; gamma <= 2; ++gamma) {
    report.parity_tails.push_back({gamma, min_eigenvalue(parity_tail(table, gamma, Parity::even)),
                                   min_eigenvalue(parity_tail(table, gamma, Parity::odd))});
  }

  // Random probes over subsets of the positive radii.
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal;
  std::vector<int> local(pos.size());
  std::iota(local.begin(), local.end(), 0);
  int missing_even = 0, missing_odd = 0, missing_prog = 0;
  std::string first_even, first_odd, first_prog;
  for (int m : {2, 3, 5}) {
    if (m > static_cast<int>(pos.size())) continue;
    for (int p = 0; p < options.probes; ++p) {
      std::shuffle(local.begin(), local.end(), rng);
      std::vector<int> chosen(local.begin(), local.begin() + m);
      std::sort(chosen.begin(), chosen.end());
      ProbeResult probe;
      Indices idx;
      for (int c : chosen) {
        idx.push_back(c);
        probe.radius_indices.push_back(static_cast<int>(pos[c]));
      }
      Eigen::VectorXd c(m);
      for (int k = 0; k < m; ++k) c[k] = normal(rng);
      probe.c.assign(c.data(), c.data() + m);
      const double c_sq = c.squaredNorm();

      for (int n = planar ? -cap : 0; n <= cap; ++n) {
        const Eigen::MatrixXd a = sub[std::abs(n)](idx, idx);
        const double q = c.dot(a * c);
        if (!(q > 0.0 && q > kEigenTolerance * c_sq * a.trace())) continue;
        probe.hits.push_back(n);
        if (n < 0) continue;
        const bool upper = in_upper_window(n, cap);
        if (n % 2 == 0) {
          ++probe.even_hits;
          probe.even_hits_upper += upper;
        } else {
          ++probe.odd_hits;
          probe.odd_hits_upper += upper;
        }
      }

      const std::string label = "probe " + std::to_string(report.probes.size()) + " on radius indices " +
                                format_indices(probe.radius_indices);
      if (planar) {
        for (int k = 1; k <= options.k_max; ++k) {
          for (int res = 0; res < k; ++res) {
            const bool met = std::any_of(probe.hits.begin(), probe.hits.end(), [&](int n) {
              return positive_mod(n, k) == res && in_upper_window(n, cap);
            });
            if (!met) {
              if (missing_prog++ == 0) {
                first_prog = label + " misses " + std::to_string(k) + "Z+" + std::to_string(res);
              }
              k = options.k_max + 1;
              break;
            }
          }
        }
      } else {
        if (probe.even_hits_upper == 0 && missing_even++ == 0) first_even = label;
        if (probe.odd_hits_upper == 0 && missing_odd++ == 0) first_odd = label;
      }
      report.probes.push_back(std::move(probe));
    }
  }
  const auto total_probes = report.probes.size();
  const std::string window = " in (" + std::to_string(cap / 2) + ", " + std::to_string(cap) + "]";
  if (missing_even) {
    report.violations.push_back({"probe_even_degrees", std::to_string(missing_even) + " of " +
                                                           std::to_string(total_probes) +
                                                           " probes have no even-degree hits" + window +
                                                           "; first: " + first_even});
  }
  if (missing_odd) {
    report.violations.push_back({"probe_odd_degrees", std::to_string(missing_odd) + " of " +
                                                          std::to_string(total_probes) +
                                                          " probes have no odd-degree hits" + window +
                                                          "; first: " + first_odd});
  }
  if (missing_prog) {
    report.violations.push_back({"probe_progression", std::to_string(missing_prog) + " of " +
                                                          std::to_string(total_probes) +
                                                          " probes miss a progression" + window + "; first: " +
                                                          first_prog});
  }

  if (planar) {
    std::vector<ProgressionEigen> progs;
    for (int k = 1; k <= options.k_max; ++k) {
      for (int res = 0; res < k; ++res) {
        Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(sub[0].rows(), sub[0].cols());
        for (int n = -cap; n <= cap; ++n) {
          if (positive_mod(n, k) == res) acc += sub[std::abs(n)];
        }
        ProgressionEigen pe{k, res, min_eigenvalue(acc), acc.trace()};
        if (!(pe.min_eigenvalue > kEigenTolerance * std::abs(pe.trace))) {
          std::ostringstream w;
          w << "sum over " << k << "Z+" << res << " has min eigenvalue " << pe.min_eigenvalue;
          report.violations.push_back({"progression_sum", w.str()});
        }
        progs.push_back(pe);
      }
    }
    report.d2_progressions = std::move(progs);

    bool all = true;
    for (int k = 1; k <= options.k_max && all; ++k) {
      for (int res = 0; res < k && all; ++res) {
        bool met = false;
        for (int n = -cap; n <= cap && !met; ++n) {
          met = positive_mod(n, k) == res && in_upper_window(n, cap) && report.per_degree[std::abs(n)].strictly_pd;
        }
        all = met;
      }
    }
    report.sufficient_condition_established = all;
  } else {
    bool even = false, odd = false;
    for (const auto& d : report.per_degree) {
      if (!d.strictly_pd || !in_upper_window(d.n, cap)) continue;
      (d.n % 2 == 0 ? even : odd) = true;
    }
    report.sufficient_condition_established = even && odd;
  }

  report.verdict = report.violations.empty() ? Verdict::consistent : Verdict::inconsistent;
  if (report.verdict == Verdict::consistent && !report.sufficient_condition_established) {
    report.notes.push_back(
        "necessary conditions hold in the scanned window, but per-degree strict positive definiteness "
        "(the sufficient condition) was not established" + window);
  }
  return report;
}

Eigen::MatrixXd random_orthogonal(int d, std::uint64_t seed) {
  if (d < 1) throw std::invalid_argument("random_orthogonal: d must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd g(d, d);
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < d; ++i) g(i, j) = normal(rng);
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < d; ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  return q;
}

double check_isotropy(const PointKernel& kernel, int embedding_dim, int trials, std::uint64_t seed) {
  if (embedding_dim < 1 || embedding_dim > 32) {
    throw std::invalid_argument("check_isotropy: embedding dimension must lie in [1, 32]");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    Eigen::VectorXd x(embedding_dim), y(embedding_dim);
    for (int i = 0; i < embedding_dim; ++i) x[i] = normal(rng);
    for (int i = 0; i < embedding_dim; ++i) y[i] = normal(rng);
    const Eigen::MatrixXd u = random_orthogonal(embedding_dim, rng());
    const Eigen::VectorXd ux = u * x, uy = u * y;
    worst = std::max(worst, std::abs(kernel(ux, uy) - kernel(x, y)));
  }
  return worst;
}

double check_isotropy(const IsotropicKernel& kernel, int trials, std::uint64_t seed) {
  const int d = kernel.dim().is_finite() ? kernel.dim().value() : 8;
  return check_isotropy([&](const Eigen::VectorXd& x, const Eigen::VectorXd& y) { return kernel.at_points(x, y); },
                        d, trials, seed);
}

GpSampleResult sample_gp(const IsotropicKernel& kernel, const std::vector<Eigen::VectorXd>& points, int n_samples,
                         std::uint64_t seed) {
  if (points.empty()) throw std::invalid_argument("sample_gp: need at least one point");
  if (n_samples < 1) throw std::invalid_argument("sample_gp: n_samples must be >= 1");
  GpSampleResult out;
  out.gram = gram(kernel, points).entries;
  const auto m = out.gram.rows();
  out.jitter = 1e-10 * std::abs(out.gram.trace()) / static_cast<double>(m);
  const Eigen::MatrixXd jittered = out.gram + out.jitter * Eigen::MatrixXd::Identity(m, m);
  Eigen::LLT<Eigen::MatrixXd> llt(jittered);
  if (llt.info() != Eigen::Success) throw NumericalError("sample_gp: Cholesky factorization failed after jitter");
  const Eigen::MatrixXd lower = llt.matrixL();

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd z(n_samples, m);
  for (int i = 0; i < n_samples; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) z(i, j) = normal(rng);
  }
  out.samples = z * lower.transpose();
  out.empirical_cov = (out.samples.transpose() * out.samples) / static_cast<double>(n_samples);

  const double root_n = std::sqrt(static_cast<double>(n_samples));
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      const double dev = std::abs(out.empirical_cov(i, j) - out.gram(i, j));
      const double g = out.gram(i, j);
      const double band = std::sqrt(out.gram(i, i) * out.gram(j, j) + g * g) / root_n;
      out.max_deviation = std::max(out.max_deviation, dev);
      const double ratio = band > 0.0 ? dev / band : (dev > 0.0 ? INFINITY : 0.0);
      out.max_band_ratio = std::max(out.max_band_ratio, ratio);
    }
  }
  return out;
}

}  // namespace isokernel
