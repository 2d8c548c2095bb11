#pragma once

#include "isokernel/kernel.hpp"
#include "isokernel/schoenberg.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace isokernel {

/// Relative eigenvalue tolerance used by every positive-definiteness check.
inline constexpr double kEigenTolerance = 1e-10;

struct GramMatrix {
  std::vector<Eigen::VectorXd> points;
  Eigen::MatrixXd entries;
};

/// entries(i, j) = K(x_i, x_j), symmetrized by averaging.
GramMatrix gram(const IsotropicKernel& kernel, const std::vector<Eigen::VectorXd>& points);

struct PdCheck {
  double min_eigenvalue = 0.0;
  bool psd = false;                  // min_eig >= -1e-10 trace
  bool strictly_pd_witness = false;  // min_eig > 1e-10 trace (evidence at these points only)
};

PdCheck check_pd(const Eigen::MatrixXd& entries);
inline PdCheck check_pd(const GramMatrix& g) { return check_pd(g.entries); }

enum class Parity { even, odd };

/// α_γ^e or α_γ^o: Σ of the selected-parity coefficient matrices with degree
/// >= gamma, restricted to the positive radii.
Eigen::MatrixXd parity_tail(const CoefficientTable& table, int gamma, Parity parity);

struct DegreeEigen {
  int n = 0;
  double min_eigenvalue = 0.0;
  bool strictly_pd = false;
};

struct ParityTailEigen {
  int gamma = 0;
  double even_min_eigenvalue = 0.0;
  double odd_min_eigenvalue = 0.0;
};

struct ProbeResult {
  std::vector<int> radius_indices;  // indices into the table's radii
  std::vector<double> c;
  std::vector<int> hits;            // degrees (d = 2: signed n, |n| <= N) with c^T A c > tol
  int even_hits = 0;
  int odd_hits = 0;
  int even_hits_upper = 0;          // within (N/2, N]
  int odd_hits_upper = 0;
};

struct ProgressionEigen {
  int modulus = 0;
  int residue = 0;
  double min_eigenvalue = 0.0;
  double trace = 0.0;
};

struct Violation {
  std::string condition;
  std::string witness;
};

enum class Verdict { consistent, inconsistent };

/// Finite-window evidence for the strict positive definiteness conditions.
struct StrictPDReport {
  Dimension dim = Dimension::infinite();
  int degree_cap = 0;
  std::vector<double> positive_radii;
  double alpha0_at_origin = 0.0;
  double origin_tolerance = 0.0;
  std::vector<DegreeEigen> per_degree;
  std::vector<ParityTailEigen> parity_tails;
  std::vector<ProbeResult> probes;
  std::optional<std::vector<ProgressionEigen>> d2_progressions;
  bool sufficient_condition_established = false;
  Verdict verdict = Verdict::inconsistent;
  std::vector<Violation> violations;
  std::vector<std::string> notes;
};

struct StrictPdOptions {
  int probes = 32;                     // probe vectors per subset size
  std::optional<int> degree_cap;       // defaults to table.n_max
  int k_max = 4;                       // largest progression modulus (d = 2)
  std::uint64_t seed = 0;
};

StrictPDReport strict_pd_evidence(const CoefficientTable& table, const StrictPdOptions& options = {});

/// Kernel given directly on coordinates, for isotropy checks of arbitrary code.
using PointKernel = std::function<double(const Eigen::VectorXd&, const Eigen::VectorXd&)>;

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the
/// signs of R's diagonal folded into Q.
Eigen::MatrixXd random_orthogonal(int d, std::uint64_t seed);

/// max over trials of |K(Ux, Uy) - K(x, y)| with Gaussian x, y and Haar U.
double check_isotropy(const PointKernel& kernel, int embedding_dim, int trials, std::uint64_t seed);
/// As above; d = inf kernels are sampled in an 8-dimensional embedding.
double check_isotropy(const IsotropicKernel& kernel, int trials, std::uint64_t seed);

struct GpSampleResult {
  Eigen::MatrixXd gram;
  Eigen::MatrixXd samples;        // n_samples x m
  Eigen::MatrixXd empirical_cov;  // (1/n) Σ f f^T, the mean being known to be zero
  double max_deviation = 0.0;     // max |empirical_cov - gram|
  double max_band_ratio = 0.0;    // max of that deviation over √(G_ii G_jj + G_ij²) / √n
  double jitter = 0.0;
};

/// Zero-mean Gaussian process draws at `points` through a Cholesky factor of
/// the Gram matrix plus 1e-10 trace / m jitter.
GpSampleResult sample_gp(const IsotropicKernel& kernel, const std::vector<Eigen::VectorXd>& points, int n_samples,
                         std::uint64_t seed);

const char* to_string(Verdict v);

}  // namespace isokernel
