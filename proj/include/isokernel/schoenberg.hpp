#pragma once

#include "isokernel/kernel.hpp"

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <vector>

namespace isokernel {

/// Coefficient kernels α_n(r_i, r_j), n = 0..n_max, on a radial grid.
struct CoefficientTable {
  Dimension dim = Dimension::infinite();
  std::vector<double> radii;            // strictly increasing, >= 0
  int n_max = 0;
  std::vector<Eigen::MatrixXd> values;  // values[n](i, j) = α_n(r_i, r_j)

  double operator()(int n, int i, int j) const { return values[n](i, j); }
  Eigen::Index num_radii() const { return static_cast<Eigen::Index>(radii.size()); }

  /// Shape, finiteness, symmetry and zero-at-origin; throws std::invalid_argument.
  void validate() const;
  /// Σ_n Σ_i α_n(r_i, r_i), the trace of the truncated kernel diagonal.
  double total_trace() const;
  /// Index of the grid radius equal to r (relative tolerance 1e-12), if any.
  std::optional<Eigen::Index> find_radius(double r) const;
};

struct DecomposeOptions {
  /// Gauss-Gegenbauer node count for finite d; default n_max + 16.
  std::optional<int> quad_nodes;
  /// Permit n_max > 60 on the d = inf path.
  bool allow_high_degree = false;
  /// Worker threads over radius pairs; 0 reads ISOKERNEL_THREADS (default 1).
  int threads = 0;
};

inline constexpr int kMaxInfiniteDegree = 60;

/// α_n(r, s) = ⟨κ(r, s, rs ·), P̄_n⟩_w / ‖P̄_n‖²_w for finite d; for d = inf the
/// monomial coefficients of ρ ↦ κ(r, s, rs ρ). Pairs involving r = 0 only
/// carry α_0 = κ(r, s, 0).
CoefficientTable decompose(const IsotropicKernel& kernel, std::span<const double> radii, int n_max,
                           const DecomposeOptions& options = {});

/// κ̂(r_i, r_j, γ) = Σ_n α_n(r_i, r_j) P̄_n(γ / (r_i r_j)); radii must lie on the grid.
IsotropicKernel reconstruct(const CoefficientTable& table);

/// max |κ - κ̂| over grid pairs and `gamma_samples` equispaced γ in [-r_i r_j, r_i r_j].
double residual(const IsotropicKernel& kernel, const CoefficientTable& table, int gamma_samples);

struct DimensionLimitReport {
  std::vector<int> dims;
  /// deviation(k, n) = max_{i,j} |α_n^(dims[k])(r_i, r_j) - α_n^(inf)(r_i, r_j)|
  Eigen::MatrixXd deviation;
};

/// Re-decomposes a kernel valid in all dimensions at each finite d and
/// compares against its l^2 coefficients.
DimensionLimitReport dim_limit_check(const IsotropicKernel& kernel, std::span<const int> dims,
                                     std::span<const double> radii, int n_max,
                                     const DecomposeOptions& options = {});

/// Smallest eigenvalue of a symmetric matrix (0 for an empty matrix).
double min_eigenvalue(const Eigen::MatrixXd& m);

}  // namespace isokernel
