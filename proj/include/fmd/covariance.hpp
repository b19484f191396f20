#pragma once

#include "fmd/grid.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace fmd {

/// Discretized covariance kernel: matrix(i,j) = K(t_i, t_j).
struct CovKernel {
  Grid grid;
  Eigen::MatrixXd matrix;  // p x p symmetric
};

/// Mean function plus quadrature-orthonormal eigenpairs of the covariance
/// operator. Eigenvalues are positive and nonincreasing; eigenfunction j is
/// column j of `eigenfunctions` and satisfies l2_inner(e_i, e_j) = delta_ij.
struct EigenSystem {
  Grid grid;
  Curve mean;
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenfunctions;  // p x r

  Index rank() const { return eigenvalues.size(); }
};

Curve sample_mean(const FunctionalSample& sample);

/// Divisor-n covariance; `center` replaces the sample mean when supplied.
CovKernel sample_covariance(const FunctionalSample& sample,
                            const std::optional<Curve>& center = std::nullopt);

/// Weighted symmetric eigenproblem: A = W^{1/2} K W^{1/2} is decomposed and
/// eigenvectors are mapped back through W^{-1/2}, so the returned
/// eigenfunctions are orthonormal in the quadrature inner product.
/// Eigenvalues below tol_rel * lambda_max (and negative rounding artifacts)
/// are dropped. The mean is left at zero for the caller to fill in.
EigenSystem eigendecompose(const CovKernel& cov, double tol_rel = 1e-12,
                           std::optional<Index> max_rank = std::nullopt);

struct McdEstimate {
  CovKernel cov;
  Curve mean;
  std::vector<Index> subset;  // indices of the h-subset the estimate is built from
};

/// FAST-MCD robust location/scatter. Curves are projected onto the leading
/// k_dims empirical eigenfunctions; the determinant-minimizing h-subset of
/// the scores (h = ceil(h_fraction * n), >= 20 seeded restarts with
/// concentration steps) selects the curves from which mean and covariance are
/// rebuilt in curve space. With h_fraction = 1 the result is bit-identical to
/// sample_mean / sample_covariance.
McdEstimate mcd_covariance(const FunctionalSample& sample, double h_fraction, Index k_dims,
                           std::uint64_t seed);

/// Default score-space dimension for MCD: min(10, n/5), at least 1.
Index mcd_default_k(Index n);

/// Convenience: mean + covariance + eigendecomposition in one call.
EigenSystem eigensystem_from_sample(const FunctionalSample& sample, double tol_rel = 1e-12,
                                    std::optional<Index> max_rank = std::nullopt);

}  // namespace fmd
