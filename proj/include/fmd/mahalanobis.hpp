#pragma once

#include "fmd/covariance.hpp"

namespace fmd {

/// Fitted distance engine: eigensystem plus regularization alpha > 0.
struct MahalanobisModel {
  EigenSystem eigsys;
  double alpha = 0.0;
};

MahalanobisModel fit_model(const FunctionalSample& sample, double alpha, double tol_rel = 1e-12);

/// Penalized projection x_alpha = sum_j lambda_j/(lambda_j+alpha) <x,e_j> e_j.
Curve smooth_trajectory(const Curve& x, const MahalanobisModel& model);

/// M_alpha(x, m) = sqrt( sum_j lambda_j/(lambda_j+alpha)^2 <x-m,e_j>^2 ).
double mahalanobis_distance(const Curve& x, const Curve& m, const MahalanobisModel& model);

double mahalanobis_distance_sq(const Curve& x, const Curve& m, const MahalanobisModel& model);

/// Rank-truncated RKHS norm sqrt( sum_{j<=r} <x,e_j>^2 / lambda_j ). The
/// untruncated series diverges a.s. for process trajectories; callers who
/// need the exact series must supply an analytic spectrum.
double rkhs_norm(const Curve& x, const EigenSystem& eigsys);

/// Truncated spectral semidistance over the first k modes.
double dfm_semidistance(const Curve& x, const Curve& m, const EigenSystem& eigsys, Index k);

/// Centrality score (1 + M_alpha(x, mean)^2)^{-1} in (0, 1].
double depth(const Curve& x, const MahalanobisModel& model);

}  // namespace fmd
