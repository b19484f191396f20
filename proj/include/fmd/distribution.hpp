#pragma once

#include "fmd/mahalanobis.hpp"

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace fmd {

/// Law of sum_j beta_j Y_j with Y_j independent noncentral chi^2_1(gamma_j);
/// the distribution of M_alpha^2 under a Gaussian model.
struct WeightedChiSq {
  Eigen::VectorXd betas;            // lambda_j^2 / (lambda_j + alpha)^2
  Eigen::VectorXd noncentralities;  // <m - target, e_j>^2 / lambda_j
};

/// beta_j = lambda_j^2/(lambda_j+alpha)^2, gamma_j = <m-target,e_j>^2/lambda_j.
/// target = mean gives the central case (all gamma_j = 0).
WeightedChiSq wcs_from_model(const EigenSystem& eigsys, double alpha, const Curve& target);

/// Closed-form mean and variance:
/// E = sum beta_j (1 + gamma_j), Var = 2 sum beta_j^2 (1 + 2 gamma_j).
std::pair<double, double> wcs_moments(const WeightedChiSq& law);

/// n_mc draws of sum_j beta_j (Z + sqrt(gamma_j))^2; deterministic under seed
/// and independent of any parallel chunking.
std::vector<double> wcs_sample(const WeightedChiSq& law, int n_mc, std::uint64_t seed);

/// Empirical quantile with linear interpolation between order statistics.
double wcs_quantile(std::span<const double> draws, double q);

/// sqrt(n) * M_alpha(sample mean, m0) under the fitted model; its null
/// reference law is the central weighted chi-square of the model spectrum.
double sqrt_n_mean_stat(const FunctionalSample& sample, const Curve& m0,
                        const MahalanobisModel& model);

/// Silverman rule-of-thumb bandwidth for a Gaussian kernel density estimate.
double silverman_bandwidth(std::span<const double> xs);

/// KL(p || q) between Gaussian KDEs of two samples, integrated by trapezoid
/// on a 512-point grid over the shared support, clipped where either density
/// falls below 1e-12.
double kde_kl_divergence(std::span<const double> p_sample, std::span<const double> q_sample);

/// Smallest alpha in the grid minimizing KL between the KDE of the observed
/// squared distances and the KDE of central-law Monte Carlo draws.
double tune_alpha_kl(std::span<const double> distances_sq, const EigenSystem& eigsys,
                     std::span<const double> alpha_grid, int n_mc, std::uint64_t seed);

}  // namespace fmd
