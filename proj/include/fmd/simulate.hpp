#pragma once

#include "fmd/grid.hpp"

#include <cstdint>
#include <optional>

namespace fmd {

enum class KernelFamily { ou, brownian, bridge, custom_table };

/// Covariance kernel description for trajectory simulation.
/// ou: scale * exp(-|s-t| / range); brownian: min(s,t);
/// bridge: min(s,t) - s*t; custom_table: an explicit grid matrix.
struct KernelSpec {
  KernelFamily family = KernelFamily::brownian;
  double scale = 1.0;
  double range = 1.0;
  std::optional<Eigen::MatrixXd> table;
};

/// Kernel matrix K(t_i, t_j) on the grid.
Eigen::MatrixXd kernel_matrix(const KernelSpec& kernel, const Grid& grid);

/// n Gaussian trajectories mean + L z, with L a Cholesky factor of the grid
/// kernel matrix. Semidefinite kernels get diagonal jitter 1e-10 * max-diag,
/// escalated x10 at most three times before a numeric failure is raised.
/// Curve i is drawn from substream (seed, i), so results do not depend on
/// evaluation order.
FunctionalSample gp_sample(const KernelSpec& kernel, const Curve& mean, const Grid& grid, Index n,
                           std::uint64_t seed);

/// Contaminated samples of the three outlier benchmark models. ceil(c*n)
/// curves come from the contamination process and carry label 1; the rest are
/// main-process curves with label 0.
FunctionalSample contamination_model(int model_id, Index n, double c, const Grid& grid,
                                     std::uint64_t seed);

/// Brownian motion (label 0) vs Brownian bridge (label 1), n_per_class each,
/// simulated on a grid_size-point grid over [0,1] and truncated to the points
/// <= T_cut.
FunctionalSample brownian_pair(double T_cut, Index n_per_class, Index grid_size,
                               std::uint64_t seed);

/// Closed-form Bayes error of the cut motion-vs-bridge problem with equal
/// priors; T = 1 is the zero-error limit.
double bayes_error_cut(double T);

enum class Scenario { A, B, C };

/// Factor combinations of the basis-expansion classification benchmark.
struct ScenarioSpec {
  Scenario scenario = Scenario::A;
  bool different_means = false;  // class-1 mean t instead of 0
  bool different_sds = false;    // class-1 coefficient variance exp(-j/2) instead of exp(-j/3)
  int n_modes = 50;
  double noise_sd = 0.1;  // scenarios A and B only
};

/// Two-class Fourier-coefficient processes on the given grid (51 equispaced
/// points in the benchmark), n_per_class curves per class, labels 0/1.
FunctionalSample scenario_sample(const ScenarioSpec& spec, Index n_per_class, const Grid& grid,
                                 std::uint64_t seed);

}  // namespace fmd
