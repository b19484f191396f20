#include "fmd/simulate.hpp"

#include "fmd/errors.hpp"
#include "fmd/rng.hpp"
#include "fmd/stats.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

namespace fmd {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

}  // namespace

Eigen::MatrixXd kernel_matrix(const KernelSpec& kernel, const Grid& grid) {
  const Index p = grid.size();
  if (kernel.family == KernelFamily::custom_table) {
    if (!kernel.table || kernel.table->rows() != p || kernel.table->cols() != p)
      throw std::invalid_argument("kernel_matrix: custom table does not match grid");
    return *kernel.table;
  }
  Eigen::MatrixXd k(p, p);
  for (Index i = 0; i < p; ++i) {
    for (Index j = 0; j <= i; ++j) {
      const double s = grid.points(i);
      const double t = grid.points(j);
      double v = 0.0;
      switch (kernel.family) {
        case KernelFamily::ou:
          v = kernel.scale * std::exp(-std::abs(s - t) / kernel.range);
          break;
        case KernelFamily::brownian:
          v = std::min(s, t);
          break;
        case KernelFamily::bridge:
          v = std::min(s, t) - s * t;
          break;
        case KernelFamily::custom_table:
          break;
      }
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

namespace {

// Symmetric factorization L with L L^T = K. Spectral factorization handles
// the semidefinite kernels (motion/bridge pin entire grid points to zero
// variance, which jitter would wash out); indefinite input falls back on the
// jitter escalation before giving up.
Eigen::MatrixXd factor_kernel(Eigen::MatrixXd k) {
  const double scale = std::max(1e-300, k.diagonal().maxCoeff());
  double jitter = 1e-10 * scale;
  for (int escalation = 0; escalation <= 3; ++escalation) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(k);
    if (eig.info() == Eigen::Success && eig.eigenvalues().minCoeff() >= -1e-10 * scale) {
      return eig.eigenvectors() *
             eig.eigenvalues().cwiseMax(0.0).array().sqrt().matrix().asDiagonal();
    }
    k.diagonal().array() += jitter;
    jitter *= 10.0;
  }
  throw NumericError("gp_sample: kernel matrix not factorizable after jitter escalation");
}

}  // namespace

FunctionalSample gp_sample(const KernelSpec& kernel, const Curve& mean, const Grid& grid, Index n,
                           std::uint64_t seed) {
  check_alignment(mean, grid, "gp_sample");
  if (n < 1) throw std::invalid_argument("gp_sample: need n >= 1");
  const Index p = grid.size();
  const Eigen::MatrixXd chol = factor_kernel(kernel_matrix(kernel, grid));

  FunctionalSample sample;
  sample.grid = grid;
  sample.curves.resize(n, p);
  for (Index i = 0; i < n; ++i) {
    Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(i));
    Eigen::VectorXd z(p);
    for (Index j = 0; j < p; ++j) z(j) = rng.normal();
    sample.curves.row(i) = (mean + chol * z).transpose();
  }
  return sample;
}

FunctionalSample contamination_model(int model_id, Index n, double c, const Grid& grid,
                                     std::uint64_t seed) {
  if (model_id < 1 || model_id > 3)
    throw std::invalid_argument("contamination_model: model_id must be 1, 2 or 3");
  if (n < 1) throw std::invalid_argument("contamination_model: need n >= 1");
  if (!(c >= 0.0 && c < 1.0))
    throw std::invalid_argument("contamination_model: c must be in [0, 1)");

  const Index n_contaminated = static_cast<Index>(std::ceil(c * static_cast<double>(n)));
  const Index n_main = n - n_contaminated;
  const Index p = grid.size();
  const Eigen::ArrayXd t = grid.points.array();

  KernelSpec noise;
  noise.family = KernelFamily::ou;
  if (model_id == 1) {
    noise.scale = 0.3;
    noise.range = 0.3;
  } else {
    noise.scale = 1.0;
    noise.range = 1.0;
  }

  Curve main_mean(p);
  if (model_id == 1)
    main_mean = (30.0 * t * (1.0 - t).pow(1.5)).matrix();
  else
    main_mean = (4.0 * t).matrix();

  FunctionalSample sample;
  sample.grid = grid;
  sample.curves.resize(n, p);
  sample.labels.assign(static_cast<size_t>(n), 0);

  std::uint64_t derive = seed;
  const std::uint64_t main_seed = splitmix64_next(derive);
  const std::uint64_t cont_seed = splitmix64_next(derive);
  const std::uint64_t shift_seed = splitmix64_next(derive);

  if (n_main > 0) {
    FunctionalSample main_block = gp_sample(noise, main_mean, grid, n_main, main_seed);
    sample.curves.topRows(n_main) = main_block.curves;
  }

  if (n_contaminated > 0) {
    FunctionalSample cont_noise =
        gp_sample(noise, Curve::Zero(p), grid, n_contaminated, cont_seed);
    for (Index i = 0; i < n_contaminated; ++i) {
      Rng rng = Rng::substream(shift_seed, static_cast<std::uint64_t>(i));
      Curve shape(p);
      if (model_id == 1) {
        shape = (30.0 * t.pow(1.5) * (1.0 - t)).matrix();
      } else if (model_id == 2) {
        const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
        const double mu = 0.25 + 0.5 * rng.uniform();
        shape = (4.0 * t + sign * 1.8 +
                 std::pow(0.02 * kPi, -0.5) * (-(t - mu).square() / 0.02).exp())
                    .matrix();
      } else {
        const double mu = 0.25 + 0.5 * rng.uniform();
        shape = (4.0 * t + 2.0 * (4.0 * (t + mu) * kPi).sin()).matrix();
      }
      sample.curves.row(n_main + i) = (shape + cont_noise.curve(i)).transpose();
      sample.labels[static_cast<size_t>(n_main + i)] = 1;
    }
  }
  return sample;
}

FunctionalSample brownian_pair(double T_cut, Index n_per_class, Index grid_size,
                               std::uint64_t seed) {
  if (!(T_cut > 0.0 && T_cut <= 1.0))
    throw std::invalid_argument("brownian_pair: T_cut must be in (0, 1]");
  if (n_per_class < 1) throw std::invalid_argument("brownian_pair: need n_per_class >= 1");
  const Grid full = make_uniform_grid(grid_size);

  Index kept = 0;
  while (kept < grid_size && full.points(kept) <= T_cut + 1e-12) ++kept;
  if (kept < 2) throw std::invalid_argument("brownian_pair: cut grid has fewer than 2 points");
  const Grid cut = make_trapezoid_grid(full.points.head(kept));

  KernelSpec motion{KernelFamily::brownian, 1.0, 1.0, std::nullopt};
  KernelSpec bridge{KernelFamily::bridge, 1.0, 1.0, std::nullopt};
  std::uint64_t tmp = seed;
  const std::uint64_t seed0 = splitmix64_next(tmp);
  const std::uint64_t seed1 = splitmix64_next(tmp);
  FunctionalSample motions = gp_sample(motion, Curve::Zero(grid_size), full, n_per_class, seed0);
  FunctionalSample bridges = gp_sample(bridge, Curve::Zero(grid_size), full, n_per_class, seed1);

  FunctionalSample sample;
  sample.grid = cut;
  sample.curves.resize(2 * n_per_class, kept);
  sample.curves.topRows(n_per_class) = motions.curves.leftCols(kept);
  sample.curves.bottomRows(n_per_class) = bridges.curves.leftCols(kept);
  sample.labels.assign(static_cast<size_t>(2 * n_per_class), 0);
  for (Index i = 0; i < n_per_class; ++i) sample.labels[static_cast<size_t>(n_per_class + i)] = 1;
  return sample;
}

double bayes_error_cut(double T) {
  if (!(T > 0.0 && T <= 1.0)) throw std::invalid_argument("bayes_error_cut: T must be in (0, 1]");
  if (T == 1.0) return 0.0;
  const double num = std::sqrt(-(1.0 - T) * std::log(1.0 - T));
  return 0.5 - normal_cdf(num / std::sqrt(T * (1.0 - T))) + normal_cdf(num / std::sqrt(T));
}

namespace {

// Fourier basis phi_1 = 1, then sqrt(2) cos / sin pairs of increasing frequency.
Eigen::VectorXd fourier_mode(int j, const Eigen::ArrayXd& t) {
  if (j == 1) return Eigen::VectorXd::Ones(t.size());
  const int pair = j / 2;
  const double freq = 2.0 * kPi * pair;
  if (j % 2 == 0) return (std::sqrt(2.0) * (freq * t).cos()).matrix();
  return (std::sqrt(2.0) * (freq * t).sin()).matrix();
}

}  // namespace

FunctionalSample scenario_sample(const ScenarioSpec& spec, Index n_per_class, const Grid& grid,
                                 std::uint64_t seed) {
  if (n_per_class < 1) throw std::invalid_argument("scenario_sample: need n_per_class >= 1");
  if (spec.n_modes < 1) throw std::invalid_argument("scenario_sample: need n_modes >= 1");
  const Index p = grid.size();
  const Eigen::ArrayXd t = grid.points.array();

  Eigen::MatrixXd basis(p, spec.n_modes);
  for (int j = 1; j <= spec.n_modes; ++j) basis.col(j - 1) = fourier_mode(j, t);

  FunctionalSample sample;
  sample.grid = grid;
  sample.curves.resize(2 * n_per_class, p);
  sample.labels.assign(static_cast<size_t>(2 * n_per_class), 0);

  for (Index row = 0; row < 2 * n_per_class; ++row) {
    const int cls = row < n_per_class ? 0 : 1;
    sample.labels[static_cast<size_t>(row)] = cls;
    Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(row));

    Eigen::VectorXd mean = Eigen::VectorXd::Zero(p);
    if (cls == 1 && spec.different_means) mean = t.matrix();

    double divisor = 1.0;
    if (spec.scenario == Scenario::C) {
      double chi = 0.0;
      for (int i = 0; i < 30; ++i) {
        const double z = rng.normal();
        chi += z * z;
      }
      divisor = chi / 30.0;
    }

    Eigen::VectorXd coeff(spec.n_modes);
    for (int j = 1; j <= spec.n_modes; ++j) {
      const double rate = (cls == 1 && spec.different_sds) ? 2.0 : 3.0;
      const double sd = std::exp(-static_cast<double>(j) / (2.0 * rate));
      double a = 0.0;
      if (spec.scenario == Scenario::A) {
        a = sd * rng.normal();
      } else {
        // Centered exponential with the requested variance.
        a = sd * (-std::log(rng.uniform()) - 1.0);
      }
      coeff(j - 1) = a / divisor;
    }

    Eigen::VectorXd curve = mean + basis * coeff;
    if (spec.scenario != Scenario::C) {
      for (Index i = 0; i < p; ++i) curve(i) += spec.noise_sd * rng.normal();
    }
    sample.curves.row(row) = curve.transpose();
  }
  return sample;
}

}  // namespace fmd
