// Integration gate: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Tolerances are pinned in code next to each check.

#include "fmd/bench.hpp"
#include "fmd/distribution.hpp"
#include "fmd/rng.hpp"
#include "fmd/simulate.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

using namespace fmd;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Harness {
  int failures = 0;

  void run(const std::string& name, const std::function<bool(std::string&)>& body,
           double budget_seconds = 0.0) {
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
      ok = body(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (ok && budget_seconds > 0.0 && seconds > budget_seconds) {
      ok = false;
      detail += " [over runtime budget]";
    }
    std::printf("[%s] %s (%.1fs)%s%s\n", ok ? "PASS" : "FAIL", name.c_str(), seconds,
                detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
};

Curve random_curve(Index p, Rng& rng) {
  Curve x(p);
  for (Index i = 0; i < p; ++i) x(i) = rng.normal();
  return x;
}

CovKernel kernel_on_grid(KernelFamily family, double scale, double range, Index p) {
  const Grid grid = make_uniform_grid(p);
  return {grid, kernel_matrix({family, scale, range, std::nullopt}, grid)};
}

// Dense formulation ||K_W^{1/2} (K_W + alpha I)^{-1} W^{1/2} y||, built from a
// direct solve and an explicit matrix square root.
struct DenseOracle {
  Eigen::MatrixXd kw;
  Eigen::MatrixXd sqrt_kw;
  Eigen::VectorXd sqrt_w;

  explicit DenseOracle(const CovKernel& cov) {
    sqrt_w = cov.grid.weights.array().sqrt().matrix();
    kw = sqrt_w.asDiagonal() * cov.matrix * sqrt_w.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(kw);
    sqrt_kw = eig.eigenvectors() *
              eig.eigenvalues().cwiseMax(0.0).array().sqrt().matrix().asDiagonal() *
              eig.eigenvectors().transpose();
  }

  double distance(double alpha, const Curve& y) const {
    const Index p = kw.rows();
    const Eigen::VectorXd z = sqrt_w.asDiagonal() * y;
    const Eigen::VectorXd u =
        (kw + alpha * Eigen::MatrixXd::Identity(p, p)).ldlt().solve(z);
    return (sqrt_kw * u).norm();
  }
};

bool criterion_spectral_vs_dense(std::string& detail) {
  const Index p = 200;
  Rng rng(1001);
  double worst = 0.0;
  for (const auto family : {KernelFamily::brownian, KernelFamily::ou}) {
    const CovKernel cov = kernel_on_grid(family, 0.3, 0.3, p);
    const EigenSystem sys = eigendecompose(cov);
    const DenseOracle oracle(cov);
    for (int rep = 0; rep < 100; ++rep) {
      const Curve x = random_curve(p, rng);
      const Curve m = random_curve(p, rng);
      const double alpha = std::pow(10.0, -4.0 + 4.0 * rng.uniform());
      const double spectral = mahalanobis_distance(x, m, MahalanobisModel{sys, alpha});
      const double dense = oracle.distance(alpha, x - m);
      worst = std::max(worst, std::abs(spectral - dense) / dense);
    }
  }
  detail = "max relative gap " + std::to_string(worst);
  return worst < 1e-8;
}

bool criterion_metric_and_invariance(std::string& detail) {
  const Index p = 60;
  const Grid grid = make_uniform_grid(p);
  Rng rng(2002);

  const FunctionalSample sample =
      gp_sample({KernelFamily::ou, 0.3, 0.3, std::nullopt}, Curve::Zero(p), grid, 150, 17);
  const MahalanobisModel model = fit_model(sample, 0.01);

  for (int rep = 0; rep < 1000; ++rep) {
    const Curve x = random_curve(p, rng);
    const Curve y = random_curve(p, rng);
    const Curve z = random_curve(p, rng);
    if (mahalanobis_distance(x, y, model) != mahalanobis_distance(y, x, model)) {
      detail = "symmetry violated";
      return false;
    }
    const double gap = mahalanobis_distance(x, z, model) - mahalanobis_distance(x, y, model) -
                       mahalanobis_distance(y, z, model);
    if (gap > 1e-10) {
      detail = "triangle inequality violated by " + std::to_string(gap);
      return false;
    }
  }

  double worst = 0.0;
  const Eigen::VectorXd sqrt_w = grid.weights.array().sqrt().matrix();
  for (int rep = 0; rep < 50; ++rep) {
    Eigen::MatrixXd m(p, p);
    for (Index i = 0; i < p; ++i)
      for (Index j = 0; j < p; ++j) m(i, j) = rng.normal();
    const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(m).householderQ();
    const Eigen::MatrixXd iso =
        sqrt_w.array().inverse().matrix().asDiagonal() * (q * sqrt_w.asDiagonal()).eval();

    FunctionalSample mapped;
    mapped.grid = grid;
    mapped.curves = sample.curves * iso.transpose();
    const MahalanobisModel refit = fit_model(mapped, 0.01);

    const Curve x = random_curve(p, rng);
    const Curve y = random_curve(p, rng);
    const double before = mahalanobis_distance(x, y, model);
    const double after = mahalanobis_distance(iso * x, iso * y, refit);
    worst = std::max(worst, std::abs(after - before) / before);
  }
  detail = "max isometry gap " + std::to_string(worst);
  return worst < 1e-6;
}

bool criterion_distribution_moments(std::string& detail) {
  Rng rng(3003);
  const int n_mc = 100000;
  for (int spectrum = 0; spectrum < 20; ++spectrum) {
    const Index r = 5 + static_cast<Index>(rng.below(15));
    WeightedChiSq law;
    law.betas.resize(r);
    law.noncentralities.resize(r);
    const bool central = spectrum % 2 == 0;
    const double alpha = std::pow(10.0, -3.0 + 2.0 * rng.uniform());
    for (Index j = 0; j < r; ++j) {
      const double lambda = std::exp(-0.4 * static_cast<double>(j)) * (0.5 + rng.uniform());
      law.betas(j) = lambda * lambda / ((lambda + alpha) * (lambda + alpha));
      law.noncentralities(j) = central ? 0.0 : rng.uniform() * 2.0;
    }

    const auto [mean, variance] = wcs_moments(law);
    const std::vector<double> draws = wcs_sample(law, n_mc, 555 + spectrum);
    double mc_mean = 0.0;
    for (double d : draws) mc_mean += d;
    mc_mean /= n_mc;
    double ss = 0.0, m4 = 0.0;
    for (double d : draws) {
      const double c = d - mc_mean;
      ss += c * c;
      m4 += c * c * c * c;
    }
    const double mc_var = ss / (n_mc - 1);
    m4 /= n_mc;

    const double se_mean = std::sqrt(mc_var / n_mc);
    const double se_var = std::sqrt(std::max(0.0, m4 - mc_var * mc_var) / n_mc);
    if (std::abs(mc_mean - mean) > 3.0 * se_mean) {
      detail = "mean off at spectrum " + std::to_string(spectrum);
      return false;
    }
    if (std::abs(mc_var - variance) > 3.0 * se_var) {
      detail = "variance off at spectrum " + std::to_string(spectrum);
      return false;
    }
  }
  return true;
}

bool criterion_mercer(std::string& detail) {
  const EigenSystem sys = eigendecompose(kernel_on_grid(KernelFamily::brownian, 1, 1, 500));
  double worst = 0.0;
  for (int j = 1; j <= 5; ++j) {
    const double analytic = 1.0 / std::pow((j - 0.5) * kPi, 2);
    worst = std::max(worst, std::abs(sys.eigenvalues(j - 1) - analytic) / analytic);
  }
  detail = "max relative eigenvalue error " + std::to_string(worst);
  return worst < 0.01;
}

bool criterion_table1_contaminated(std::string& detail) {
  BenchConfig cfg;
  cfg.reps = 50;
  cfg.seed = 424242;
  const OutlierCell cell = run_outlier_cell(2, 0.1, cfg);
  detail = "p_c " + std::to_string(cell.pc_mean) + ", p_f " + std::to_string(cell.pf_mean);
  return cell.pc_mean >= 0.99 && cell.pf_mean >= 0.005 && cell.pf_mean <= 0.03;
}

bool criterion_table1_clean(std::string& detail) {
  BenchConfig cfg;
  cfg.reps = 50;
  cfg.seed = 424243;
  const OutlierCell cell = run_outlier_cell(1, 0.0, cfg);
  detail = "p_f " + std::to_string(cell.pf_mean);
  return cell.pf_mean >= 0.02 && cell.pf_mean <= 0.06;
}

bool criterion_table2(std::string& detail) {
  const double expected[] = {33.9, 30.8, 26.9, 20.9, 0.0};
  const double cuts[] = {0.75, 0.8125, 0.875, 0.9375, 1.0};
  for (int i = 0; i < 5; ++i) {
    if (std::abs(100.0 * bayes_error_cut(cuts[i]) - expected[i]) > 0.1) {
      detail = "Bayes column mismatch at cut " + std::to_string(cuts[i]);
      return false;
    }
  }

  BenchConfig cfg;
  cfg.experiment = Experiment::bm_bridge;
  cfg.reps = 100;
  cfg.seed = 77001;
  const ClassifyCell cell = run_bm_bridge_cell(1.0, cfg);
  detail = "M_alpha error " + std::to_string(cell.malpha.mean) + "% (sd " +
           std::to_string(cell.malpha.sd) + ")";
  return cell.malpha.mean >= 23.5 && cell.malpha.mean <= 29.5;
}

bool criterion_table3(std::string& detail) {
  BenchConfig cfg;
  cfg.experiment = Experiment::scenarios;
  cfg.reps = 100;
  cfg.seed = 88001;
  const ClassifyCell cell = run_scenario_cell(Scenario::B, true, true, 100, cfg);
  detail = "M_alpha error " + std::to_string(cell.malpha.mean) + "% (sd " +
           std::to_string(cell.malpha.sd) + ")";
  return cell.malpha.mean >= 4.7 && cell.malpha.mean <= 10.7;
}

bool criterion_consistency(std::string& detail) {
  const Index p = 100;
  const Grid grid = make_uniform_grid(p);
  const CovKernel truth = kernel_on_grid(KernelFamily::brownian, 1, 1, p);
  EigenSystem true_sys = eigendecompose(truth);
  true_sys.mean = Curve::Zero(p);
  const MahalanobisModel reference{true_sys, 0.01};

  std::vector<Curve> tests;
  tests.push_back(grid.points);
  Curve wave(p);
  for (Index i = 0; i < p; ++i) wave(i) = std::sin(2.0 * kPi * grid.points(i));
  tests.push_back(wave);

  auto median_error = [&](Index n) {
    std::vector<double> errors;
    for (int rep = 0; rep < 20; ++rep) {
      const FunctionalSample sample =
          gp_sample({KernelFamily::brownian, 1.0, 1.0, std::nullopt}, Curve::Zero(p), grid, n,
                    derive_seed(9009, static_cast<std::uint64_t>(rep), static_cast<std::uint64_t>(n)));
      const MahalanobisModel fitted = fit_model(sample, 0.01);
      double err = 0.0;
      for (const Curve& x : tests) {
        const double estimated = mahalanobis_distance(x, fitted.eigsys.mean, fitted);
        const double target = mahalanobis_distance(x, reference.eigsys.mean, reference);
        err += std::abs(estimated - target);
      }
      errors.push_back(err / static_cast<double>(tests.size()));
    }
    std::sort(errors.begin(), errors.end());
    return 0.5 * (errors[9] + errors[10]);
  };

  const double coarse = median_error(50);
  const double fine = median_error(800);
  detail = "median |error| n=50: " + std::to_string(coarse) + ", n=800: " + std::to_string(fine);
  return fine < coarse;
}

bool criterion_alpha_and_asymptotics(std::string& detail) {
  const Index p = 50;
  const Grid grid = make_uniform_grid(p);
  const EigenSystem sys = eigendecompose(kernel_on_grid(KernelFamily::brownian, 1, 1, p));
  Rng rng(4004);

  // Strict alpha decrease on 100 random inputs.
  for (int rep = 0; rep < 100; ++rep) {
    const Curve x = random_curve(p, rng);
    double prev = std::numeric_limits<double>::infinity();
    for (double alpha : {1e-3, 1e-2, 1e-1, 1.0, 10.0}) {
      const double d = mahalanobis_distance(x, Curve::Zero(p), MahalanobisModel{sys, alpha});
      if (!(d < prev)) {
        detail = "alpha monotonicity violated";
        return false;
      }
      prev = d;
    }
  }

  // Lipschitz-style continuity: shrinking delta 10x shrinks the increment 5x.
  for (int rep = 0; rep < 20; ++rep) {
    const Curve x = random_curve(p, rng);
    const double alpha = 0.05;
    const double base = mahalanobis_distance(x, Curve::Zero(p), MahalanobisModel{sys, alpha});
    const double d1 = std::abs(
        mahalanobis_distance(x, Curve::Zero(p), MahalanobisModel{sys, alpha + alpha / 2}) - base);
    const double d2 = std::abs(
        mahalanobis_distance(x, Curve::Zero(p), MahalanobisModel{sys, alpha + alpha / 20}) - base);
    if (d2 * 5.0 > d1) {
      detail = "alpha continuity slope test failed";
      return false;
    }
  }

  // Level and power of the sqrt(n) mean statistic.
  const Index n = 200;
  const int reps = 200;
  int reject_null = 0, reject_alt = 0;
  const Curve shift = 0.5 * grid.points;
  for (int rep = 0; rep < reps; ++rep) {
    const std::uint64_t seed = derive_seed(6006, static_cast<std::uint64_t>(rep));
    const FunctionalSample sample =
        gp_sample({KernelFamily::brownian, 1.0, 1.0, std::nullopt}, Curve::Zero(p), grid, n, seed);
    const MahalanobisModel model = fit_model(sample, 0.01);
    const WeightedChiSq null_law = wcs_from_model(model.eigsys, 0.01, model.eigsys.mean);
    const double q95 = wcs_quantile(wcs_sample(null_law, 2000, derive_seed(seed, 1)), 0.95);

    const double stat_null = sqrt_n_mean_stat(sample, Curve::Zero(p), model);
    if (stat_null * stat_null > q95) ++reject_null;
    const double stat_alt = sqrt_n_mean_stat(sample, shift, model);
    if (stat_alt * stat_alt > q95) ++reject_alt;
  }
  const double level = static_cast<double>(reject_null) / reps;
  const double power = static_cast<double>(reject_alt) / reps;
  detail = "level " + std::to_string(level) + ", power " + std::to_string(power);
  return level >= 0.03 && level <= 0.08 && power >= 0.8;
}

}  // namespace

int main() {
  Harness harness;
  harness.run("criterion 1: spectral vs dense solver equivalence", criterion_spectral_vs_dense, 30);
  harness.run("criterion 2: metric axioms and isometry invariance", criterion_metric_and_invariance,
              60);
  harness.run("criterion 3: weighted chi-square moments vs Monte Carlo",
              criterion_distribution_moments, 60);
  harness.run("criterion 4: Brownian kernel Mercer eigenvalues", criterion_mercer, 10);
  harness.run("criterion 5: outlier benchmark, model 2 at c=0.1", criterion_table1_contaminated,
              300);
  harness.run("criterion 6: outlier benchmark, clean-data false rate", criterion_table1_clean);
  harness.run("criterion 7: motion-vs-bridge benchmark at T=1", criterion_table2, 600);
  harness.run("criterion 8: scenario B diff/diff benchmark", criterion_table3, 600);
  harness.run("criterion 9: estimator consistency in n", criterion_consistency);
  harness.run("criterion 10: alpha properties, level and power", criterion_alpha_and_asymptotics);
  if (harness.failures == 0) std::printf("all criteria passed\n");
  return harness.failures;
}
