#include "fmd/covariance.hpp"
#include "fmd/rng.hpp"
#include "fmd/simulate.hpp"

#include <doctest.h>

#include <cmath>

using namespace fmd;

namespace {

constexpr double kPi = 3.14159265358979323846;

CovKernel brownian_kernel(Index p) {
  const Grid grid = make_uniform_grid(p);
  return {grid, kernel_matrix({KernelFamily::brownian, 1.0, 1.0, std::nullopt}, grid)};
}

}  // namespace

TEST_CASE("sample_mean basics") {
  const Grid grid = make_uniform_grid(5);
  FunctionalSample sample;
  sample.grid = grid;
  sample.curves.resize(3, 5);
  const Curve c = grid.points * 2.0;
  for (int i = 0; i < 3; ++i) sample.curves.row(i) = c.transpose();
  CHECK((sample_mean(sample) - c).cwiseAbs().maxCoeff() == 0.0);

  FunctionalSample pm;
  pm.grid = grid;
  pm.curves.resize(2, 5);
  pm.curves.row(0) = c.transpose();
  pm.curves.row(1) = -c.transpose();
  CHECK(sample_mean(pm).cwiseAbs().maxCoeff() == 0.0);

  FunctionalSample empty;
  empty.grid = grid;
  empty.curves.resize(0, 5);
  CHECK_THROWS_AS(sample_mean(empty), std::invalid_argument);
}

TEST_CASE("sample_mean of many Brownian paths is near zero") {
  const Grid grid = make_uniform_grid(50);
  const FunctionalSample sample =
      gp_sample({KernelFamily::brownian, 1.0, 1.0, std::nullopt}, Curve::Zero(50), grid, 1000, 2024);
  CHECK(l2_norm(sample_mean(sample), grid) <= 0.15);
}

TEST_CASE("sample_covariance basics") {
  const Grid grid = make_uniform_grid(6);
  FunctionalSample sample;
  sample.grid = grid;
  sample.curves.resize(4, 6);
  for (int i = 0; i < 4; ++i) sample.curves.row(i) = grid.points.transpose();
  CHECK(sample_covariance(sample).matrix.cwiseAbs().maxCoeff() == 0.0);

  // Rows +e and -e: variance of a +-1 coin times outer(e, e).
  Rng rng(5);
  Curve e(6);
  for (Index i = 0; i < 6; ++i) e(i) = rng.normal();
  FunctionalSample pm;
  pm.grid = grid;
  pm.curves.resize(2, 6);
  pm.curves.row(0) = e.transpose();
  pm.curves.row(1) = -e.transpose();
  const Eigen::MatrixXd expected = e * e.transpose();
  CHECK((sample_covariance(pm).matrix - expected).cwiseAbs().maxCoeff() < 1e-14);

  FunctionalSample tiny;
  tiny.grid = grid;
  tiny.curves.resize(1, 6);
  tiny.curves.row(0) = e.transpose();
  CHECK_THROWS_AS(sample_covariance(tiny), std::invalid_argument);
}

TEST_CASE("sample_covariance of Brownian paths approaches min(s,t)") {
  const Grid grid = make_uniform_grid(50);
  const FunctionalSample sample =
      gp_sample({KernelFamily::brownian, 1.0, 1.0, std::nullopt}, Curve::Zero(50), grid, 2000, 99);
  const CovKernel cov = sample_covariance(sample);
  double worst = 0.0;
  for (Index i = 0; i < 50; ++i)
    for (Index j = 0; j < 50; ++j)
      worst = std::max(worst,
                       std::abs(cov.matrix(i, j) - std::min(grid.points(i), grid.points(j))));
  CHECK(worst <= 0.1);
}

TEST_CASE("eigendecompose handles rank-one and zero kernels") {
  const Grid grid = make_uniform_grid(20);
  CovKernel constant{grid, Eigen::MatrixXd::Ones(20, 20)};
  const EigenSystem sys = eigendecompose(constant);
  REQUIRE(sys.rank() == 1);
  CHECK(sys.eigenvalues(0) == doctest::Approx(1.0).epsilon(1e-10));
  // Eigenfunction is the constant 1 (up to sign).
  const double sign = sys.eigenfunctions(0, 0) > 0 ? 1.0 : -1.0;
  CHECK((sys.eigenfunctions.col(0) * sign - Curve::Ones(20)).cwiseAbs().maxCoeff() < 1e-8);

  CovKernel zero{grid, Eigen::MatrixXd::Zero(20, 20)};
  CHECK(eigendecompose(zero).rank() == 0);

  CovKernel skew{grid, Eigen::MatrixXd::Random(20, 20)};
  CHECK_THROWS_AS(eigendecompose(skew), std::invalid_argument);
}

TEST_CASE("eigendecompose recovers Brownian Mercer eigenvalues") {
  const EigenSystem sys = eigendecompose(brownian_kernel(500));
  for (int j = 1; j <= 5; ++j) {
    const double analytic = 1.0 / std::pow((j - 0.5) * kPi, 2);
    CHECK(std::abs(sys.eigenvalues(j - 1) - analytic) / analytic < 0.01);
  }

  // Grid-refinement oracle: the p=250 estimate must be farther from the
  // analytic value than the p=500 one.
  const EigenSystem coarse = eigendecompose(brownian_kernel(250));
  const double analytic1 = 1.0 / std::pow(0.5 * kPi, 2);
  CHECK(std::abs(coarse.eigenvalues(0) - analytic1) >= std::abs(sys.eigenvalues(0) - analytic1));
}

TEST_CASE("eigendecompose invariants: orthonormality, trace, reconstruction") {
  const Grid grid = make_uniform_grid(40);
  const FunctionalSample sample =
      gp_sample({KernelFamily::ou, 0.3, 0.3, std::nullopt}, Curve::Zero(40), grid, 60, 17);
  const CovKernel cov = sample_covariance(sample);
  const EigenSystem sys = eigendecompose(cov);

  for (Index i = 0; i < sys.rank(); ++i)
    for (Index j = 0; j <= i; ++j) {
      const double ip = l2_inner(sys.eigenfunctions.col(i), sys.eigenfunctions.col(j), grid);
      CHECK(std::abs(ip - (i == j ? 1.0 : 0.0)) < 1e-8);
    }

  const double weighted_diag = (cov.matrix.diagonal().array() * grid.weights.array()).sum();
  CHECK(sys.eigenvalues.sum() == doctest::Approx(weighted_diag).epsilon(1e-6));

  // Reconstruction sum_j lambda_j e_j(s) e_j(t).
  Eigen::MatrixXd rebuilt = Eigen::MatrixXd::Zero(40, 40);
  for (Index j = 0; j < sys.rank(); ++j)
    rebuilt += sys.eigenvalues(j) * sys.eigenfunctions.col(j) * sys.eigenfunctions.col(j).transpose();
  const double tol = 1e-12 * sys.eigenvalues(0) * static_cast<double>(sys.rank()) + 1e-10;
  CHECK((rebuilt - cov.matrix).cwiseAbs().maxCoeff() < tol);
}

TEST_CASE("eigendecompose honors max_rank") {
  const EigenSystem sys = eigendecompose(brownian_kernel(80), 1e-12, Index{3});
  CHECK(sys.rank() == 3);
}

TEST_CASE("mcd_covariance with full subset equals the empirical estimates") {
  const Grid grid = make_uniform_grid(30);
  const FunctionalSample sample =
      gp_sample({KernelFamily::ou, 1.0, 1.0, std::nullopt}, Curve::Zero(30), grid, 50, 3);
  const McdEstimate robust = mcd_covariance(sample, 1.0, 5, 1234);
  const CovKernel empirical = sample_covariance(sample);
  CHECK((robust.cov.matrix - empirical.matrix).cwiseAbs().maxCoeff() == 0.0);
  CHECK((robust.mean - sample_mean(sample)).cwiseAbs().maxCoeff() == 0.0);
  CHECK(robust.subset.size() == 50);
}

TEST_CASE("mcd_covariance rejects bad arguments") {
  const Grid grid = make_uniform_grid(10);
  const FunctionalSample sample =
      gp_sample({KernelFamily::ou, 1.0, 1.0, std::nullopt}, Curve::Zero(10), grid, 12, 3);
  CHECK_THROWS_AS(mcd_covariance(sample, 0.4, 2, 1), std::invalid_argument);
  CHECK_THROWS_AS(mcd_covariance(sample, 0.75, 7, 1), std::invalid_argument);
}

TEST_CASE("mcd_covariance isolates Model-1 contamination") {
  // Selected h-subsets should be dominated by main-process curves.
  const Grid grid = make_uniform_grid(50);
  int good_runs = 0;
  const int runs = 50;
  for (int run = 0; run < runs; ++run) {
    const FunctionalSample sample =
        contamination_model(1, 100, 0.2, grid, derive_seed(555, run));
    const McdEstimate robust = mcd_covariance(sample, 0.75, 10, derive_seed(777, run));
    long clean = 0;
    for (Index i : robust.subset) clean += sample.labels[static_cast<size_t>(i)] == 0;
    if (static_cast<double>(clean) / static_cast<double>(robust.subset.size()) >= 0.9) ++good_runs;
  }
  CHECK(good_runs >= 45);
}

TEST_CASE("mcd_covariance tracks empirical eigenvalues on clean data") {
  const Grid grid = make_uniform_grid(50);
  const FunctionalSample sample =
      gp_sample({KernelFamily::brownian, 1.0, 1.0, std::nullopt}, Curve::Zero(50), grid, 200, 9);
  const McdEstimate robust = mcd_covariance(sample, 0.75, 5, 77);
  const EigenSystem emp = eigendecompose(sample_covariance(sample));
  const EigenSystem rob = eigendecompose(robust.cov);
  for (Index j = 0; j < 5; ++j) {
    const double rel = std::abs(rob.eigenvalues(j) - emp.eigenvalues(j)) / emp.eigenvalues(j);
    CHECK(rel < 0.25);
  }
}

TEST_CASE("mcd_default_k follows min(10, n/5)") {
  CHECK(mcd_default_k(100) == 10);
  CHECK(mcd_default_k(30) == 6);
  CHECK(mcd_default_k(4) == 1);
}

TEST_CASE("sample_covariance honors a supplied center") {
  const Grid grid = make_uniform_grid(8);
  const FunctionalSample sample =
      gp_sample({KernelFamily::ou, 1.0, 1.0, std::nullopt}, Curve::Ones(8), grid, 20, 31);
  const Curve zero = Curve::Zero(8);
  const CovKernel about_zero = sample_covariance(sample, zero);
  Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(8, 8);
  for (Index i = 0; i < 20; ++i) expected += sample.curve(i) * sample.curve(i).transpose();
  expected /= 20.0;
  CHECK((about_zero.matrix - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("mcd_covariance is deterministic under the seed") {
  const Grid grid = make_uniform_grid(30);
  const FunctionalSample sample = contamination_model(2, 60, 0.1, grid, 8);
  const McdEstimate a = mcd_covariance(sample, 0.8, 8, 99);
  const McdEstimate b = mcd_covariance(sample, 0.8, 8, 99);
  CHECK(a.subset == b.subset);
  CHECK(a.cov.matrix == b.cov.matrix);
  CHECK(a.mean == b.mean);
}
