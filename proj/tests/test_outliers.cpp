#include "fmd/outliers.hpp"

#include "fmd/rng.hpp"
#include "fmd/simulate.hpp"

#include <doctest.h>

#include <cmath>

using namespace fmd;

namespace {

// Constant curves plus small jitter, optionally with one far-off curve.
FunctionalSample jitter_sample(Index n, Index p, double jitter_sd, std::uint64_t seed,
                               bool plant_outlier = false) {
  FunctionalSample out;
  out.grid = make_uniform_grid(p);
  out.curves.resize(n, p);
  Rng rng(seed);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < p; ++j) out.curves(i, j) = 1.0 + jitter_sd * rng.normal();
  if (plant_outlier) out.curves.row(n - 1).array() += 10.0 * jitter_sd;
  return out;
}

}  // namespace

TEST_CASE("detect_outliers flag/threshold consistency and argument checks") {
  const Grid grid = make_uniform_grid(30);
  const FunctionalSample sample =
      gp_sample({KernelFamily::ou, 0.3, 0.3, std::nullopt}, Curve::Zero(30), grid, 60, 2);

  const OutlierReport report =
      detect_outliers(sample, 0.01, 0.95, CovMode::empirical, 2000, 5);
  REQUIRE(report.distances_sq.size() == 60);
  for (size_t i = 0; i < report.flags.size(); ++i)
    CHECK(report.flags[i] == (report.distances_sq[i] > report.threshold));

  CHECK_THROWS_AS(detect_outliers(sample, -1.0, 0.95, CovMode::empirical, 100, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(detect_outliers(sample, 0.01, 1.0, CovMode::empirical, 100, 1),
                  std::invalid_argument);
}

TEST_CASE("level close to one flags nothing on clean data") {
  const FunctionalSample sample = jitter_sample(40, 25, 0.05, 77);
  const OutlierReport report =
      detect_outliers(sample, 0.01, 0.9999, CovMode::empirical, 2000, 3);
  long flagged = 0;
  for (bool f : report.flags) flagged += f;
  CHECK(flagged == 0);
}

TEST_CASE("raising the level never increases the number of flags") {
  const Grid grid = make_uniform_grid(30);
  const FunctionalSample sample =
      gp_sample({KernelFamily::ou, 1.0, 1.0, std::nullopt}, Curve::Zero(30), grid, 80, 4);
  long prev = 81;
  for (double level : {0.80, 0.90, 0.95, 0.99}) {
    const OutlierReport report =
        detect_outliers(sample, 0.01, level, CovMode::empirical, 2000, 11);
    long flagged = 0;
    for (bool f : report.flags) flagged += f;
    CHECK(flagged <= prev);
    prev = flagged;
  }
}

TEST_CASE("mcd mode with full subset is bit-identical to empirical") {
  const Grid grid = make_uniform_grid(25);
  const FunctionalSample sample =
      gp_sample({KernelFamily::ou, 0.3, 0.3, std::nullopt}, Curve::Zero(25), grid, 50, 6);
  McdOptions full;
  full.h_fraction = 1.0;
  const OutlierReport emp = detect_outliers(sample, 0.01, 0.95, CovMode::empirical, 500, 9);
  const OutlierReport mcd = detect_outliers(sample, 0.01, 0.95, CovMode::mcd, 500, 9, full);
  CHECK(emp.threshold == mcd.threshold);
  CHECK(emp.distances_sq == mcd.distances_sq);
  CHECK(emp.flags == mcd.flags);
}

TEST_CASE("evaluate_detection corner cases") {
  const std::vector<bool> truth = {true, false, false, true};
  auto [pc, pf] = evaluate_detection(truth, truth);
  CHECK(pc == 1.0);
  CHECK(pf == 0.0);

  auto [pc0, pf0] = evaluate_detection(std::vector<bool>(4, false), truth);
  CHECK(pc0 == 0.0);
  CHECK(pf0 == 0.0);

  std::vector<bool> inverted(4);
  for (size_t i = 0; i < 4; ++i) inverted[i] = !truth[i];
  auto [pci, pfi] = evaluate_detection(inverted, truth);
  CHECK(pci == 0.0);
  CHECK(pfi == 1.0);

  auto [pcn, pfn] = evaluate_detection(std::vector<bool>(3, false), std::vector<bool>(3, false));
  CHECK(std::isnan(pcn));
  CHECK(pfn == 0.0);

  CHECK_THROWS_AS(evaluate_detection(std::vector<bool>(3), std::vector<bool>(4)),
                  std::invalid_argument);
}

TEST_CASE("functional_boxplot on a degenerate jittered sample") {
  // Near-identical curves on the benchmark grid: the envelope collapses to
  // the jitter scale and detection stays quiet in almost every seed.
  int clean_seeds = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const FunctionalSample sample = jitter_sample(8, 50, 0.01, 100 + seed);
    const BoxplotSummary box =
        functional_boxplot(sample, 0.01, 0.95, 2000, seed, CovMode::empirical);
    const double width = (box.central_upper - box.central_lower).maxCoeff();
    CHECK(width <= 8.0 * 0.01);
    if (box.outlier_indices.empty()) ++clean_seeds;
  }
  CHECK(clean_seeds >= 18);
}

TEST_CASE("functional_boxplot isolates a planted far-off curve") {
  const FunctionalSample sample = jitter_sample(40, 25, 0.05, 12, true);
  const BoxplotSummary box =
      functional_boxplot(sample, 0.01, 0.95, 2000, 8, CovMode::empirical);

  REQUIRE(!box.outlier_indices.empty());
  bool planted_found = false;
  for (Index i : box.outlier_indices) planted_found |= (i == 39);
  CHECK(planted_found);

  // The planted curve sits far above the whisker envelope.
  CHECK(sample.curves.row(39).minCoeff() > box.whisker_upper.maxCoeff());

  // Depth bookkeeping.
  for (double d : box.depths) {
    CHECK(d > 0.0);
    CHECK(d <= 1.0);
  }
  for (size_t i = 0; i < box.depths.size(); ++i)
    CHECK(box.depths[i] <= box.depths[static_cast<size_t>(box.median_index)]);

  // Band nesting against the whiskers.
  for (Index i = 0; i < sample.p(); ++i) {
    CHECK(box.central_lower(i) <= box.central_upper(i));
    CHECK(box.whisker_lower(i) <= box.central_lower(i) + 1e-12);
    CHECK(box.whisker_upper(i) >= box.central_upper(i) - 1e-12);
  }

  FunctionalSample tiny = jitter_sample(3, 10, 0.1, 1);
  CHECK_THROWS_AS(functional_boxplot(tiny, 0.01, 0.95, 100, 1, CovMode::empirical),
                  std::invalid_argument);
}
