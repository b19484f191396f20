#include "fmd/outliers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace fmd {

MahalanobisModel fit_detection_model(const FunctionalSample& sample, double alpha,
                                     CovMode cov_mode, std::uint64_t seed,
                                     const McdOptions& mcd) {
  if (!(alpha > 0.0)) throw std::invalid_argument("fit_detection_model: alpha must be positive");
  if (cov_mode == CovMode::empirical) return fit_model(sample, alpha);

  Index k = mcd.k_dims > 0 ? mcd.k_dims : mcd_default_k(sample.n());
  const Index rank = eigensystem_from_sample(sample).rank();
  k = std::min(k, rank);
  McdEstimate robust = mcd_covariance(sample, mcd.h_fraction, k, seed);
  EigenSystem sys = eigendecompose(robust.cov);
  sys.mean = robust.mean;
  return {std::move(sys), alpha};
}

OutlierReport detect_outliers(const FunctionalSample& sample, double alpha, double level,
                              CovMode cov_mode, int n_mc, std::uint64_t seed,
                              const McdOptions& mcd) {
  if (sample.n() < 2) throw std::invalid_argument("detect_outliers: need n >= 2");
  if (!(level > 0.0 && level < 1.0))
    throw std::invalid_argument("detect_outliers: level must be in (0, 1)");

  const MahalanobisModel model = fit_detection_model(sample, alpha, cov_mode, seed, mcd);

  OutlierReport report;
  report.level = level;
  report.cov_mode = cov_mode;
  report.distances_sq.resize(static_cast<size_t>(sample.n()));
  for (Index i = 0; i < sample.n(); ++i)
    report.distances_sq[static_cast<size_t>(i)] =
        mahalanobis_distance_sq(sample.curve(i), model.eigsys.mean, model);

  const WeightedChiSq law = wcs_from_model(model.eigsys, alpha, model.eigsys.mean);
  const std::vector<double> draws = wcs_sample(law, n_mc, seed);
  report.threshold = wcs_quantile(draws, level);

  report.flags.resize(static_cast<size_t>(sample.n()));
  for (size_t i = 0; i < report.flags.size(); ++i)
    report.flags[i] = report.distances_sq[i] > report.threshold;
  return report;
}

std::pair<double, double> evaluate_detection(const std::vector<bool>& flags,
                                             const std::vector<bool>& truth) {
  if (flags.size() != truth.size())
    throw std::invalid_argument("evaluate_detection: length mismatch");
  long n_true = 0, n_false = 0, hit = 0, miss_hit = 0;
  for (size_t i = 0; i < flags.size(); ++i) {
    if (truth[i]) {
      ++n_true;
      if (flags[i]) ++hit;
    } else {
      ++n_false;
      if (flags[i]) ++miss_hit;
    }
  }
  const double p_c = n_true == 0 ? std::numeric_limits<double>::quiet_NaN()
                                 : static_cast<double>(hit) / static_cast<double>(n_true);
  const double p_f =
      n_false == 0 ? 0.0 : static_cast<double>(miss_hit) / static_cast<double>(n_false);
  return {p_c, p_f};
}

BoxplotSummary functional_boxplot(const FunctionalSample& sample, double alpha, double level,
                                  int n_mc, std::uint64_t seed, CovMode cov_mode,
                                  const McdOptions& mcd) {
  const Index n = sample.n();
  if (n < 4) throw std::invalid_argument("functional_boxplot: need n >= 4");

  const OutlierReport report = detect_outliers(sample, alpha, level, cov_mode, n_mc, seed, mcd);

  BoxplotSummary box;
  box.depths.resize(static_cast<size_t>(n));
  for (Index i = 0; i < n; ++i)
    box.depths[static_cast<size_t>(i)] = 1.0 / (1.0 + report.distances_sq[static_cast<size_t>(i)]);

  box.median_index = 0;
  for (Index i = 1; i < n; ++i)
    if (box.depths[static_cast<size_t>(i)] > box.depths[static_cast<size_t>(box.median_index)])
      box.median_index = i;

  std::vector<Index> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return box.depths[static_cast<size_t>(a)] > box.depths[static_cast<size_t>(b)];
  });
  const Index n_central = (n + 1) / 2;

  const Index p = sample.p();
  box.central_lower = Curve::Constant(p, std::numeric_limits<double>::infinity());
  box.central_upper = Curve::Constant(p, -std::numeric_limits<double>::infinity());
  for (Index rank = 0; rank < n_central; ++rank) {
    const auto row = sample.curves.row(order[static_cast<size_t>(rank)]);
    box.central_lower = box.central_lower.cwiseMin(row.transpose());
    box.central_upper = box.central_upper.cwiseMax(row.transpose());
  }

  box.whisker_lower = Curve::Constant(p, std::numeric_limits<double>::infinity());
  box.whisker_upper = Curve::Constant(p, -std::numeric_limits<double>::infinity());
  Index n_clean = 0;
  for (Index i = 0; i < n; ++i) {
    if (report.flags[static_cast<size_t>(i)]) {
      box.outlier_indices.push_back(i);
      continue;
    }
    ++n_clean;
    box.whisker_lower = box.whisker_lower.cwiseMin(sample.curves.row(i).transpose());
    box.whisker_upper = box.whisker_upper.cwiseMax(sample.curves.row(i).transpose());
  }
  if (n_clean == 0) {
    // Everything flagged: fall back to the central band envelope.
    box.whisker_lower = box.central_lower;
    box.whisker_upper = box.central_upper;
  }
  return box;
}

}  // namespace fmd
