#pragma once

#include "fmd/distribution.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace fmd {

enum class CovMode { empirical, mcd };

/// Defaults for the robust covariance path of the detection pipeline.
struct McdOptions {
  double h_fraction = 0.8;
  Index k_dims = 0;  // 0 = min(10, n/5), clamped to the empirical rank
};

struct OutlierReport {
  std::vector<bool> flags;
  double threshold = 0.0;
  std::vector<double> distances_sq;
  double level = 0.0;
  CovMode cov_mode = CovMode::empirical;
};

struct BoxplotSummary {
  Index median_index = 0;
  Curve central_lower, central_upper;  // envelope of the 50% deepest curves
  Curve whisker_lower, whisker_upper;  // envelope of the non-outliers
  std::vector<Index> outlier_indices;
  std::vector<double> depths;
};

/// Mean/covariance per cov_mode, eigendecomposition, and the model used for
/// the detection distances.
MahalanobisModel fit_detection_model(const FunctionalSample& sample, double alpha,
                                     CovMode cov_mode, std::uint64_t seed,
                                     const McdOptions& mcd = {});

/// Flags the curves whose squared distance to the mean exceeds the `level`
/// quantile of n_mc central-law Monte Carlo draws.
OutlierReport detect_outliers(const FunctionalSample& sample, double alpha, double level,
                              CovMode cov_mode, int n_mc, std::uint64_t seed,
                              const McdOptions& mcd = {});

/// (p_c, p_f): fraction of true outliers flagged and of clean curves flagged.
/// p_c is NaN when there are no true outliers.
std::pair<double, double> evaluate_detection(const std::vector<bool>& flags,
                                             const std::vector<bool>& truth);

/// Depth-based functional boxplot: deepest curve as median, envelope of the
/// 50% deepest as the central band, envelope of the non-outliers as whiskers.
BoxplotSummary functional_boxplot(const FunctionalSample& sample, double alpha, double level,
                                  int n_mc, std::uint64_t seed,
                                  CovMode cov_mode = CovMode::empirical,
                                  const McdOptions& mcd = {});

}  // namespace fmd
