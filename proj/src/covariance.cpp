#include "fmd/covariance.hpp"

#include "fmd/errors.hpp"
#include "fmd/rng.hpp"
#include "fmd/stats.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <tuple>
#include <stdexcept>

namespace fmd {

Curve sample_mean(const FunctionalSample& sample) {
  if (sample.n() < 1) throw std::invalid_argument("sample_mean: empty sample");
  return sample.curves.colwise().mean().transpose();
}

CovKernel sample_covariance(const FunctionalSample& sample, const std::optional<Curve>& center) {
  const Index n = sample.n();
  if (n < 2) throw std::invalid_argument("sample_covariance: need n >= 2");
  Curve m = center ? *center : sample_mean(sample);
  check_alignment(m, sample.grid, "sample_covariance");
  Eigen::MatrixXd centered = sample.curves.rowwise() - m.transpose();
  CovKernel cov;
  cov.grid = sample.grid;
  cov.matrix = (centered.transpose() * centered) / static_cast<double>(n);
  return cov;
}

EigenSystem eigendecompose(const CovKernel& cov, double tol_rel, std::optional<Index> max_rank) {
  const Index p = cov.grid.size();
  if (cov.matrix.rows() != p || cov.matrix.cols() != p)
    throw std::invalid_argument("eigendecompose: matrix does not match grid");
  const double scale = std::max(1.0, cov.matrix.cwiseAbs().maxCoeff());
  if ((cov.matrix - cov.matrix.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale)
    throw std::invalid_argument("eigendecompose: matrix is not symmetric");

  const Eigen::ArrayXd sqrt_w = cov.grid.weights.array().sqrt();
  Eigen::MatrixXd sym = 0.5 * (cov.matrix + cov.matrix.transpose());
  Eigen::MatrixXd conjugated =
      sqrt_w.matrix().asDiagonal() * sym * sqrt_w.matrix().asDiagonal();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(conjugated);
  if (solver.info() != Eigen::Success)
    throw std::invalid_argument("eigendecompose: eigensolver failed");

  // Eigen returns ascending order; walk it backwards and keep values above
  // the relative tolerance cut.
  const Eigen::VectorXd& vals = solver.eigenvalues();
  const double lambda_max = vals.size() > 0 ? std::max(0.0, vals(vals.size() - 1)) : 0.0;
  const double cut = tol_rel * lambda_max;

  std::vector<Index> keep;
  for (Index i = vals.size() - 1; i >= 0; --i) {
    if (vals(i) > cut && vals(i) > 0.0) keep.push_back(i);
  }
  if (max_rank && static_cast<Index>(keep.size()) > *max_rank) keep.resize(*max_rank);

  EigenSystem sys;
  sys.grid = cov.grid;
  sys.mean = Curve::Zero(p);
  const Index r = static_cast<Index>(keep.size());
  sys.eigenvalues.resize(r);
  sys.eigenfunctions.resize(p, r);
  const Eigen::ArrayXd inv_sqrt_w = sqrt_w.inverse();
  for (Index j = 0; j < r; ++j) {
    sys.eigenvalues(j) = vals(keep[static_cast<size_t>(j)]);
    sys.eigenfunctions.col(j) =
        (solver.eigenvectors().col(keep[static_cast<size_t>(j)]).array() * inv_sqrt_w).matrix();
  }
  return sys;
}

EigenSystem eigensystem_from_sample(const FunctionalSample& sample, double tol_rel,
                                    std::optional<Index> max_rank) {
  EigenSystem sys = eigendecompose(sample_covariance(sample), tol_rel, max_rank);
  sys.mean = sample_mean(sample);
  return sys;
}

Index mcd_default_k(Index n) { return std::max<Index>(1, std::min<Index>(10, n / 5)); }

namespace {

// Log-determinant of a symmetric positive definite matrix via LLT.
// Returns +inf for non-SPD input so degenerate subsets lose the
// best-determinant reduction.
double spd_log_det(const Eigen::MatrixXd& m) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

struct ScoreEstimate {
  Eigen::VectorXd center;
  Eigen::MatrixXd scatter;
  double log_det = std::numeric_limits<double>::infinity();
};

ScoreEstimate estimate_from(const Eigen::MatrixXd& scores, const std::vector<Index>& subset) {
  ScoreEstimate est;
  const Index k = scores.cols();
  const auto h = static_cast<double>(subset.size());
  est.center = Eigen::VectorXd::Zero(k);
  for (Index i : subset) est.center += scores.row(i).transpose();
  est.center /= h;
  est.scatter = Eigen::MatrixXd::Zero(k, k);
  for (Index i : subset) {
    const Eigen::VectorXd d = scores.row(i).transpose() - est.center;
    est.scatter += d * d.transpose();
  }
  est.scatter /= h;
  est.log_det = spd_log_det(est.scatter);
  return est;
}

std::vector<Index> h_smallest_distances(const Eigen::MatrixXd& scores, const ScoreEstimate& est,
                                        Index h) {
  const Index n = scores.rows();
  Eigen::LDLT<Eigen::MatrixXd> ldlt(est.scatter);
  std::vector<std::pair<double, Index>> dist(static_cast<size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const Eigen::VectorXd d = scores.row(i).transpose() - est.center;
    dist[static_cast<size_t>(i)] = {d.dot(ldlt.solve(d)), i};
  }
  std::sort(dist.begin(), dist.end());
  std::vector<Index> subset(static_cast<size_t>(h));
  for (Index i = 0; i < h; ++i) subset[static_cast<size_t>(i)] = dist[static_cast<size_t>(i)].second;
  std::sort(subset.begin(), subset.end());
  return subset;
}

struct Candidate {
  std::vector<Index> subset;
  double log_det = std::numeric_limits<double>::infinity();
  int restart = 0;
};

// Determinant-minimizing h-subset of the score rows. Two-stage search: many
// seeded elemental starts with a couple of concentration steps, then full
// concentration of the most promising candidates. Best determinant wins,
// ties to the lowest restart index.
std::vector<Index> fast_mcd_subset(const Eigen::MatrixXd& scores, Index h, std::uint64_t seed) {
  const Index n = scores.rows();
  const Index k = scores.cols();
  constexpr int kStarts = 150;
  constexpr int kShortSteps = 2;
  constexpr int kKeep = 10;
  constexpr int kMaxConcentration = 100;

  auto concentrate = [&](std::vector<Index>& subset, ScoreEstimate& est, int max_steps) {
    double prev_log_det = std::numeric_limits<double>::infinity();
    for (int step = 0; step < max_steps; ++step) {
      subset = h_smallest_distances(scores, est, h);
      est = estimate_from(scores, subset);
      if (!std::isfinite(est.log_det)) break;
      if (std::abs(prev_log_det - est.log_det) < 1e-12 * (1.0 + std::abs(est.log_det))) break;
      prev_log_det = est.log_det;
    }
  };

  std::vector<Candidate> pool_best;
  for (int restart = 0; restart < kStarts; ++restart) {
    Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(restart));

    std::vector<Index> pool(static_cast<size_t>(n));
    std::iota(pool.begin(), pool.end(), Index{0});
    const Index start_size = std::min<Index>(n, k + 1);
    for (Index i = 0; i < start_size; ++i) {
      const auto j = i + static_cast<Index>(rng.below(static_cast<std::uint64_t>(n - i)));
      std::swap(pool[static_cast<size_t>(i)], pool[static_cast<size_t>(j)]);
    }
    std::vector<Index> subset(pool.begin(), pool.begin() + start_size);
    std::sort(subset.begin(), subset.end());

    ScoreEstimate est = estimate_from(scores, subset);
    // Inflate a degenerate elemental start until its scatter is invertible.
    for (int grow = 0; !std::isfinite(est.log_det) && static_cast<Index>(subset.size()) < n;
         ++grow) {
      Index extra = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)));
      if (std::find(subset.begin(), subset.end(), extra) == subset.end()) {
        subset.push_back(extra);
        std::sort(subset.begin(), subset.end());
        est = estimate_from(scores, subset);
      }
      if (grow > 4 * n) break;
    }
    if (!std::isfinite(est.log_det)) continue;

    concentrate(subset, est, kShortSteps);
    if (!std::isfinite(est.log_det)) continue;
    pool_best.push_back({std::move(subset), est.log_det, restart});
  }

  std::sort(pool_best.begin(), pool_best.end(), [](const Candidate& a, const Candidate& b) {
    return a.log_det != b.log_det ? a.log_det < b.log_det : a.restart < b.restart;
  });
  if (pool_best.size() > kKeep) pool_best.resize(kKeep);

  double best_log_det = std::numeric_limits<double>::infinity();
  std::vector<Index> best_subset;
  for (Candidate& cand : pool_best) {
    ScoreEstimate est = estimate_from(scores, cand.subset);
    concentrate(cand.subset, est, kMaxConcentration);
    if (std::isfinite(est.log_det) && est.log_det < best_log_det) {
      best_log_det = est.log_det;
      best_subset = cand.subset;
    }
  }
  return best_subset;
}

// Asymptotic consistency factor for the central-gamma Gaussian trimming.
double trimming_factor(double gamma, Index k) {
  if (gamma >= 1.0) return 1.0;
  const double q = chi2_quantile(gamma, static_cast<double>(k));
  const double coverage = chi2_cdf(q, static_cast<double>(k) + 2.0);
  return coverage > 0.0 ? gamma / coverage : 1.0;
}

}  // namespace

namespace detail {

// Remaining finite-sample bias of the trim-corrected h-subset scatter on
// N(0, I_k) data, measured on the determinant scale. The concentration steps
// overfit the subset beyond the asymptotic trimming identity, so without this
// factor every downstream threshold over-flags. Calibrated once per
// (n, k, h) with a fixed internal seed and cached.
double mcd_small_sample_bias(Index n, Index k, Index h) {
  static std::map<std::tuple<Index, Index, Index>, double> cache;
  static std::mutex mutex;
  const auto key = std::make_tuple(n, k, h);
  {
    std::lock_guard<std::mutex> lock(mutex);
    const auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }

  const double factor = trimming_factor(static_cast<double>(h) / static_cast<double>(n), k);
  constexpr int kSims = 40;
  const std::uint64_t seed =
      derive_seed(0x6d63645f63616cULL, static_cast<std::uint64_t>(n) * 131 + static_cast<std::uint64_t>(k),
                  static_cast<std::uint64_t>(h));
  double mean_log_det = 0.0;
  for (int sim = 0; sim < kSims; ++sim) {
    Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(sim));
    Eigen::MatrixXd scores(n, k);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < k; ++j) scores(i, j) = rng.normal();
    const std::vector<Index> subset = fast_mcd_subset(scores, h, derive_seed(seed, sim));
    if (subset.empty()) continue;
    ScoreEstimate est = estimate_from(scores, subset);
    est.scatter *= factor;
    mean_log_det += spd_log_det(est.scatter) / static_cast<double>(k);
  }
  const double bias = std::exp(mean_log_det / kSims);

  std::lock_guard<std::mutex> lock(mutex);
  cache.emplace(key, bias);
  return bias;
}

}  // namespace detail

McdEstimate mcd_covariance(const FunctionalSample& sample, double h_fraction, Index k_dims,
                           std::uint64_t seed) {
  const Index n = sample.n();
  if (!(h_fraction > 0.5 && h_fraction <= 1.0))
    throw std::invalid_argument("mcd_covariance: h_fraction must be in (0.5, 1]");
  if (k_dims < 1 || n < 2 * k_dims)
    throw std::invalid_argument("mcd_covariance: need n >= 2 * k_dims");

  const Index h = static_cast<Index>(std::ceil(h_fraction * static_cast<double>(n)));

  McdEstimate result;
  if (h >= n) {
    // Full subset: identical to the empirical estimates.
    result.mean = sample_mean(sample);
    result.cov = sample_covariance(sample);
    result.subset.resize(static_cast<size_t>(n));
    std::iota(result.subset.begin(), result.subset.end(), Index{0});
    return result;
  }

  EigenSystem empirical = eigensystem_from_sample(sample);
  if (k_dims > empirical.rank())
    throw std::invalid_argument("mcd_covariance: k_dims exceeds empirical covariance rank");

  // Scores of every curve on the leading empirical eigenfunctions.
  const Eigen::MatrixXd basis = empirical.eigenfunctions.leftCols(k_dims);
  const Eigen::MatrixXd scores =
      sample.curves * sample.grid.weights.asDiagonal() * basis;  // n x k

  std::vector<Index> best_subset = fast_mcd_subset(scores, h, seed);
  if (best_subset.empty())
    throw NumericError("mcd_covariance: no restart produced a non-degenerate subset");

  FunctionalSample selected;
  selected.grid = sample.grid;
  selected.curves.resize(static_cast<Index>(best_subset.size()), sample.p());
  for (size_t i = 0; i < best_subset.size(); ++i)
    selected.curves.row(static_cast<Index>(i)) = sample.curves.row(best_subset[i]);

  result.mean = sample_mean(selected);
  result.cov = sample_covariance(selected);

  // Consistency correction of the h-subset scatter: the asymptotic Gaussian
  // trimming factor (E[z z' 1(|z|^2 <= q)] = P(chi^2_{k+2} <= q) I) times a
  // simulated finite-sample factor. Without them the subset covariance is
  // biased low and every distance threshold downstream over-flags.
  const double gamma = static_cast<double>(h) / static_cast<double>(n);
  result.cov.matrix *= trimming_factor(gamma, k_dims) / detail::mcd_small_sample_bias(n, k_dims, h);

  result.subset = std::move(best_subset);
  return result;
}

}  // namespace fmd
