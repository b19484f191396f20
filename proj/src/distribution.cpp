#include "fmd/distribution.hpp"

#include "fmd/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fmd {

WeightedChiSq wcs_from_model(const EigenSystem& eigsys, double alpha, const Curve& target) {
  if (!(alpha > 0.0)) throw std::invalid_argument("wcs_from_model: alpha must be positive");
  check_alignment(target, eigsys.grid, "wcs_from_model");
  const Eigen::ArrayXd lam = eigsys.eigenvalues.array();
  WeightedChiSq law;
  law.betas = (lam / (lam + alpha)).square().matrix();
  const Eigen::VectorXd mu =
      eigsys.eigenfunctions.transpose() * (eigsys.grid.weights.asDiagonal() * (eigsys.mean - target));
  law.noncentralities = (mu.array().square() / lam).matrix();
  return law;
}

std::pair<double, double> wcs_moments(const WeightedChiSq& law) {
  const Eigen::ArrayXd b = law.betas.array();
  const Eigen::ArrayXd g = law.noncentralities.array();
  const double mean = (b * (1.0 + g)).sum();
  const double variance = 2.0 * (b.square() * (1.0 + 2.0 * g)).sum();
  return {mean, variance};
}

std::vector<double> wcs_sample(const WeightedChiSq& law, int n_mc, std::uint64_t seed) {
  if (n_mc < 1) throw std::invalid_argument("wcs_sample: need n_mc >= 1");
  const Index r = law.betas.size();
  const Eigen::ArrayXd sqrt_g = law.noncentralities.array().sqrt();
  std::vector<double> draws(static_cast<size_t>(n_mc), 0.0);
  constexpr int kChunk = 1024;
  for (int chunk_start = 0; chunk_start < n_mc; chunk_start += kChunk) {
    Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(chunk_start / kChunk));
    const int chunk_end = std::min(n_mc, chunk_start + kChunk);
    for (int d = chunk_start; d < chunk_end; ++d) {
      double sum = 0.0;
      for (Index j = 0; j < r; ++j) {
        const double y = rng.normal() + sqrt_g(j);
        sum += law.betas(j) * y * y;
      }
      draws[static_cast<size_t>(d)] = sum;
    }
  }
  return draws;
}

double wcs_quantile(std::span<const double> draws, double q) {
  if (draws.empty()) throw std::invalid_argument("wcs_quantile: empty sample");
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("wcs_quantile: q must be in (0,1)");
  std::vector<double> sorted(draws.begin(), draws.end());
  std::sort(sorted.begin(), sorted.end());
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<size_t>(std::floor(pos));
  const auto hi = static_cast<size_t>(std::ceil(pos));
  if (hi == lo) return sorted[lo];
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double sqrt_n_mean_stat(const FunctionalSample& sample, const Curve& m0,
                        const MahalanobisModel& model) {
  check_alignment(m0, model.eigsys.grid, "sqrt_n_mean_stat");
  const double stat = mahalanobis_distance(sample_mean(sample), m0, model);
  return std::sqrt(static_cast<double>(sample.n())) * stat;
}

double silverman_bandwidth(std::span<const double> xs) {
  const auto n = static_cast<double>(xs.size());
  if (xs.size() < 2) return 1.0;
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  auto quant = [&](double q) {
    const double pos = q * (n - 1.0);
    const auto lo = static_cast<size_t>(std::floor(pos));
    const auto hi = std::min(sorted.size() - 1, lo + 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
  };
  const double iqr = quant(0.75) - quant(0.25);
  double spread = std::min(sd, iqr / 1.34);
  if (spread <= 0.0) spread = sd;
  if (spread <= 0.0) spread = std::max(1e-12, std::abs(mean) * 1e-3 + 1e-12);
  return 0.9 * spread * std::pow(n, -0.2);
}

namespace {

double kde_eval(std::span<const double> xs, double bandwidth, double at) {
  const double inv_h = 1.0 / bandwidth;
  double sum = 0.0;
  for (double x : xs) {
    const double z = (at - x) * inv_h;
    sum += std::exp(-0.5 * z * z);
  }
  constexpr double inv_sqrt_2pi = 0.39894228040143267793994605993438;
  return sum * inv_sqrt_2pi * inv_h / static_cast<double>(xs.size());
}

}  // namespace

double kde_kl_divergence(std::span<const double> p_sample, std::span<const double> q_sample) {
  if (p_sample.empty() || q_sample.empty())
    throw std::invalid_argument("kde_kl_divergence: empty sample");
  const double hp = silverman_bandwidth(p_sample);
  const double hq = silverman_bandwidth(q_sample);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (double x : p_sample) lo = std::min(lo, x), hi = std::max(hi, x);
  for (double x : q_sample) lo = std::min(lo, x), hi = std::max(hi, x);
  if (!(hi > lo)) return 0.0;

  constexpr int kPoints = 512;
  constexpr double kFloor = 1e-12;
  const double step = (hi - lo) / (kPoints - 1);
  double prev_integrand = 0.0;
  bool prev_valid = false;
  double kl = 0.0;
  for (int i = 0; i < kPoints; ++i) {
    const double t = lo + step * i;
    const double p = kde_eval(p_sample, hp, t);
    const double q = kde_eval(q_sample, hq, t);
    const bool valid = p > kFloor && q > kFloor;
    const double integrand = valid ? p * std::log(p / q) : 0.0;
    if (valid && prev_valid) kl += 0.5 * (integrand + prev_integrand) * step;
    prev_integrand = integrand;
    prev_valid = valid;
  }
  return kl;
}

double tune_alpha_kl(std::span<const double> distances_sq, const EigenSystem& eigsys,
                     std::span<const double> alpha_grid, int n_mc, std::uint64_t seed) {
  if (distances_sq.empty()) throw std::invalid_argument("tune_alpha_kl: empty distances");
  if (alpha_grid.empty()) throw std::invalid_argument("tune_alpha_kl: empty alpha grid");
  std::vector<double> grid(alpha_grid.begin(), alpha_grid.end());
  std::sort(grid.begin(), grid.end());
  double best_alpha = grid.front();
  double best_kl = std::numeric_limits<double>::infinity();
  for (double alpha : grid) {
    if (!(alpha > 0.0)) throw std::invalid_argument("tune_alpha_kl: alphas must be positive");
    WeightedChiSq law = wcs_from_model(eigsys, alpha, eigsys.mean);  // central
    const std::vector<double> draws = wcs_sample(law, n_mc, seed);
    const double kl = kde_kl_divergence(distances_sq, draws);
    if (kl < best_kl) {
      best_kl = kl;
      best_alpha = alpha;
    }
  }
  return best_alpha;
}

}  // namespace fmd
