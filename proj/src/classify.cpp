#include "fmd/classify.hpp"

#include "fmd/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace fmd {

std::vector<double> default_alpha_grid() {
  std::vector<double> grid(13);
  for (int i = 0; i < 13; ++i) grid[static_cast<size_t>(i)] = std::pow(10.0, -4.0 + 0.25 * i);
  return grid;
}

ClassifierModel fit_classifier(const FunctionalSample& train0, const FunctionalSample& train1,
                               double alpha, std::array<double, 2> priors, ClassifyMode mode) {
  if (train0.n() < 2 || train1.n() < 2)
    throw std::invalid_argument("fit_classifier: each class needs n >= 2");
  if (train0.p() != train1.p())
    throw std::invalid_argument("fit_classifier: classes must share one grid");
  if (!(priors[0] > 0.0 && priors[1] > 0.0) || std::abs(priors[0] + priors[1] - 1.0) > 1e-12)
    throw std::invalid_argument("fit_classifier: priors must be positive and sum to 1");

  ClassifierModel model;
  model.class_models[0] = fit_model(train0, alpha);
  model.class_models[1] = fit_model(train1, alpha);
  model.priors = priors;
  model.mode = mode;
  model.threshold_C = 0.0;
  if (mode == ClassifyMode::heteroscedastic) {
    const Index pairs = std::min<Index>(
        10, std::min(model.class_models[0].eigsys.rank(), model.class_models[1].eigsys.rank()));
    double log_ratio = 0.0;
    for (Index j = 0; j < pairs; ++j)
      log_ratio += std::log(model.class_models[1].eigsys.eigenvalues(j) /
                            model.class_models[0].eigsys.eigenvalues(j));
    model.threshold_C = log_ratio;
  }
  return model;
}

int predict(const ClassifierModel& model, const Curve& x) {
  const double d0 = mahalanobis_distance_sq(x, model.class_models[0].eigsys.mean,
                                            model.class_models[0]) -
                    2.0 * std::log(model.priors[0]);
  const double d1 = mahalanobis_distance_sq(x, model.class_models[1].eigsys.mean,
                                            model.class_models[1]) -
                    2.0 * std::log(model.priors[1]);
  const double c = model.mode == ClassifyMode::heteroscedastic ? model.threshold_C : 0.0;
  return d0 - d1 > c ? 1 : 0;
}

namespace {

// Seeded stratified fold ids for one class.
std::vector<int> fold_assignment(Index n, int folds, Rng& rng) {
  std::vector<Index> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  for (Index i = n - 1; i > 0; --i) {
    const auto j = static_cast<Index>(rng.below(static_cast<std::uint64_t>(i + 1)));
    std::swap(order[static_cast<size_t>(i)], order[static_cast<size_t>(j)]);
  }
  std::vector<int> fold(static_cast<size_t>(n));
  for (Index i = 0; i < n; ++i)
    fold[static_cast<size_t>(order[static_cast<size_t>(i)])] = static_cast<int>(i % folds);
  return fold;
}

struct FoldSplit {
  FunctionalSample fit0, fit1;
  std::vector<Index> val0, val1;
};

std::vector<FoldSplit> make_folds(const FunctionalSample& train0, const FunctionalSample& train1,
                                  int folds, std::uint64_t seed) {
  if (folds < 2) throw std::invalid_argument("cross-validation: need folds >= 2");
  if (train0.n() < folds || train1.n() < folds)
    throw std::invalid_argument("cross-validation: each class needs at least `folds` curves");
  Rng rng0 = Rng::substream(seed, 0);
  Rng rng1 = Rng::substream(seed, 1);
  const std::vector<int> fold0 = fold_assignment(train0.n(), folds, rng0);
  const std::vector<int> fold1 = fold_assignment(train1.n(), folds, rng1);

  std::vector<FoldSplit> splits(static_cast<size_t>(folds));
  for (int f = 0; f < folds; ++f) {
    std::vector<Index> keep0, keep1;
    auto& split = splits[static_cast<size_t>(f)];
    for (Index i = 0; i < train0.n(); ++i)
      (fold0[static_cast<size_t>(i)] == f ? split.val0 : keep0).push_back(i);
    for (Index i = 0; i < train1.n(); ++i)
      (fold1[static_cast<size_t>(i)] == f ? split.val1 : keep1).push_back(i);
    split.fit0 = take_rows(train0, keep0);
    split.fit1 = take_rows(train1, keep1);
  }
  return splits;
}

}  // namespace

double cv_alpha(const FunctionalSample& train0, const FunctionalSample& train1,
                std::span<const double> alpha_grid, int folds, std::uint64_t seed,
                ClassifyMode mode) {
  if (alpha_grid.empty()) throw std::invalid_argument("cv_alpha: empty alpha grid");
  const std::vector<FoldSplit> splits = make_folds(train0, train1, folds, seed);

  // The eigensystems do not depend on alpha, so fit every fold once and sweep
  // the grid over predictions only.
  std::vector<ClassifierModel> fold_models;
  fold_models.reserve(splits.size());
  for (const auto& split : splits)
    fold_models.push_back(fit_classifier(split.fit0, split.fit1, alpha_grid[0], {0.5, 0.5}, mode));

  double best_alpha = 0.0;
  double best_err = std::numeric_limits<double>::infinity();
  std::vector<double> sorted_grid(alpha_grid.begin(), alpha_grid.end());
  std::sort(sorted_grid.begin(), sorted_grid.end());
  for (double alpha : sorted_grid) {
    if (!(alpha > 0.0)) throw std::invalid_argument("cv_alpha: alphas must be positive");
    long wrong = 0, total = 0;
    for (size_t f = 0; f < splits.size(); ++f) {
      ClassifierModel model = fold_models[f];
      model.class_models[0].alpha = alpha;
      model.class_models[1].alpha = alpha;
      for (Index i : splits[f].val0) {
        wrong += predict(model, train0.curve(i)) != 0;
        ++total;
      }
      for (Index i : splits[f].val1) {
        wrong += predict(model, train1.curve(i)) != 1;
        ++total;
      }
    }
    const double err = static_cast<double>(wrong) / static_cast<double>(total);
    if (err < best_err) {
      best_err = err;
      best_alpha = alpha;
    }
  }
  return best_alpha;
}

int predict_dfm(const EigenSystem& sys0, const EigenSystem& sys1, Index k, const Curve& x) {
  const double d0 = dfm_semidistance(x, sys0.mean, sys0, std::min(k, sys0.rank()));
  const double d1 = dfm_semidistance(x, sys1.mean, sys1, std::min(k, sys1.rank()));
  return d0 > d1 ? 1 : 0;
}

Index cv_dfm_k(const FunctionalSample& train0, const FunctionalSample& train1,
               std::span<const Index> k_grid, int folds, std::uint64_t seed) {
  if (k_grid.empty()) throw std::invalid_argument("cv_dfm_k: empty k grid");
  const std::vector<FoldSplit> splits = make_folds(train0, train1, folds, seed);

  std::vector<std::pair<EigenSystem, EigenSystem>> fold_systems;
  fold_systems.reserve(splits.size());
  for (const auto& split : splits)
    fold_systems.emplace_back(eigensystem_from_sample(split.fit0),
                              eigensystem_from_sample(split.fit1));

  std::vector<Index> sorted_grid(k_grid.begin(), k_grid.end());
  std::sort(sorted_grid.begin(), sorted_grid.end());
  Index best_k = sorted_grid.front();
  double best_err = std::numeric_limits<double>::infinity();
  for (Index k : sorted_grid) {
    long wrong = 0, total = 0;
    for (size_t f = 0; f < splits.size(); ++f) {
      const auto& [sys0, sys1] = fold_systems[f];
      if (k > sys0.rank() || k > sys1.rank()) continue;
      for (Index i : splits[f].val0) {
        wrong += predict_dfm(sys0, sys1, k, train0.curve(i)) != 0;
        ++total;
      }
      for (Index i : splits[f].val1) {
        wrong += predict_dfm(sys0, sys1, k, train1.curve(i)) != 1;
        ++total;
      }
    }
    if (total == 0) continue;
    const double err = static_cast<double>(wrong) / static_cast<double>(total);
    if (err < best_err) {
      best_err = err;
      best_k = k;
    }
  }
  return best_k;
}

int knn_classify(const FunctionalSample& train, const Curve& x, Index k) {
  const Index n = train.n();
  if (k < 1 || k > n) throw std::invalid_argument("knn_classify: need 1 <= k <= n");
  if (train.labels.size() != static_cast<size_t>(n))
    throw std::invalid_argument("knn_classify: training sample must be labeled");
  check_alignment(x, train.grid, "knn_classify");

  std::vector<std::pair<double, Index>> dist(static_cast<size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const Curve diff = train.curve(i) - x;
    dist[static_cast<size_t>(i)] = {l2_inner(diff, diff, train.grid), i};
  }
  std::sort(dist.begin(), dist.end());
  long votes1 = 0;
  for (Index i = 0; i < k; ++i)
    votes1 += train.labels[static_cast<size_t>(dist[static_cast<size_t>(i)].second)] != 0;
  return 2 * votes1 > k ? 1 : 0;
}

double evaluate_classifier(const ClassifierModel& model, const FunctionalSample& test) {
  return evaluate_classifier(
      std::function<int(const Curve&)>([&](const Curve& x) { return predict(model, x); }), test);
}

double evaluate_classifier(const std::function<int(const Curve&)>& rule,
                           const FunctionalSample& test) {
  if (test.labels.size() != static_cast<size_t>(test.n()))
    throw std::invalid_argument("evaluate_classifier: test sample must be labeled");
  if (test.n() == 0) throw std::invalid_argument("evaluate_classifier: empty test sample");
  long wrong = 0;
  for (Index i = 0; i < test.n(); ++i)
    wrong += rule(test.curve(i)) != test.labels[static_cast<size_t>(i)];
  return static_cast<double>(wrong) / static_cast<double>(test.n());
}

}  // namespace fmd
