#pragma once

#include "fmd/mahalanobis.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <span>

namespace fmd {

enum class ClassifyMode { homoscedastic, heteroscedastic };

/// Two-class distance rule: per-class mean/covariance models, prior weights,
/// and (in heteroscedastic mode) the eigenvalue-ratio constant C.
struct ClassifierModel {
  std::array<MahalanobisModel, 2> class_models;
  std::array<double, 2> priors{0.5, 0.5};
  ClassifyMode mode = ClassifyMode::heteroscedastic;
  double threshold_C = 0.0;
};

/// Fits per-class eigensystems; heteroscedastic mode sets
/// C = log(prod lambda_j^(1) / prod lambda_j^(0)) over the min(10, rank)
/// leading eigenvalue pairs.
ClassifierModel fit_classifier(const FunctionalSample& train0, const FunctionalSample& train1,
                               double alpha, std::array<double, 2> priors = {0.5, 0.5},
                               ClassifyMode mode = ClassifyMode::heteroscedastic);

/// Assigns class 1 when the prior-adjusted squared-distance gap exceeds C
/// (heteroscedastic) or 0 (homoscedastic); ties go to class 0.
int predict(const ClassifierModel& model, const Curve& x);

/// Stratified k-fold cross-validation over the alpha grid; returns the
/// smallest alpha among those minimizing pooled validation misclassification.
double cv_alpha(const FunctionalSample& train0, const FunctionalSample& train1,
                std::span<const double> alpha_grid, int folds, std::uint64_t seed,
                ClassifyMode mode = ClassifyMode::heteroscedastic);

/// Same machinery for the truncated-semidistance rule: picks k in k_grid.
Index cv_dfm_k(const FunctionalSample& train0, const FunctionalSample& train1,
               std::span<const Index> k_grid, int folds, std::uint64_t seed);

/// Class means/eigensystems rule with the truncated semidistance.
int predict_dfm(const EigenSystem& sys0, const EigenSystem& sys1, Index k, const Curve& x);

/// Majority label among the k nearest training curves in the quadrature norm.
int knn_classify(const FunctionalSample& train, const Curve& x, Index k);

double evaluate_classifier(const ClassifierModel& model, const FunctionalSample& test);

double evaluate_classifier(const std::function<int(const Curve&)>& rule,
                           const FunctionalSample& test);

/// Default 13-point log-spaced cross-validation grid on [1e-4, 1e-1].
std::vector<double> default_alpha_grid();

}  // namespace fmd
