#include "fmd/mahalanobis.hpp"

#include <cmath>
#include <stdexcept>

namespace fmd {

MahalanobisModel fit_model(const FunctionalSample& sample, double alpha, double tol_rel) {
  if (!(alpha > 0.0)) throw std::invalid_argument("fit_model: alpha must be positive");
  return {eigensystem_from_sample(sample, tol_rel), alpha};
}

namespace {

Eigen::VectorXd coeffs(const Curve& y, const EigenSystem& sys) {
  return sys.eigenfunctions.transpose() * (sys.grid.weights.asDiagonal() * y);
}

}  // namespace

Curve smooth_trajectory(const Curve& x, const MahalanobisModel& model) {
  check_alignment(x, model.eigsys.grid, "smooth_trajectory");
  const Eigen::VectorXd c = coeffs(x, model.eigsys);
  const Eigen::ArrayXd shrink =
      model.eigsys.eigenvalues.array() / (model.eigsys.eigenvalues.array() + model.alpha);
  return model.eigsys.eigenfunctions * (shrink * c.array()).matrix();
}

double mahalanobis_distance_sq(const Curve& x, const Curve& m, const MahalanobisModel& model) {
  check_alignment(x, model.eigsys.grid, "mahalanobis_distance");
  check_alignment(m, model.eigsys.grid, "mahalanobis_distance");
  const Eigen::VectorXd c = coeffs(x - m, model.eigsys);
  const Eigen::ArrayXd lam = model.eigsys.eigenvalues.array();
  return (lam / (lam + model.alpha).square() * c.array().square()).sum();
}

double mahalanobis_distance(const Curve& x, const Curve& m, const MahalanobisModel& model) {
  return std::sqrt(mahalanobis_distance_sq(x, m, model));
}

double rkhs_norm(const Curve& x, const EigenSystem& eigsys) {
  check_alignment(x, eigsys.grid, "rkhs_norm");
  const Eigen::VectorXd c = coeffs(x, eigsys);
  return std::sqrt((c.array().square() / eigsys.eigenvalues.array()).sum());
}

double dfm_semidistance(const Curve& x, const Curve& m, const EigenSystem& eigsys, Index k) {
  if (k < 1 || k > eigsys.rank())
    throw std::invalid_argument("dfm_semidistance: k must be in [1, rank]");
  check_alignment(x, eigsys.grid, "dfm_semidistance");
  check_alignment(m, eigsys.grid, "dfm_semidistance");
  const Eigen::VectorXd c =
      eigsys.eigenfunctions.leftCols(k).transpose() * (eigsys.grid.weights.asDiagonal() * (x - m));
  return std::sqrt((c.array().square() / eigsys.eigenvalues.head(k).array()).sum());
}

double depth(const Curve& x, const MahalanobisModel& model) {
  return 1.0 / (1.0 + mahalanobis_distance_sq(x, model.eigsys.mean, model));
}

}  // namespace fmd
