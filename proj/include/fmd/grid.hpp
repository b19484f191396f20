#pragma once

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <vector>

namespace fmd {

using Index = Eigen::Index;

/// A curve is its values on a shared grid.
using Curve = Eigen::VectorXd;

/// Sampling points on [0,1] with quadrature weights; the discrete stand-in
/// for L2[0,1]. Points are strictly increasing, weights positive.
struct Grid {
  Eigen::VectorXd points;
  Eigen::VectorXd weights;

  Index size() const { return points.size(); }
};

/// A set of curves evaluated on a shared grid, one row per curve.
/// `labels` is empty when the sample is unlabeled.
struct FunctionalSample {
  Grid grid;
  Eigen::MatrixXd curves;  // n x p
  std::vector<int> labels;

  Index n() const { return curves.rows(); }
  Index p() const { return curves.cols(); }
  Curve curve(Index i) const { return curves.row(i).transpose(); }
};

/// Rows of `sample` selected by index, labels carried along when present.
FunctionalSample take_rows(const FunctionalSample& sample, const std::vector<Index>& rows);

/// Splits a labeled sample into (label 0, label 1) sub-samples.
std::array<FunctionalSample, 2> split_by_label(const FunctionalSample& sample);

/// p equispaced points on [0,1] with trapezoidal weights (sum to 1).
Grid make_uniform_grid(Index p);

/// Trapezoidal grid on an arbitrary strictly increasing point set in [0,1].
Grid make_trapezoid_grid(const Eigen::VectorXd& points);

/// Quadrature inner product sum_i w_i f_i g_i.
double l2_inner(const Curve& f, const Curve& g, const Grid& grid);

double l2_norm(const Curve& f, const Grid& grid);

/// Coefficients <x, b_j> for the columns of `basis`.
Eigen::VectorXd project_coeffs(const Curve& x, const Eigen::MatrixXd& basis, const Grid& grid);

void check_alignment(const Curve& f, const Grid& grid, const char* where);

}  // namespace fmd
