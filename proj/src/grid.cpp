#include "fmd/grid.hpp"

#include <stdexcept>
#include <string>

namespace fmd {

void check_alignment(const Curve& f, const Grid& grid, const char* where) {
  if (f.size() != grid.size())
    throw std::invalid_argument(std::string(where) + ": curve length " +
                                std::to_string(f.size()) + " does not match grid size " +
                                std::to_string(grid.size()));
}

FunctionalSample take_rows(const FunctionalSample& sample, const std::vector<Index>& rows) {
  FunctionalSample out;
  out.grid = sample.grid;
  out.curves.resize(static_cast<Index>(rows.size()), sample.p());
  const bool labeled = !sample.labels.empty();
  if (labeled) out.labels.resize(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    out.curves.row(static_cast<Index>(i)) = sample.curves.row(rows[i]);
    if (labeled) out.labels[i] = sample.labels[static_cast<size_t>(rows[i])];
  }
  return out;
}

std::array<FunctionalSample, 2> split_by_label(const FunctionalSample& sample) {
  if (sample.labels.size() != static_cast<size_t>(sample.n()))
    throw std::invalid_argument("split_by_label: sample is not labeled");
  std::vector<Index> rows0, rows1;
  for (Index i = 0; i < sample.n(); ++i)
    (sample.labels[static_cast<size_t>(i)] == 0 ? rows0 : rows1).push_back(i);
  return {take_rows(sample, rows0), take_rows(sample, rows1)};
}

Grid make_uniform_grid(Index p) {
  if (p < 2) throw std::invalid_argument("make_uniform_grid: need p >= 2");
  Grid g;
  g.points = Eigen::VectorXd::LinSpaced(p, 0.0, 1.0);
  const double h = 1.0 / static_cast<double>(p - 1);
  g.weights = Eigen::VectorXd::Constant(p, h);
  g.weights(0) = 0.5 * h;
  g.weights(p - 1) = 0.5 * h;
  return g;
}

Grid make_trapezoid_grid(const Eigen::VectorXd& points) {
  const Index p = points.size();
  if (p < 2) throw std::invalid_argument("make_trapezoid_grid: need at least 2 points");
  for (Index i = 1; i < p; ++i)
    if (!(points(i) > points(i - 1)))
      throw std::invalid_argument("make_trapezoid_grid: points must be strictly increasing");
  if (points(0) < 0.0 || points(p - 1) > 1.0)
    throw std::invalid_argument("make_trapezoid_grid: points must lie in [0,1]");
  Grid g;
  g.points = points;
  g.weights = Eigen::VectorXd::Zero(p);
  g.weights(0) = 0.5 * (points(1) - points(0));
  g.weights(p - 1) = 0.5 * (points(p - 1) - points(p - 2));
  for (Index i = 1; i + 1 < p; ++i) g.weights(i) = 0.5 * (points(i + 1) - points(i - 1));
  return g;
}

double l2_inner(const Curve& f, const Curve& g, const Grid& grid) {
  check_alignment(f, grid, "l2_inner");
  check_alignment(g, grid, "l2_inner");
  return (f.array() * g.array() * grid.weights.array()).sum();
}

double l2_norm(const Curve& f, const Grid& grid) {
  return std::sqrt(l2_inner(f, f, grid));
}

Eigen::VectorXd project_coeffs(const Curve& x, const Eigen::MatrixXd& basis, const Grid& grid) {
  check_alignment(x, grid, "project_coeffs");
  if (basis.rows() != grid.size())
    throw std::invalid_argument("project_coeffs: basis rows do not match grid size");
  return basis.transpose() * (grid.weights.asDiagonal() * x);
}

}  // namespace fmd
