#include "fmd/serialize.hpp"

#include <stdexcept>

namespace fmd {

using nlohmann::json;

namespace {

json vector_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

Eigen::VectorXd vector_from_json(const json& arr) {
  Eigen::VectorXd v(static_cast<Index>(arr.size()));
  for (Index i = 0; i < v.size(); ++i) v(i) = arr[static_cast<size_t>(i)].get<double>();
  return v;
}

json grid_to_json(const Grid& grid) {
  return {{"points", vector_to_json(grid.points)}, {"weights", vector_to_json(grid.weights)}};
}

Grid grid_from_json(const json& j) {
  return {vector_from_json(j.at("points")), vector_from_json(j.at("weights"))};
}

json eigsys_to_json(const EigenSystem& sys) {
  json funcs = json::array();
  for (Index j = 0; j < sys.rank(); ++j) funcs.push_back(vector_to_json(sys.eigenfunctions.col(j)));
  return {{"grid", grid_to_json(sys.grid)},
          {"mean", vector_to_json(sys.mean)},
          {"eigenvalues", vector_to_json(sys.eigenvalues)},
          {"eigenfunctions", funcs}};
}

EigenSystem eigsys_from_json(const json& j) {
  EigenSystem sys;
  sys.grid = grid_from_json(j.at("grid"));
  sys.mean = vector_from_json(j.at("mean"));
  sys.eigenvalues = vector_from_json(j.at("eigenvalues"));
  const auto& funcs = j.at("eigenfunctions");
  sys.eigenfunctions.resize(sys.grid.size(), static_cast<Index>(funcs.size()));
  for (Index col = 0; col < sys.eigenfunctions.cols(); ++col)
    sys.eigenfunctions.col(col) = vector_from_json(funcs[static_cast<size_t>(col)]);
  return sys;
}

}  // namespace

std::string cov_mode_name(CovMode mode) {
  return mode == CovMode::empirical ? "empirical" : "mcd";
}

CovMode cov_mode_from_name(const std::string& name) {
  if (name == "empirical") return CovMode::empirical;
  if (name == "mcd") return CovMode::mcd;
  throw std::invalid_argument("unknown covariance mode: " + name);
}

json model_to_json(const MahalanobisModel& model) {
  json j = eigsys_to_json(model.eigsys);
  j["alpha"] = model.alpha;
  return j;
}

MahalanobisModel model_from_json(const json& j) {
  return {eigsys_from_json(j), j.at("alpha").get<double>()};
}

json report_to_json(const OutlierReport& report) {
  return {{"flags", report.flags},
          {"threshold", report.threshold},
          {"distances_sq", report.distances_sq},
          {"level", report.level},
          {"cov_mode", cov_mode_name(report.cov_mode)}};
}

OutlierReport report_from_json(const json& j) {
  OutlierReport report;
  report.flags = j.at("flags").get<std::vector<bool>>();
  report.threshold = j.at("threshold").get<double>();
  report.distances_sq = j.at("distances_sq").get<std::vector<double>>();
  report.level = j.at("level").get<double>();
  report.cov_mode = cov_mode_from_name(j.at("cov_mode").get<std::string>());
  return report;
}

json boxplot_to_json(const BoxplotSummary& box) {
  return {{"median_index", box.median_index},
          {"central_lower", vector_to_json(box.central_lower)},
          {"central_upper", vector_to_json(box.central_upper)},
          {"whisker_lower", vector_to_json(box.whisker_lower)},
          {"whisker_upper", vector_to_json(box.whisker_upper)},
          {"outlier_indices", box.outlier_indices},
          {"depths", box.depths}};
}

json classifier_to_json(const ClassifierModel& model) {
  return {{"class0", model_to_json(model.class_models[0])},
          {"class1", model_to_json(model.class_models[1])},
          {"priors", model.priors},
          {"mode", model.mode == ClassifyMode::heteroscedastic ? "heteroscedastic" : "homoscedastic"},
          {"threshold_C", model.threshold_C}};
}

ClassifierModel classifier_from_json(const json& j) {
  ClassifierModel model;
  model.class_models[0] = model_from_json(j.at("class0"));
  model.class_models[1] = model_from_json(j.at("class1"));
  const auto priors = j.at("priors").get<std::vector<double>>();
  if (priors.size() != 2) throw std::invalid_argument("classifier_from_json: need two priors");
  model.priors = {priors[0], priors[1]};
  const auto mode = j.at("mode").get<std::string>();
  if (mode == "heteroscedastic")
    model.mode = ClassifyMode::heteroscedastic;
  else if (mode == "homoscedastic")
    model.mode = ClassifyMode::homoscedastic;
  else
    throw std::invalid_argument("classifier_from_json: unknown mode " + mode);
  model.threshold_C = j.at("threshold_C").get<double>();
  return model;
}

}  // namespace fmd
