#pragma once

#include "fmd/classify.hpp"
#include "fmd/outliers.hpp"

#include <json.hpp>

#include <string>

namespace fmd {

// JSON schemas for fitted objects and reports. Doubles survive a dump/parse
// cycle bitwise (shortest round-trip formatting).

nlohmann::json model_to_json(const MahalanobisModel& model);
MahalanobisModel model_from_json(const nlohmann::json& j);

nlohmann::json report_to_json(const OutlierReport& report);
OutlierReport report_from_json(const nlohmann::json& j);

nlohmann::json boxplot_to_json(const BoxplotSummary& box);

nlohmann::json classifier_to_json(const ClassifierModel& model);
ClassifierModel classifier_from_json(const nlohmann::json& j);

std::string cov_mode_name(CovMode mode);
CovMode cov_mode_from_name(const std::string& name);

}  // namespace fmd
