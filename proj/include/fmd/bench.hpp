#pragma once

#include "fmd/classify.hpp"
#include "fmd/outliers.hpp"
#include "fmd/simulate.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace fmd {

enum class Experiment { outliers, bm_bridge, scenarios };

/// Knobs for the desk-scale benchmark harness. Defaults mirror the study
/// protocols with reduced repetition counts.
struct BenchConfig {
  Experiment experiment = Experiment::outliers;
  int reps = 50;
  std::uint64_t seed = 1;
  std::string out_path;

  // outlier experiment
  Index n = 100;
  Index grid_size = 50;
  double alpha = 0.01;
  double level = 0.95;
  int n_mc = 2000;
  CovMode cov_mode = CovMode::mcd;
  McdOptions mcd;
  std::vector<int> models = {1, 2, 3};
  std::vector<double> contaminations = {0.0, 0.05, 0.1, 0.15, 0.2};

  // classification experiments
  Index n_train = 50;  // per class
  Index n_test = 250;  // per class
  int cv_folds = 5;
  std::vector<double> cuts = {0.75, 0.8125, 0.875, 0.9375, 1.0};
  std::vector<Scenario> scenarios = {Scenario::A, Scenario::B, Scenario::C};
  std::vector<Index> train_sizes = {50, 100};
};

struct OutlierCell {
  int model = 0;
  double c = 0.0;
  double pc_mean = 0.0, pc_sd = 0.0;
  double pf_mean = 0.0, pf_sd = 0.0;
};

struct MethodStats {
  double mean = 0.0;  // misclassification percent
  double sd = 0.0;
};

struct ClassifyCell {
  double cut = 0.0;  // bm-bridge only
  Scenario scenario = Scenario::A;
  Index n_train = 0;
  bool different_means = false, different_sds = false;
  double bayes = 0.0;  // percent, bm-bridge only
  MethodStats malpha, dfm, knn3, knn5;
  Index dfm_k_mode = 0;  // most frequently selected k across repetitions
};

/// One (model, contamination) cell: seeded repetitions of detect_outliers
/// scored against the generator labels.
OutlierCell run_outlier_cell(int model, double c, const BenchConfig& cfg);

/// One cut point of the motion-vs-bridge problem, all four methods.
ClassifyCell run_bm_bridge_cell(double T_cut, const BenchConfig& cfg);

/// One scenario cell (scenario, train size, mean/sd case), all four methods.
ClassifyCell run_scenario_cell(Scenario scenario, bool diff_means, bool diff_sds, Index n_train,
                               const BenchConfig& cfg);

/// Full tables; each writes CSV (with a config echo line) when
/// cfg.out_path is set and also returns the rows.
std::vector<OutlierCell> cmd_outlier_bench(const BenchConfig& cfg);
std::vector<ClassifyCell> cmd_classify_bench(const BenchConfig& cfg);

/// Reads curves, builds the boxplot, then writes the JSON summary and the
/// SVG rendering. Nothing is written when any stage fails.
void cmd_boxplot(const std::string& in_path, double alpha, double level, int n_mc,
                 std::uint64_t seed, CovMode cov_mode, const std::string& out_svg,
                 const std::string& out_json);

}  // namespace fmd
