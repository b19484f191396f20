#include "fmd/bench.hpp"

#include "fmd/csv.hpp"
#include "fmd/errors.hpp"
#include "fmd/parallel.hpp"
#include "fmd/rng.hpp"
#include "fmd/serialize.hpp"
#include "fmd/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace fmd {

namespace {

MethodStats summarize_percent(const std::vector<double>& errors) {
  const auto n = static_cast<double>(errors.size());
  double mean = 0.0;
  for (double e : errors) mean += e;
  mean /= n;
  double ss = 0.0;
  for (double e : errors) ss += (e - mean) * (e - mean);
  const double sd = n > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  return {100.0 * mean, 100.0 * sd};
}

std::pair<double, double> mean_sd(const std::vector<double>& xs) {
  const auto n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, n > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0};
}

struct RepErrors {
  double malpha = 0.0, dfm = 0.0, knn3 = 0.0, knn5 = 0.0;
  Index dfm_k = 0;
};

// Shared per-repetition protocol of both classification experiments: CV the
// tuning constants on the training set, fit on the full training set, score
// on the test set.
RepErrors classify_rep(const FunctionalSample& train, const FunctionalSample& test,
                       const BenchConfig& cfg, std::uint64_t rep_seed) {
  const auto [train0, train1] = split_by_label(train);

  RepErrors out;
  const std::vector<double> alpha_grid = default_alpha_grid();
  const double alpha = cv_alpha(train0, train1, alpha_grid, cfg.cv_folds, rep_seed);
  const ClassifierModel model =
      fit_classifier(train0, train1, alpha, {0.5, 0.5}, ClassifyMode::heteroscedastic);
  out.malpha = evaluate_classifier(model, test);

  const EigenSystem sys0 = model.class_models[0].eigsys;
  const EigenSystem sys1 = model.class_models[1].eigsys;
  const Index k_max = std::min<Index>(20, std::min(sys0.rank(), sys1.rank()));
  std::vector<Index> k_grid(static_cast<size_t>(k_max));
  for (Index k = 1; k <= k_max; ++k) k_grid[static_cast<size_t>(k - 1)] = k;
  out.dfm_k = cv_dfm_k(train0, train1, k_grid, cfg.cv_folds, rep_seed);
  out.dfm = evaluate_classifier(
      [&](const Curve& x) { return predict_dfm(sys0, sys1, out.dfm_k, x); }, test);

  out.knn3 = evaluate_classifier([&](const Curve& x) { return knn_classify(train, x, 3); }, test);
  out.knn5 = evaluate_classifier([&](const Curve& x) { return knn_classify(train, x, 5); }, test);
  return out;
}

ClassifyCell summarize_reps(const std::vector<RepErrors>& reps) {
  ClassifyCell cell;
  std::vector<double> malpha, dfm, knn3, knn5;
  std::map<Index, int> k_counts;
  for (const RepErrors& r : reps) {
    malpha.push_back(r.malpha);
    dfm.push_back(r.dfm);
    knn3.push_back(r.knn3);
    knn5.push_back(r.knn5);
    ++k_counts[r.dfm_k];
  }
  cell.malpha = summarize_percent(malpha);
  cell.dfm = summarize_percent(dfm);
  cell.knn3 = summarize_percent(knn3);
  cell.knn5 = summarize_percent(knn5);
  int best = 0;
  for (const auto& [k, count] : k_counts) {
    if (count > best) {
      best = count;
      cell.dfm_k_mode = k;
    }
  }
  return cell;
}

const char* scenario_name(Scenario s) {
  switch (s) {
    case Scenario::A: return "A";
    case Scenario::B: return "B";
    case Scenario::C: return "C";
  }
  return "?";
}

}  // namespace

OutlierCell run_outlier_cell(int model, double c, const BenchConfig& cfg) {
  std::vector<double> pcs(static_cast<size_t>(cfg.reps)), pfs(static_cast<size_t>(cfg.reps));
  const Grid grid = make_uniform_grid(cfg.grid_size);
  const std::uint64_t cell_seed =
      derive_seed(cfg.seed, static_cast<std::uint64_t>(model),
                  static_cast<std::uint64_t>(std::llround(c * 1000.0)));
  parallel_for(cfg.reps, [&](long rep) {
    const std::uint64_t rep_seed = derive_seed(cell_seed, static_cast<std::uint64_t>(rep));
    const FunctionalSample sample = contamination_model(model, cfg.n, c, grid, rep_seed);
    const OutlierReport report = detect_outliers(sample, cfg.alpha, cfg.level, cfg.cov_mode,
                                                 cfg.n_mc, derive_seed(rep_seed, 1), cfg.mcd);
    std::vector<bool> truth(sample.labels.size());
    for (size_t i = 0; i < truth.size(); ++i) truth[i] = sample.labels[i] != 0;
    const auto [pc, pf] = evaluate_detection(report.flags, truth);
    pcs[static_cast<size_t>(rep)] = pc;
    pfs[static_cast<size_t>(rep)] = pf;
  });

  OutlierCell cell;
  cell.model = model;
  cell.c = c;
  if (c > 0.0) {
    const auto [m, s] = mean_sd(pcs);
    cell.pc_mean = m;
    cell.pc_sd = s;
  } else {
    cell.pc_mean = cell.pc_sd = std::numeric_limits<double>::quiet_NaN();
  }
  const auto [m, s] = mean_sd(pfs);
  cell.pf_mean = m;
  cell.pf_sd = s;
  return cell;
}

ClassifyCell run_bm_bridge_cell(double T_cut, const BenchConfig& cfg) {
  std::vector<RepErrors> reps(static_cast<size_t>(cfg.reps));
  const std::uint64_t cell_seed =
      derive_seed(cfg.seed, static_cast<std::uint64_t>(std::llround(T_cut * 10000.0)), 77);
  parallel_for(cfg.reps, [&](long rep) {
    const std::uint64_t rep_seed = derive_seed(cell_seed, static_cast<std::uint64_t>(rep));
    const FunctionalSample train =
        brownian_pair(T_cut, cfg.n_train, cfg.grid_size, derive_seed(rep_seed, 0));
    const FunctionalSample test =
        brownian_pair(T_cut, cfg.n_test, cfg.grid_size, derive_seed(rep_seed, 1));
    reps[static_cast<size_t>(rep)] = classify_rep(train, test, cfg, derive_seed(rep_seed, 2));
  });
  ClassifyCell cell = summarize_reps(reps);
  cell.cut = T_cut;
  cell.n_train = cfg.n_train;
  cell.bayes = 100.0 * bayes_error_cut(T_cut);
  return cell;
}

ClassifyCell run_scenario_cell(Scenario scenario, bool diff_means, bool diff_sds, Index n_train,
                               const BenchConfig& cfg) {
  ScenarioSpec spec;
  spec.scenario = scenario;
  spec.different_means = diff_means;
  spec.different_sds = diff_sds;
  const Grid grid = make_uniform_grid(51);

  std::vector<RepErrors> reps(static_cast<size_t>(cfg.reps));
  const std::uint64_t cell_seed =
      derive_seed(cfg.seed,
                  static_cast<std::uint64_t>(scenario) * 8 +
                      static_cast<std::uint64_t>(diff_means) * 4 +
                      static_cast<std::uint64_t>(diff_sds) * 2,
                  static_cast<std::uint64_t>(n_train));
  parallel_for(cfg.reps, [&](long rep) {
    const std::uint64_t rep_seed = derive_seed(cell_seed, static_cast<std::uint64_t>(rep));
    const FunctionalSample train = scenario_sample(spec, n_train, grid, derive_seed(rep_seed, 0));
    const FunctionalSample test =
        scenario_sample(spec, cfg.n_test, grid, derive_seed(rep_seed, 1));
    reps[static_cast<size_t>(rep)] = classify_rep(train, test, cfg, derive_seed(rep_seed, 2));
  });
  ClassifyCell cell = summarize_reps(reps);
  cell.scenario = scenario;
  cell.n_train = n_train;
  cell.different_means = diff_means;
  cell.different_sds = diff_sds;
  cell.bayes = std::numeric_limits<double>::quiet_NaN();
  return cell;
}

namespace {

void write_table(const std::string& path, const std::string& text) {
  if (path.empty()) return;
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << text;
  if (!out) throw IoError("write failed: " + path);
}

std::string config_echo(const BenchConfig& cfg, const char* experiment) {
  std::ostringstream os;
  os << "# experiment=" << experiment << " reps=" << cfg.reps << " seed=" << cfg.seed
     << " grid=" << cfg.grid_size;
  if (cfg.experiment == Experiment::outliers)
    os << " n=" << cfg.n << " mc=" << cfg.n_mc << " alpha=" << cfg.alpha << " level=" << cfg.level
       << " cov=" << cov_mode_name(cfg.cov_mode);
  else
    os << " n_train=" << cfg.n_train << " n_test=" << cfg.n_test << " folds=" << cfg.cv_folds;
  os << '\n';
  return os.str();
}

}  // namespace

std::vector<OutlierCell> cmd_outlier_bench(const BenchConfig& cfg) {
  std::vector<OutlierCell> cells;
  for (int model : cfg.models)
    for (double c : cfg.contaminations) cells.push_back(run_outlier_cell(model, c, cfg));

  std::ostringstream os;
  os << config_echo(cfg, "outliers");
  os << "model,c,pc_mean,pc_sd,pf_mean,pf_sd\n";
  for (const OutlierCell& cell : cells)
    os << cell.model << ',' << format_double(cell.c) << ',' << format_double(cell.pc_mean) << ','
       << format_double(cell.pc_sd) << ',' << format_double(cell.pf_mean) << ','
       << format_double(cell.pf_sd) << '\n';
  write_table(cfg.out_path, os.str());
  return cells;
}

std::vector<ClassifyCell> cmd_classify_bench(const BenchConfig& cfg) {
  std::vector<ClassifyCell> cells;
  std::ostringstream os;
  if (cfg.experiment == Experiment::bm_bridge) {
    for (double cut : cfg.cuts) cells.push_back(run_bm_bridge_cell(cut, cfg));
    os << config_echo(cfg, "bm-bridge");
    os << "cut,bayes,malpha_mean,malpha_sd,dfm_mean,dfm_sd,dfm_k,knn3_mean,knn3_sd,knn5_mean,"
          "knn5_sd\n";
    for (const ClassifyCell& cell : cells)
      os << format_double(cell.cut) << ',' << format_double(cell.bayes) << ','
         << format_double(cell.malpha.mean) << ',' << format_double(cell.malpha.sd) << ','
         << format_double(cell.dfm.mean) << ',' << format_double(cell.dfm.sd) << ','
         << cell.dfm_k_mode << ',' << format_double(cell.knn3.mean) << ','
         << format_double(cell.knn3.sd) << ',' << format_double(cell.knn5.mean) << ','
         << format_double(cell.knn5.sd) << '\n';
  } else if (cfg.experiment == Experiment::scenarios) {
    const std::array<std::pair<bool, bool>, 3> cases = {
        {{false, true}, {true, false}, {true, true}}};  // mean/sd: same-diff, diff-same, diff-diff
    for (Scenario scenario : cfg.scenarios)
      for (Index n_train : cfg.train_sizes)
        for (const auto& [diff_means, diff_sds] : cases)
          cells.push_back(run_scenario_cell(scenario, diff_means, diff_sds, n_train, cfg));
    os << config_echo(cfg, "scenarios");
    os << "scenario,n_train,mean,sd,malpha_mean,malpha_sd,dfm_mean,dfm_sd,dfm_k,knn3_mean,"
          "knn3_sd,knn5_mean,knn5_sd\n";
    for (const ClassifyCell& cell : cells)
      os << scenario_name(cell.scenario) << ',' << cell.n_train << ','
         << (cell.different_means ? "diff" : "same") << ','
         << (cell.different_sds ? "diff" : "same") << ',' << format_double(cell.malpha.mean) << ','
         << format_double(cell.malpha.sd) << ',' << format_double(cell.dfm.mean) << ','
         << format_double(cell.dfm.sd) << ',' << cell.dfm_k_mode << ','
         << format_double(cell.knn3.mean) << ',' << format_double(cell.knn3.sd) << ','
         << format_double(cell.knn5.mean) << ',' << format_double(cell.knn5.sd) << '\n';
  } else {
    throw std::invalid_argument("cmd_classify_bench: config experiment is not a classification one");
  }
  write_table(cfg.out_path, os.str());
  return cells;
}

void cmd_boxplot(const std::string& in_path, double alpha, double level, int n_mc,
                 std::uint64_t seed, CovMode cov_mode, const std::string& out_svg,
                 const std::string& out_json) {
  const FunctionalSample sample = read_curves_csv_file(in_path);
  const BoxplotSummary box = functional_boxplot(sample, alpha, level, n_mc, seed, cov_mode);

  // Build both documents before touching the filesystem so a failure never
  // leaves partial output behind.
  const std::string svg = render_boxplot_svg(sample, box);
  const std::string json = boxplot_to_json(box).dump(2) + "\n";
  write_table(out_json, json);
  write_table(out_svg, svg);
}

}  // namespace fmd
