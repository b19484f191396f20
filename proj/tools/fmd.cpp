// Command-line surface for the functional Mahalanobis toolkit: simulation,
// model fitting, distances, outlier reports, boxplots, classification and the
// desk-scale benchmark harness.

#include "fmd/bench.hpp"
#include "fmd/csv.hpp"
#include "fmd/errors.hpp"
#include "fmd/rng.hpp"
#include "fmd/serialize.hpp"
#include "fmd/svg.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

namespace {

using namespace fmd;

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << text;
  if (!out) throw IoError("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

MahalanobisModel load_model(const std::string& path) {
  return model_from_json(nlohmann::json::parse(read_text_file(path)));
}

struct SimulateArgs {
  std::string kind = "model2";
  long n = 100;
  long n_per_class = 50;
  long p = 50;
  double c = 0.1;
  double t_cut = 1.0;
  double scale = 1.0;
  double range = 1.0;
  std::string scenario = "B";
  std::string mean_case = "diff";
  std::string sd_case = "diff";
  std::uint64_t seed = 1;
  std::string out;
};

int run_simulate(const SimulateArgs& a) {
  FunctionalSample sample;
  if (a.kind == "model1" || a.kind == "model2" || a.kind == "model3") {
    const int model_id = a.kind.back() - '0';
    sample = contamination_model(model_id, a.n, a.c, make_uniform_grid(a.p), a.seed);
  } else if (a.kind == "ou" || a.kind == "brownian" || a.kind == "bridge") {
    KernelSpec kernel;
    kernel.family = a.kind == "ou"         ? KernelFamily::ou
                    : a.kind == "brownian" ? KernelFamily::brownian
                                           : KernelFamily::bridge;
    kernel.scale = a.scale;
    kernel.range = a.range;
    const Grid grid = make_uniform_grid(a.p);
    sample = gp_sample(kernel, Curve::Zero(grid.size()), grid, a.n, a.seed);
  } else if (a.kind == "bm-bridge") {
    sample = brownian_pair(a.t_cut, a.n_per_class, a.p, a.seed);
  } else if (a.kind == "scenario") {
    ScenarioSpec spec;
    if (a.scenario == "A")
      spec.scenario = Scenario::A;
    else if (a.scenario == "B")
      spec.scenario = Scenario::B;
    else if (a.scenario == "C")
      spec.scenario = Scenario::C;
    else
      throw std::invalid_argument("simulate: unknown scenario " + a.scenario);
    spec.different_means = a.mean_case == "diff";
    spec.different_sds = a.sd_case == "diff";
    sample = scenario_sample(spec, a.n_per_class, make_uniform_grid(a.p), a.seed);
  } else {
    throw std::invalid_argument("simulate: unknown kind " + a.kind);
  }
  write_curves_csv_file(a.out, sample);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regularized functional Mahalanobis distance toolkit"};
  app.require_subcommand(1);

  // simulate
  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Generate benchmark curve samples");
  simulate->add_option("--kind", sim.kind,
                       "model1|model2|model3|ou|brownian|bridge|bm-bridge|scenario");
  simulate->add_option("--n", sim.n, "number of curves");
  simulate->add_option("--n-per-class", sim.n_per_class, "curves per class");
  simulate->add_option("--p", sim.p, "grid size");
  simulate->add_option("--c", sim.c, "contamination rate");
  simulate->add_option("--t-cut", sim.t_cut, "cut point for bm-bridge");
  simulate->add_option("--scale", sim.scale, "kernel scale");
  simulate->add_option("--range", sim.range, "kernel range");
  simulate->add_option("--scenario", sim.scenario, "A|B|C");
  simulate->add_option("--mean", sim.mean_case, "same|diff");
  simulate->add_option("--sd", sim.sd_case, "same|diff");
  simulate->add_option("--seed", sim.seed, "random seed");
  simulate->add_option("--out", sim.out, "output CSV path")->required();

  // fit
  struct {
    std::string in, out;
    double alpha = 0.01;
    std::string cov = "empirical";
    std::uint64_t seed = 1;
    std::vector<double> tune_grid;
    int n_mc = 2000;
  } fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a distance model from curves");
  fit_cmd->add_option("--in", fit.in, "input curves CSV")->required();
  fit_cmd->add_option("--alpha", fit.alpha, "regularization parameter");
  fit_cmd->add_option("--cov", fit.cov, "empirical|mcd");
  fit_cmd->add_option("--seed", fit.seed, "seed (mcd restarts, tuning draws)");
  fit_cmd->add_option("--tune-alpha", fit.tune_grid,
                      "alpha grid; picks the KL-closest alpha and overrides --alpha");
  fit_cmd->add_option("--mc", fit.n_mc, "Monte Carlo draws for tuning");
  fit_cmd->add_option("--out", fit.out, "output model JSON path")->required();

  // dist
  struct {
    std::string model, in, out;
  } dist;
  auto* dist_cmd = app.add_subcommand("dist", "Distances to the model mean");
  dist_cmd->add_option("--model", dist.model, "model JSON path")->required();
  dist_cmd->add_option("--in", dist.in, "input curves CSV")->required();
  dist_cmd->add_option("--out", dist.out, "output CSV path (default stdout)");

  // outliers
  struct {
    std::string in, out;
    double alpha = 0.01, level = 0.95;
    int n_mc = 2000;
    std::uint64_t seed = 1;
    std::string cov = "mcd";
  } outl;
  auto* outl_cmd = app.add_subcommand("outliers", "Flag outlying curves");
  outl_cmd->add_option("--in", outl.in, "input curves CSV")->required();
  outl_cmd->add_option("--alpha", outl.alpha, "regularization parameter");
  outl_cmd->add_option("--level", outl.level, "detection quantile level");
  outl_cmd->add_option("--mc", outl.n_mc, "Monte Carlo sample size");
  outl_cmd->add_option("--seed", outl.seed, "random seed");
  outl_cmd->add_option("--cov", outl.cov, "empirical|mcd");
  outl_cmd->add_option("--out", outl.out, "output report JSON path");

  // boxplot
  struct {
    std::string in, out_svg, out_json;
    double alpha = 0.01, level = 0.95;
    int n_mc = 2000;
    std::uint64_t seed = 1;
    std::string cov = "empirical";
  } box;
  auto* box_cmd = app.add_subcommand("boxplot", "Functional boxplot (SVG + JSON)");
  box_cmd->add_option("--in", box.in, "input curves CSV")->required();
  box_cmd->add_option("--alpha", box.alpha, "regularization parameter");
  box_cmd->add_option("--level", box.level, "outlier quantile level");
  box_cmd->add_option("--mc", box.n_mc, "Monte Carlo sample size");
  box_cmd->add_option("--seed", box.seed, "random seed");
  box_cmd->add_option("--cov", box.cov, "empirical|mcd");
  box_cmd->add_option("--out-svg", box.out_svg, "output SVG path")->required();
  box_cmd->add_option("--out-json", box.out_json, "output JSON path")->required();

  // classify
  struct {
    std::string train0, train1, test, out, model_out;
    double alpha = 0.01;
    bool cv = false;
    int folds = 5;
    std::uint64_t seed = 1;
    std::string mode = "heteroscedastic";
    std::vector<double> priors = {0.5, 0.5};
  } cls;
  auto* cls_cmd = app.add_subcommand("classify", "Two-class distance classifier");
  cls_cmd->add_option("--train0", cls.train0, "class-0 training CSV")->required();
  cls_cmd->add_option("--train1", cls.train1, "class-1 training CSV")->required();
  cls_cmd->add_option("--test", cls.test, "test CSV (labeled rows get scored)")->required();
  cls_cmd->add_option("--alpha", cls.alpha, "regularization parameter");
  cls_cmd->add_flag("--cv", cls.cv, "pick alpha by cross-validation");
  cls_cmd->add_option("--folds", cls.folds, "cross-validation folds");
  cls_cmd->add_option("--seed", cls.seed, "random seed");
  cls_cmd->add_option("--mode", cls.mode, "heteroscedastic|homoscedastic");
  cls_cmd->add_option("--priors", cls.priors, "two class priors")->expected(2);
  cls_cmd->add_option("--out", cls.out, "predictions CSV path");
  cls_cmd->add_option("--model-out", cls.model_out, "fitted classifier JSON path");

  // bench
  BenchConfig bench;
  std::string bench_experiment = "outliers";
  std::string bench_cov = "mcd";
  auto* bench_cmd = app.add_subcommand("bench", "Desk-scale benchmark tables");
  bench_cmd->add_option("--experiment", bench_experiment, "outliers|bm-bridge|scenarios")
      ->required();
  bench_cmd->add_option("--reps", bench.reps, "repetitions per cell");
  bench_cmd->add_option("--seed", bench.seed, "random seed");
  bench_cmd->add_option("--n", bench.n, "sample size per repetition (outliers)");
  bench_cmd->add_option("--grid-size", bench.grid_size, "grid size");
  bench_cmd->add_option("--alpha", bench.alpha, "regularization parameter (outliers)");
  bench_cmd->add_option("--level", bench.level, "detection level (outliers)");
  bench_cmd->add_option("--mc", bench.n_mc, "Monte Carlo sample size (outliers)");
  bench_cmd->add_option("--cov", bench_cov, "empirical|mcd (outliers)");
  bench_cmd->add_option("--models", bench.models, "contamination models to run");
  bench_cmd->add_option("--contaminations", bench.contaminations, "contamination rates");
  bench_cmd->add_option("--n-train", bench.n_train, "training curves per class");
  bench_cmd->add_option("--n-test", bench.n_test, "test curves per class");
  bench_cmd->add_option("--folds", bench.cv_folds, "cross-validation folds");
  bench_cmd->add_option("--cuts", bench.cuts, "bm-bridge cut points");
  bench_cmd->add_option("--out", bench.out_path, "output CSV path")->required();

  try {
    app.parse(argc, argv);

    if (simulate->parsed()) return run_simulate(sim);

    if (fit_cmd->parsed()) {
      const FunctionalSample sample = read_curves_csv_file(fit.in);
      const CovMode cov_mode = cov_mode_from_name(fit.cov);
      double alpha = fit.alpha;
      if (!fit.tune_grid.empty()) {
        // Tune against the central law: distances and reference draws are
        // recomputed at every candidate alpha.
        const MahalanobisModel probe =
            fit_detection_model(sample, fit.tune_grid.front(), cov_mode, fit.seed);
        double best_kl = std::numeric_limits<double>::infinity();
        std::vector<double> grid = fit.tune_grid;
        std::sort(grid.begin(), grid.end());
        for (double a : grid) {
          MahalanobisModel candidate = probe;
          candidate.alpha = a;
          std::vector<double> d2(static_cast<size_t>(sample.n()));
          for (Index i = 0; i < sample.n(); ++i)
            d2[static_cast<size_t>(i)] =
                mahalanobis_distance_sq(sample.curve(i), candidate.eigsys.mean, candidate);
          const WeightedChiSq law = wcs_from_model(candidate.eigsys, a, candidate.eigsys.mean);
          const double kl = kde_kl_divergence(d2, wcs_sample(law, fit.n_mc, fit.seed));
          if (kl < best_kl) {
            best_kl = kl;
            alpha = a;
          }
        }
        std::cout << "selected alpha=" << alpha << "\n";
      }
      const MahalanobisModel model = fit_detection_model(sample, alpha, cov_mode, fit.seed);
      write_text_file(fit.out, model_to_json(model).dump(2) + "\n");
      return 0;
    }

    if (dist_cmd->parsed()) {
      const MahalanobisModel model = load_model(dist.model);
      const FunctionalSample sample = read_curves_csv_file(dist.in);
      std::ostringstream os;
      os << "id,distance,distance_sq,depth\n";
      for (Index i = 0; i < sample.n(); ++i) {
        const double d2 = mahalanobis_distance_sq(sample.curve(i), model.eigsys.mean, model);
        os << i << ',' << format_double(std::sqrt(d2)) << ',' << format_double(d2) << ','
           << format_double(1.0 / (1.0 + d2)) << '\n';
      }
      if (dist.out.empty())
        std::cout << os.str();
      else
        write_text_file(dist.out, os.str());
      return 0;
    }

    if (outl_cmd->parsed()) {
      const FunctionalSample sample = read_curves_csv_file(outl.in);
      const OutlierReport report =
          detect_outliers(sample, outl.alpha, outl.level, cov_mode_from_name(outl.cov), outl.n_mc,
                          outl.seed);
      long flagged = 0;
      for (size_t i = 0; i < report.flags.size(); ++i) {
        if (report.flags[i]) {
          ++flagged;
          std::cout << "outlier: " << i << "\n";
        }
      }
      std::cout << "flagged " << flagged << " of " << report.flags.size() << " curves (threshold "
                << report.threshold << ")\n";
      if (!outl.out.empty()) write_text_file(outl.out, report_to_json(report).dump(2) + "\n");
      return 0;
    }

    if (box_cmd->parsed()) {
      cmd_boxplot(box.in, box.alpha, box.level, box.n_mc, box.seed, cov_mode_from_name(box.cov),
                  box.out_svg, box.out_json);
      return 0;
    }

    if (cls_cmd->parsed()) {
      const FunctionalSample train0 = read_curves_csv_file(cls.train0);
      const FunctionalSample train1 = read_curves_csv_file(cls.train1);
      const FunctionalSample test = read_curves_csv_file(cls.test);
      const ClassifyMode mode = cls.mode == "homoscedastic" ? ClassifyMode::homoscedastic
                                                            : ClassifyMode::heteroscedastic;
      double alpha = cls.alpha;
      if (cls.cv) {
        const std::vector<double> grid = default_alpha_grid();
        alpha = cv_alpha(train0, train1, grid, cls.folds, cls.seed, mode);
        std::cout << "cv alpha=" << alpha << "\n";
      }
      const ClassifierModel model =
          fit_classifier(train0, train1, alpha, {cls.priors[0], cls.priors[1]}, mode);
      std::ostringstream os;
      os << "id,label\n";
      for (Index i = 0; i < test.n(); ++i) os << i << ',' << predict(model, test.curve(i)) << '\n';
      if (!test.labels.empty())
        std::cout << "misclassification=" << evaluate_classifier(model, test) << "\n";
      if (!cls.out.empty())
        write_text_file(cls.out, os.str());
      else
        std::cout << os.str();
      if (!cls.model_out.empty())
        write_text_file(cls.model_out, classifier_to_json(model).dump(2) + "\n");
      return 0;
    }

    if (bench_cmd->parsed()) {
      if (bench_experiment == "outliers")
        bench.experiment = Experiment::outliers;
      else if (bench_experiment == "bm-bridge")
        bench.experiment = Experiment::bm_bridge;
      else if (bench_experiment == "scenarios")
        bench.experiment = Experiment::scenarios;
      else
        throw std::invalid_argument("bench: unknown experiment " + bench_experiment);
      bench.cov_mode = cov_mode_from_name(bench_cov);
      if (bench.experiment == Experiment::outliers)
        cmd_outlier_bench(bench);
      else
        cmd_classify_bench(bench);
      std::cout << "wrote " << bench.out_path << "\n";
      return 0;
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const fmd::ParseError& e) {
    std::cerr << "parse failure: " << e.what() << "\n";
    return 3;
  } catch (const fmd::IoError& e) {
    std::cerr << "io failure: " << e.what() << "\n";
    return 5;
  } catch (const fmd::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 4;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "parse failure: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
