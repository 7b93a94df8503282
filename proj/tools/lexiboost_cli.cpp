#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lexiboost/data.hpp"
#include "lexiboost/error.hpp"
#include "lexiboost/experiment.hpp"
#include "lexiboost/metrics.hpp"
#include "lexiboost/serialize.hpp"

using namespace lexiboost;

namespace {

struct GenArgs {
  std::size_t size = 500;
  double ir = 10.0;
  double center = 1.7;
  std::uint64_t seed = 1;
  double outlier_rate = 0.0;
  std::size_t dimension = 5;
  std::vector<std::size_t> sizes;
  std::vector<double> centers;
  std::string out;
};

struct TrainArgs {
  std::string data;
  bool no_header = false;
  std::string algo = "lexiboost";
  std::string base = "knn";
  std::size_t k = 5;
  std::size_t depth = 3;
  std::size_t rounds = 10;
  double nu = 0.1;
  double beta = 2.0;
  double dlb = 0.0;  // 0: no lower bound
  std::vector<double> costs;
  bool tune = false;
  std::size_t folds = 3;
  std::uint64_t seed = 1;
  bool chance_threshold = false;
  bool raw_margin = false;
  std::string model;
  std::string report;
};

struct EvalArgs {
  std::string model;
  std::string data;
  bool no_header = false;
  std::string out;
};

struct BenchArgs {
  std::string config;
  std::string out;
  std::string csv;
};

void write_text(const std::string& text, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write " + path);
  f << text;
  if (!f) throw DataError("failed writing " + path);
}

void emit(const Json& j, const std::string& path) {
  if (path.empty() || path == "-")
    std::cout << dump(j);
  else
    write_json(j, path);
}

void cmd_gen(const GenArgs& a) {
  Dataset ds;
  if (!a.sizes.empty()) {
    if (a.sizes.size() < 2) throw UsageError("--sizes needs at least two class sizes");
    if (a.outlier_rate > 0.0) throw UsageError("--outlier-rate applies to two-class data only");
    auto centers = a.centers;
    if (centers.empty())
      for (std::size_t j = 0; j < a.sizes.size(); ++j) centers.push_back(a.center * static_cast<double>(j));
    if (centers.size() != a.sizes.size()) throw UsageError("--centers must list one value per class");
    ds = generate_gaussian_classes(a.sizes, centers, a.dimension, a.seed);
  } else {
    if (!(a.ir > 1.0)) throw UsageError("--ir must be greater than 1");
    if (!(a.outlier_rate >= 0.0 && a.outlier_rate < 0.5)) throw UsageError("--outlier-rate must lie in [0, 0.5)");
    SyntheticSpec spec;
    spec.total_size = a.size;
    spec.imbalance_ratio = a.ir;
    spec.majority_center = a.center;
    spec.outlier_rate = a.outlier_rate;
    spec.seed = a.seed;
    spec.dimension = a.dimension;
    ds = generate_gaussian(spec);
  }
  write_csv(ds, a.out);
  write_json(source_to_json(*ds.source(), ds.class_sizes()), a.out + ".json");
  std::cerr << "wrote " << ds.size() << " rows to " << a.out << "\n";
}

TrainConfig train_config(const TrainArgs& a) {
  TrainConfig cfg;
  cfg.algorithm = algorithm_from_string(a.algo);
  cfg.learner.kind = learner_kind_from_string(a.base);
  cfg.learner.k = a.k;
  cfg.learner.max_depth = a.depth;
  cfg.rounds = a.rounds;
  cfg.margin.normalize_multiclass = !a.raw_margin;
  cfg.nu = a.nu;
  cfg.beta = a.beta;
  cfg.lower_divisor = a.dlb > 0.0 ? a.dlb : lp::kInf;
  cfg.chance_threshold = a.chance_threshold;
  cfg.class_costs = a.costs;
  return cfg;
}

void cmd_train(const TrainArgs& a) {
  auto cfg = train_config(a);
  const auto ds = load_csv(a.data, !a.no_header);
  if (is_two_class_only(cfg.algorithm) && ds.class_count() != 2)
    throw UsageError(to_string(cfg.algorithm) + " is a two-class method; " + a.data + " has " +
                     std::to_string(ds.class_count()) + " classes");
  if (!cfg.class_costs.empty() && cfg.class_costs.size() != ds.class_count())
    throw UsageError("--costs must list one value per class");

  Json report;
  const auto start = std::chrono::steady_clock::now();
  if (a.tune && is_cost_tuned(cfg.algorithm)) {
    const auto tuned = tune_costs(ds, cfg, CostGrid{}, a.folds, a.seed);
    Json cells = Json::array();
    for (const auto& c : tuned.cells) {
      Json cell{{"parameters", selected_parameters(c.config)}};
      if (c.score)
        cell["cv_g_mean"] = *c.score;
      else
        cell["error"] = c.error;
      cells.push_back(std::move(cell));
    }
    report["tuning"] = {{"folds", a.folds}, {"seed", a.seed}, {"cells", cells}};
    cfg = tuned.best;
  }
  const auto outcome = train_model(ds, cfg);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  report["config"] = cfg.to_json();
  report["data"] = {{"path", a.data}, {"rows", ds.size()}, {"class_sizes", ds.class_sizes()},
                    {"class_names", ds.class_names()}};
  report["alpha"] = outcome.ensemble.alpha;
  report["components"] = outcome.ensemble.components.size();
  report["training"] = outcome.details;
  report["train_metrics"] = report_to_json(evaluate(outcome.ensemble, ds));
  report["timing"] = {{"train_seconds", seconds}};

  if (!a.model.empty()) save_model(outcome.ensemble, a.model);
  emit(report, a.report);
}

void cmd_eval(const EvalArgs& a) {
  const auto model = load_model(a.model);
  const auto ds = load_csv_with_classes(a.data, !a.no_header, model.class_names);
  if (ds.dimension() != model.components.front().dimension())
    throw DataError("feature count of " + a.data + " does not match the model");
  emit(report_to_json(evaluate(model, ds)), a.out);
}

void cmd_bench(const BenchArgs& a) {
  const auto cfg = BenchConfig::from_json(read_json(a.config));
  const auto rows = run_bench(cfg);
  emit(bench_to_json(cfg, rows), a.out);
  if (!a.csv.empty()) write_text(bench_to_csv(rows), a.csv);
  std::size_t failed = 0;
  for (const auto& r : rows) failed += r.ok ? 0 : 1;
  if (failed > 0) std::cerr << failed << " of " << rows.size() << " bench rows failed\n";
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boosting with lexicographic component weights"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "generate a synthetic Gaussian dataset");
  g->add_option("--size", gen.size, "total rows (two-class)");
  g->add_option("--ir", gen.ir, "imbalance ratio, > 1");
  g->add_option("--center", gen.center, "majority centre coordinate");
  g->add_option("--seed", gen.seed);
  g->add_option("--outlier-rate", gen.outlier_rate, "fraction of each class resampled from the other class");
  g->add_option("--dimension", gen.dimension);
  g->add_option("--sizes", gen.sizes, "per-class sizes for a multi-class set")->delimiter(',');
  g->add_option("--centers", gen.centers, "per-class centres with --sizes (default j * center)")->delimiter(',');
  g->add_option("--out", gen.out, "CSV path; metadata goes to <out>.json")->required();

  TrainArgs train;
  auto* t = app.add_subcommand("train", "fit an ensemble");
  t->add_option("--data", train.data, "training CSV")->required();
  t->add_flag("--no-header", train.no_header);
  t->add_option("--algo", train.algo, "algorithm id");
  t->add_option("--base", train.base, "stump | tree | knn");
  t->add_option("--k", train.k);
  t->add_option("--depth", train.depth);
  t->add_option("--T", train.rounds, "boosting rounds");
  t->add_option("--nu", train.nu);
  t->add_option("--beta", train.beta);
  t->add_option("--dlb", train.dlb, "D_LB divisor; 0 for none");
  t->add_option("--costs", train.costs, "per-class stage-2 costs")->delimiter(',');
  t->add_flag("--tune", train.tune, "cross-validate the cost grid first");
  t->add_option("--folds", train.folds);
  t->add_option("--seed", train.seed, "seed for tuning folds");
  t->add_flag("--chance-threshold", train.chance_threshold);
  t->add_flag("--raw-multiclass-margin", train.raw_margin);
  t->add_option("--model", train.model, "model JSON output");
  t->add_option("--report", train.report, "report JSON output (default stdout)");

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "score a model on a CSV");
  e->add_option("--model", ev.model)->required();
  e->add_option("--data", ev.data)->required();
  e->add_flag("--no-header", ev.no_header);
  e->add_option("--out", ev.out, "report JSON output (default stdout)");

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "run an experiment grid");
  b->add_option("--config", bench.config, "grid config JSON")->required();
  b->add_option("--out", bench.out, "results JSON (default stdout)");
  b->add_option("--csv", bench.csv, "results table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*g) cmd_gen(gen);
    if (*t) cmd_train(train);
    if (*e) cmd_eval(ev);
    if (*b) cmd_bench(bench);
  } catch (const UsageError& err) {
    std::cerr << "usage error: " << err.what() << "\n";
    return 1;
  } catch (const SolverError& err) {
    std::cerr << "solver error: " << err.what() << "\n";
    return 3;
  } catch (const DataError& err) {
    std::cerr << "data error: " << err.what() << "\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  }
  return 0;
}
