#include "lexiboost/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <sstream>

#include "lexiboost/dual_lexiboost.hpp"
#include "lexiboost/error.hpp"
#include "lexiboost/lexiboost.hpp"
#include "lexiboost/lp_variants.hpp"
#include "lexiboost/metrics.hpp"
#include "lexiboost/rng.hpp"

namespace lexiboost {

namespace {

Json number_or_null(double v) { return std::isinf(v) ? Json(nullptr) : Json(v); }

ClassIndex minority_class(const Dataset& ds) {
  ClassIndex best = 0;
  for (ClassIndex j = 1; j < ds.class_count(); ++j)
    if (ds.class_size(j) < ds.class_size(best)) best = j;
  return best;
}

Json rounds_json(const std::vector<BoostRound>& rounds) {
  Json r = Json::array();
  for (const auto& b : rounds) r.push_back({{"error", b.error}, {"alpha", b.alpha}});
  return r;
}

Json stage1_json(const StageOneResult& s) {
  Json j = Json::array();
  for (const auto& c : s.classes) j.push_back({{"class", c.cls}, {"min_avg_loss", c.average}, {"alpha", c.alpha}});
  return j;
}

Json stage2_json(const StageTwoResult& s) {
  return {{"chi", s.chi}, {"achieved_avg_loss", s.achieved}, {"alpha", s.alpha}};
}

Json dual_rounds_json(const std::vector<DualRoundRecord>& rounds) {
  Json r = Json::array();
  for (const auto& x : rounds) r.push_back({{"edge", x.edge}, {"s", x.s}});
  return r;
}

Json distribution_summary(const EmittedDistribution& e) {
  double lo = 1.0, hi = 0.0, h = 0.0;
  for (double w : e.weights) {
    lo = std::min(lo, w);
    hi = std::max(hi, w);
    if (w > 0.0) h -= w * std::log(w);
  }
  return {{"phase", std::string(1, e.phase)}, {"round", e.round}, {"min", lo}, {"max", hi}, {"entropy", h}};
}

AdaBoostResult boost_components(const Dataset& ds, const TrainConfig& cfg) {
  return ds.class_count() == 2 ? run_adaboost(ds, cfg.learner, cfg.rounds)
                               : run_adaboost_multiclass(ds, cfg.learner, cfg.rounds);
}

LpVariantConfig variant_config(const Dataset& ds, const TrainConfig& cfg) {
  LpVariantConfig v;
  v.cost = 1.0 / cfg.nu;
  v.beta = cfg.beta;
  v.lower_divisor = cfg.lower_divisor;
  v.target_class = minority_class(ds);
  v.rounds = cfg.rounds;
  v.learner = cfg.learner;
  v.margin = cfg.margin;
  return v;
}

double mean_cv_gmean(const Dataset& train, const TrainConfig& cfg,
                     const std::vector<std::vector<std::size_t>>& folds) {
  double total = 0.0;
  for (const auto& held : folds) {
    std::vector<bool> out(train.size(), false);
    for (auto i : held) out[i] = true;
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < train.size(); ++i)
      if (!out[i]) keep.push_back(i);
    const auto fit = train.subset(keep);
    const auto val = train.subset(held, /*allow_empty_classes=*/true);
    const auto model = train_model(fit, cfg);
    total += evaluate(model.ensemble, val).g_mean;
  }
  return total / static_cast<double>(folds.size());
}

std::string fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

} // namespace

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::AdaBoost: return "adaboost";
    case Algorithm::LpAdaBoost: return "lpadaboost";
    case Algorithm::LpBoost: return "lpboost";
    case Algorithm::LpuBoost: return "lpuboost";
    case Algorithm::LexiBoost: return "lexiboost";
    case Algorithm::DualLpAdaBoost: return "dual-lpadaboost";
    case Algorithm::DualLpBoost: return "dual-lpboost";
    case Algorithm::DualLpuBoost: return "dual-lpuboost";
    case Algorithm::DualLexiBoost: return "dual-lexiboost";
  }
  return "unknown";
}

const std::vector<Algorithm>& all_algorithms() {
  static const std::vector<Algorithm> all{
      Algorithm::AdaBoost,       Algorithm::LpAdaBoost,  Algorithm::LpBoost,
      Algorithm::LpuBoost,       Algorithm::LexiBoost,   Algorithm::DualLpAdaBoost,
      Algorithm::DualLpBoost,    Algorithm::DualLpuBoost, Algorithm::DualLexiBoost};
  return all;
}

Algorithm algorithm_from_string(const std::string& name) {
  for (auto a : all_algorithms())
    if (to_string(a) == name) return a;
  std::string known;
  for (auto a : all_algorithms()) known += (known.empty() ? "" : ", ") + to_string(a);
  throw UsageError("unknown algorithm '" + name + "' (expected one of: " + known + ")");
}

bool is_cost_tuned(Algorithm a) {
  return a == Algorithm::LpBoost || a == Algorithm::LpuBoost || a == Algorithm::DualLpBoost ||
         a == Algorithm::DualLpuBoost;
}

bool is_two_class_only(Algorithm a) { return a == Algorithm::LpuBoost || a == Algorithm::DualLpuBoost; }

Json TrainConfig::to_json() const {
  Json j;
  j["algorithm"] = to_string(algorithm);
  j["base"] = to_string(learner.kind);
  if (learner.kind == LearnerKind::Knn) j["k"] = learner.k;
  if (learner.kind == LearnerKind::Tree) j["max_depth"] = learner.max_depth;
  j["rounds"] = rounds;
  j["normalize_multiclass_margin"] = margin.normalize_multiclass;
  j["parameters"] = selected_parameters(*this);
  if (algorithm == Algorithm::DualLexiBoost) j["chance_threshold"] = chance_threshold;
  if (!class_costs.empty()) j["class_costs"] = class_costs;
  return j;
}

Json selected_parameters(const TrainConfig& cfg) {
  Json j = Json::object();
  switch (cfg.algorithm) {
    case Algorithm::LpBoost:
    case Algorithm::DualLpBoost:
      j["nu"] = cfg.nu;
      j["D"] = 1.0 / cfg.nu;
      break;
    case Algorithm::LpuBoost:
      j["nu"] = cfg.nu;
      j["D"] = 1.0 / cfg.nu;
      j["beta"] = cfg.beta;
      break;
    case Algorithm::DualLpuBoost:
      j["nu"] = cfg.nu;
      j["D"] = 1.0 / cfg.nu;
      j["beta"] = cfg.beta;
      j["D_LB"] = number_or_null(cfg.lower_divisor);
      break;
    default: break;
  }
  return j;
}

TrainOutcome train_model(const Dataset& ds, const TrainConfig& cfg) {
  if (cfg.rounds < 1) throw UsageError("number of rounds must be at least 1");
  if (is_two_class_only(cfg.algorithm) && ds.class_count() != 2)
    throw UsageError(to_string(cfg.algorithm) + " is a two-class method; the data has " +
                     std::to_string(ds.class_count()) + " classes");
  if (!(cfg.nu > 0.0 && cfg.nu <= 1.0)) throw UsageError("nu must lie in (0, 1]");

  TrainOutcome out;
  Json& d = out.details;
  switch (cfg.algorithm) {
    case Algorithm::AdaBoost: {
      auto b = boost_components(ds, cfg);
      d["boosting_rounds"] = rounds_json(b.rounds);
      if (!b.warnings.empty()) d["warnings"] = b.warnings;
      out.ensemble = make_ensemble(std::move(b.components), std::move(b.alpha), ds);
      break;
    }
    case Algorithm::LpAdaBoost:
    case Algorithm::LpBoost:
    case Algorithm::LpuBoost: {
      auto b = boost_components(ds, cfg);
      d["boosting_rounds"] = rounds_json(b.rounds);
      if (!b.warnings.empty()) d["warnings"] = b.warnings;
      const auto mm = margin_matrix(b.components, ds, true, cfg.margin);
      std::vector<double> alpha;
      if (cfg.algorithm == Algorithm::LpAdaBoost) {
        auto r = lp_adaboost_weights(mm);
        d["rho"] = r.rho;
        alpha = std::move(r.alpha);
      } else {
        auto r = cfg.algorithm == Algorithm::LpBoost
                     ? lp_boost_weights(mm, 1.0 / cfg.nu)
                     : lpu_boost_weights(mm, 1.0 / cfg.nu, cfg.beta, minority_class(ds));
        d["rho"] = r.rho;
        d["objective"] = r.objective;
        double slack = 0.0;
        for (double x : r.xi) slack += x;
        d["slack_total"] = slack;
        alpha = std::move(r.alpha);
      }
      out.ensemble = make_ensemble(std::move(b.components), std::move(alpha), ds);
      break;
    }
    case Algorithm::LexiBoost: {
      auto r = train_lexiboost(ds, cfg.learner, cfg.rounds, cfg.margin, cfg.class_costs);
      d["boosting_rounds"] = rounds_json(r.boosting.rounds);
      d["stage1"] = stage1_json(r.stage1);
      d["stage2"] = stage2_json(r.stage2);
      if (!r.warnings.empty()) d["warnings"] = r.warnings;
      out.ensemble = std::move(r.ensemble);
      break;
    }
    case Algorithm::DualLpAdaBoost:
    case Algorithm::DualLpBoost:
    case Algorithm::DualLpuBoost: {
      const auto v = variant_config(ds, cfg);
      auto r = cfg.algorithm == Algorithm::DualLpAdaBoost ? dual_lp_adaboost_train(ds, v)
               : cfg.algorithm == Algorithm::DualLpBoost  ? dual_lp_boost_train(ds, v)
                                                          : dual_lpu_boost_train(ds, v);
      d["dual_rounds"] = dual_rounds_json(r.rounds);
      if (cfg.algorithm == Algorithm::DualLpAdaBoost) d["rho"] = r.rho;
      if (cfg.algorithm == Algorithm::DualLpuBoost) d["target_class"] = v.target_class;
      if (!r.warnings.empty()) d["warnings"] = r.warnings;
      out.ensemble = std::move(r.ensemble);
      break;
    }
    case Algorithm::DualLexiBoost: {
      DualLexiConfig c{cfg.learner, cfg.rounds, cfg.margin, cfg.chance_threshold};
      auto r = train_dual_lexiboost(ds, c);
      Json rounds = Json::array();
      for (const auto& x : r.rounds) {
        Json e{{"phase", std::string(1, x.phase)}, {"round", x.round}, {"error", x.error}, {"kept", x.kept}};
        if (x.kept) e["s"] = x.s;
        if (!x.d.empty()) e["d"] = x.d;
        rounds.push_back(std::move(e));
      }
      d["rounds"] = std::move(rounds);
      Json dist = Json::array();
      for (const auto& e : r.distributions) dist.push_back(distribution_summary(e));
      d["distributions"] = std::move(dist);
      d["phase_a_components"] = r.phase_a_components;
      d["stage1"] = stage1_json(r.stage1);
      d["stage2"] = stage2_json(r.stage2);
      if (!r.warnings.empty()) d["warnings"] = r.warnings;
      out.ensemble = std::move(r.ensemble);
      break;
    }
  }
  return out;
}

Json CostGrid::to_json() const {
  Json dlb = Json::array();
  for (double v : lower_divisor) dlb.push_back(number_or_null(v));
  return {{"nu", nu}, {"beta", beta}, {"D_LB", dlb}};
}

CostGrid CostGrid::from_json(const Json& j) {
  CostGrid g;
  try {
    if (j.contains("nu")) g.nu = j.at("nu").get<std::vector<double>>();
    if (j.contains("beta")) g.beta = j.at("beta").get<std::vector<double>>();
    if (j.contains("D_LB")) {
      g.lower_divisor.clear();
      for (const auto& v : j.at("D_LB")) g.lower_divisor.push_back(v.is_null() ? lp::kInf : v.get<double>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("bad cost grid: ") + e.what());
  }
  if (g.nu.empty() || g.beta.empty() || g.lower_divisor.empty()) throw UsageError("cost grid lists must be non-empty");
  return g;
}

std::vector<TrainConfig> grid_cells(const TrainConfig& base, const CostGrid& grid) {
  std::vector<TrainConfig> cells;
  const bool use_beta = base.algorithm == Algorithm::LpuBoost || base.algorithm == Algorithm::DualLpuBoost;
  const bool use_dlb = base.algorithm == Algorithm::DualLpuBoost;
  if (!is_cost_tuned(base.algorithm)) return {base};
  for (double nu : grid.nu)
    for (double beta : use_beta ? grid.beta : std::vector<double>{base.beta})
      for (double dlb : use_dlb ? grid.lower_divisor : std::vector<double>{base.lower_divisor}) {
        auto c = base;
        c.nu = nu;
        c.beta = beta;
        c.lower_divisor = dlb;
        cells.push_back(c);
      }
  return cells;
}

TuneResult tune_costs(const Dataset& train, const TrainConfig& base, const CostGrid& grid, std::size_t folds,
                      std::uint64_t seed) {
  if (folds < 2) throw UsageError("cross-validation needs at least 2 folds");
  const auto parts = stratified_folds(train, folds, seed);
  TuneResult res;
  std::optional<std::size_t> best;
  for (auto& cfg : grid_cells(base, grid)) {
    TuneCell cell{cfg, std::nullopt, {}};
    try {
      cell.score = mean_cv_gmean(train, cfg, parts);
    } catch (const Error& e) {
      cell.error = e.what();
    }
    res.cells.push_back(cell);
    const auto idx = res.cells.size() - 1;
    if (cell.score && (!best || *cell.score > *res.cells[*best].score)) best = idx;
  }
  if (!best) throw UsageError("no cost-grid cell could be trained for " + to_string(base.algorithm));
  res.best = res.cells[*best].config;
  return res;
}

Json DatasetCell::to_json() const {
  if (csv) return {{"csv", *csv}};
  return {{"size", size}, {"imbalance_ratio", imbalance_ratio}, {"center", center}, {"outlier_rate", outlier_rate}};
}

std::string DatasetCell::key() const {
  if (csv) return "csv:" + *csv;
  std::ostringstream s;
  s << "n" << size << "-ir" << imbalance_ratio << "-c" << center << "-out" << outlier_rate;
  return s.str();
}

Json BenchConfig::to_json() const {
  Json algs = Json::array();
  for (auto a : algorithms) algs.push_back(to_string(a));
  Json data = Json::array();
  for (const auto& d : datasets) data.push_back(d.to_json());
  Json learner_json{{"kind", to_string(learner.kind)}, {"k", learner.k}, {"max_depth", learner.max_depth}};
  return {{"algorithms", algs},
          {"learner", learner_json},
          {"rounds", rounds},
          {"datasets", data},
          {"seeds", seeds},
          {"train_fraction", train_fraction},
          {"cv_folds", cv_folds},
          {"grid", grid.to_json()},
          {"normalize_multiclass_margin", margin.normalize_multiclass},
          {"chance_threshold", chance_threshold},
          {"csv_header", csv_header}};
}

BenchConfig BenchConfig::from_json(const Json& j) {
  BenchConfig c;
  try {
    if (j.contains("algorithms")) {
      c.algorithms.clear();
      for (const auto& a : j.at("algorithms")) c.algorithms.push_back(algorithm_from_string(a.get<std::string>()));
    }
    if (j.contains("learner")) {
      const auto& l = j.at("learner");
      if (l.contains("kind")) c.learner.kind = learner_kind_from_string(l.at("kind").get<std::string>());
      if (l.contains("k")) c.learner.k = l.at("k").get<std::size_t>();
      if (l.contains("max_depth")) c.learner.max_depth = l.at("max_depth").get<std::size_t>();
    }
    if (j.contains("rounds")) c.rounds = j.at("rounds").get<std::size_t>();
    if (j.contains("datasets")) {
      c.datasets.clear();
      for (const auto& d : j.at("datasets")) {
        DatasetCell cell;
        if (d.contains("csv")) cell.csv = d.at("csv").get<std::string>();
        if (d.contains("size")) cell.size = d.at("size").get<std::size_t>();
        if (d.contains("imbalance_ratio")) cell.imbalance_ratio = d.at("imbalance_ratio").get<double>();
        if (d.contains("center")) cell.center = d.at("center").get<double>();
        if (d.contains("outlier_rate")) cell.outlier_rate = d.at("outlier_rate").get<double>();
        c.datasets.push_back(cell);
      }
    }
    if (j.contains("seeds")) c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (j.contains("train_fraction")) c.train_fraction = j.at("train_fraction").get<double>();
    if (j.contains("cv_folds")) c.cv_folds = j.at("cv_folds").get<std::size_t>();
    if (j.contains("grid")) c.grid = CostGrid::from_json(j.at("grid"));
    if (j.contains("normalize_multiclass_margin"))
      c.margin.normalize_multiclass = j.at("normalize_multiclass_margin").get<bool>();
    if (j.contains("chance_threshold")) c.chance_threshold = j.at("chance_threshold").get<bool>();
    if (j.contains("csv_header")) c.csv_header = j.at("csv_header").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("bad bench config: ") + e.what());
  }
  if (c.algorithms.empty() || c.datasets.empty() || c.seeds.empty())
    throw UsageError("bench config needs at least one algorithm, dataset and seed");
  if (!(c.train_fraction > 0.0 && c.train_fraction < 1.0)) throw UsageError("train_fraction must lie in (0, 1)");
  return c;
}

std::vector<BenchRow> run_bench(const BenchConfig& cfg) {
  struct Task {
    std::size_t dataset, algorithm, seed;
  };
  std::vector<Task> tasks;
  for (std::size_t d = 0; d < cfg.datasets.size(); ++d)
    for (std::size_t a = 0; a < cfg.algorithms.size(); ++a)
      for (std::size_t s = 0; s < cfg.seeds.size(); ++s) tasks.push_back({d, a, s});

  std::vector<BenchRow> rows(tasks.size());
  const auto count = static_cast<std::int64_t>(tasks.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t t = 0; t < count; ++t) {
    const auto& task = tasks[static_cast<std::size_t>(t)];
    const auto& cell = cfg.datasets[task.dataset];
    const auto algo = cfg.algorithms[task.algorithm];
    const auto seed = cfg.seeds[task.seed];
    BenchRow& row = rows[static_cast<std::size_t>(t)];
    row.index = static_cast<std::size_t>(t);
    row.dataset = cell.key();
    row.dataset_spec = cell.to_json();
    row.algorithm = to_string(algo);
    row.seed = seed;
    try {
      Dataset ds;
      if (cell.csv) {
        ds = load_csv(*cell.csv, cfg.csv_header);
      } else {
        SyntheticSpec spec;
        spec.total_size = cell.size;
        spec.imbalance_ratio = cell.imbalance_ratio;
        spec.majority_center = cell.center;
        spec.outlier_rate = cell.outlier_rate;
        spec.seed = seed;
        ds = generate_gaussian(spec);
      }
      const auto [train, test] = stratified_split(ds, cfg.train_fraction, derive_seed(seed, 0x5eed));
      TrainConfig tc;
      tc.algorithm = algo;
      tc.learner = cfg.learner;
      tc.rounds = cfg.rounds;
      tc.margin = cfg.margin;
      tc.chance_threshold = cfg.chance_threshold;
      const auto start = std::chrono::steady_clock::now();
      if (is_cost_tuned(algo)) {
        const auto tuned = tune_costs(train, tc, cfg.grid, cfg.cv_folds, derive_seed(seed, 0xcf));
        tc = tuned.best;
        for (const auto& c : tuned.cells)
          if (selected_parameters(c.config) == selected_parameters(tc)) row.selected["cv_g_mean"] = *c.score;
      }
      const auto model = train_model(train, tc);
      row.train_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      auto params = selected_parameters(tc);
      for (auto it = params.begin(); it != params.end(); ++it) row.selected[it.key()] = it.value();
      row.components = model.ensemble.components.size();
      row.report = evaluate(model.ensemble, test);
      row.ok = true;
    } catch (const std::exception& e) {
      row.ok = false;
      row.error = e.what();
    }
  }
  return rows;
}

std::string config_hash(const Json& j) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : j.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Json bench_to_json(const BenchConfig& cfg, const std::vector<BenchRow>& rows) {
  const auto config = cfg.to_json();
  const auto hash = config_hash(config);
  Json out;
  out["schema"] = "lexiboost-results/v1";
  out["config_hash"] = hash;
  out["config"] = config;
  Json arr = Json::array();
  for (const auto& r : rows) {
    Json j;
    j["index"] = r.index;
    j["config_hash"] = hash;
    j["dataset"] = r.dataset;
    j["dataset_spec"] = r.dataset_spec;
    j["algorithm"] = r.algorithm;
    j["seed"] = r.seed;
    j["status"] = r.ok ? "ok" : "error";
    if (!r.ok) j["error"] = r.error;
    j["selected"] = r.selected.is_null() ? Json::object() : r.selected;
    if (r.report) {
      j["components"] = r.components;
      j["metrics"] = report_to_json(*r.report);
    }
    j["timing"] = {{"train_seconds", r.train_seconds}};
    arr.push_back(std::move(j));
  }
  out["rows"] = std::move(arr);
  return out;
}

std::string bench_to_csv(const std::vector<BenchRow>& rows) {
  std::ostringstream s;
  s << "index,dataset,algorithm,seed,status,g_mean,auc,avg_auc,accuracy,selected,train_seconds\n";
  for (const auto& r : rows) {
    std::string sel;
    if (r.selected.is_object())
      for (auto it = r.selected.begin(); it != r.selected.end(); ++it) {
        if (it.key() == "cv_g_mean") continue;
        sel += (sel.empty() ? "" : ";") + it.key() + "=" + it.value().dump();
      }
    s << r.index << ',' << r.dataset << ',' << r.algorithm << ',' << r.seed << ',' << (r.ok ? "ok" : "error") << ',';
    if (r.report) {
      s << fixed(r.report->g_mean) << ',' << (r.report->auc ? fixed(*r.report->auc) : "") << ','
        << (r.report->avg_auc ? fixed(*r.report->avg_auc) : "") << ',' << fixed(r.report->accuracy);
    } else {
      s << ",,,";
    }
    s << ',' << sel << ',' << fixed(r.train_seconds) << '\n';
  }
  return s.str();
}

} // namespace lexiboost
