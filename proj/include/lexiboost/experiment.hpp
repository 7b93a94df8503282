#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lexiboost/data.hpp"
#include "lexiboost/ensemble.hpp"
#include "lexiboost/lp.hpp"
#include "lexiboost/serialize.hpp"

namespace lexiboost {

enum class Algorithm {
  AdaBoost,
  LpAdaBoost,
  LpBoost,
  LpuBoost,
  LexiBoost,
  DualLpAdaBoost,
  DualLpBoost,
  DualLpuBoost,
  DualLexiBoost,
};

std::string to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& name);
const std::vector<Algorithm>& all_algorithms();

/// Comparators whose slack costs are picked from a grid.
bool is_cost_tuned(Algorithm a);
bool is_two_class_only(Algorithm a);

struct TrainConfig {
  Algorithm algorithm = Algorithm::LexiBoost;
  LearnerConfig learner;
  std::size_t rounds = 10;
  MarginOptions margin;
  double nu = 0.1;                     ///< slack cost D = 1/nu
  double beta = 2.0;
  double lower_divisor = lp::kInf;
  bool chance_threshold = false;
  std::vector<double> class_costs;     ///< LexiBoost stage-2 costs, empty = 1

  Json to_json() const;
};

struct TrainOutcome {
  Ensemble ensemble;
  Json details;                         ///< deterministic per-algorithm report
};

/// Trains one model. Throws UsageError for invalid algorithm/data pairings.
TrainOutcome train_model(const Dataset& ds, const TrainConfig& cfg);

/// Cost grid searched for the tuned comparators.
struct CostGrid {
  std::vector<double> nu{0.1, 0.2};
  std::vector<double> beta{2.0, 4.0, 8.0};
  std::vector<double> lower_divisor{25.0, 50.0, 100.0};

  Json to_json() const;
  static CostGrid from_json(const Json& j);
};

struct TuneCell {
  TrainConfig config;
  std::optional<double> score;          ///< mean CV G-Mean; empty when the cell failed
  std::string error;
};

struct TuneResult {
  TrainConfig best;
  std::vector<TuneCell> cells;
};

/// Grid cells that apply to cfg.algorithm (nu; nu x beta; nu x beta x D_LB).
std::vector<TrainConfig> grid_cells(const TrainConfig& base, const CostGrid& grid);

/// Stratified k-fold CV on `train`, selecting the first cell with the
/// highest mean G-Mean.
TuneResult tune_costs(const Dataset& train, const TrainConfig& base, const CostGrid& grid,
                      std::size_t folds, std::uint64_t seed);

/// Selected hyperparameters of a config (only the ones its algorithm uses).
Json selected_parameters(const TrainConfig& cfg);

struct DatasetCell {
  std::optional<std::string> csv;       ///< set for CSV-backed cells
  std::size_t size = 500;
  double imbalance_ratio = 10.0;
  double center = 1.7;
  double outlier_rate = 0.0;

  Json to_json() const;
  std::string key() const;
};

struct BenchConfig {
  std::vector<Algorithm> algorithms{Algorithm::AdaBoost, Algorithm::LexiBoost, Algorithm::DualLexiBoost};
  LearnerConfig learner;
  std::size_t rounds = 10;
  std::vector<DatasetCell> datasets{DatasetCell{}};
  std::vector<std::uint64_t> seeds{1};
  double train_fraction = 0.8;
  std::size_t cv_folds = 3;
  CostGrid grid;
  MarginOptions margin;
  bool chance_threshold = false;
  bool csv_header = true;

  Json to_json() const;
  static BenchConfig from_json(const Json& j);
};

struct BenchRow {
  std::size_t index = 0;
  std::string dataset;
  Json dataset_spec;
  std::string algorithm;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  Json selected;
  std::optional<EvaluationReport> report;
  std::size_t components = 0;
  double train_seconds = 0.0;
};

/// Every (dataset cell, algorithm, seed) triple, run in parallel; rows come
/// back ordered by that key. Failures are recorded per row.
std::vector<BenchRow> run_bench(const BenchConfig& cfg);

/// 16 hex digits of FNV-1a over the compact JSON text.
std::string config_hash(const Json& j);

Json bench_to_json(const BenchConfig& cfg, const std::vector<BenchRow>& rows);
std::string bench_to_csv(const std::vector<BenchRow>& rows);

} // namespace lexiboost
