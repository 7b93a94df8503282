#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "lexiboost/ensemble.hpp"
#include "lexiboost/lp.hpp"

namespace lexiboost {

/// Settings shared by the margin-LP comparators.
///
/// Slack costs are per instance: an instance of the non-target class pays
/// cost / n per unit of slack, a target instance beta * cost / n. With
/// cost = 1/nu this is the usual nu-soft-margin scaling. The dual loops use
/// the same numbers as upper bounds on D(i), and upper / lower_divisor as
/// lower bounds.
struct LpVariantConfig {
  double cost = 10.0;
  double beta = 1.0;
  double lower_divisor = lp::kInf;  ///< infinity: no lower bound
  ClassIndex target_class = 0;
  std::size_t rounds = 10;
  double tolerance = 1e-9;          ///< column-generation stopping slack
  LearnerConfig learner;
  MarginOptions margin;

  void validate() const;
};

struct HardMarginResult {
  std::vector<double> alpha;
  double rho = 0.0;
};

/// max rho s.t. sum_t alpha_t m[i][t] >= rho for all i, alpha on the simplex.
HardMarginResult lp_adaboost_weights(const MarginMatrix& mm);

struct SoftMarginResult {
  std::vector<double> alpha;
  std::vector<double> xi;
  double rho = 0.0;
  double objective = 0.0;
};

/// min -rho + (cost / n) sum_i xi_i s.t. margin_i >= rho - xi_i, alpha on the
/// simplex, xi >= 0. rho is kept in [-1, 1], which only matters when the
/// slack cost is too small for the problem to be bounded.
SoftMarginResult lp_boost_weights(const MarginMatrix& mm, double cost);

/// As lp_boost_weights with target-class slacks priced at beta * cost / n.
/// Two-class margin matrices only.
SoftMarginResult lpu_boost_weights(const MarginMatrix& mm, double cost, double beta,
                                   ClassIndex target_class);

/// Per-instance bounds on D(i) used by the dual loops.
struct WeightBounds {
  std::vector<double> lower;
  std::vector<double> upper;
};

/// Upper bound cost/n (beta*cost/n on the target class), lower bound
/// upper / lower_divisor. Throws UsageError naming (D, beta, D_LB) when no
/// distribution fits between them.
WeightBounds dual_weight_bounds(std::span<const ClassIndex> class_of, double cost, double beta,
                                double lower_divisor, ClassIndex target_class);

struct DualSolution {
  std::vector<double> weights;  ///< D_{t+1}
  double s = 0.0;
  std::vector<double> alpha;    ///< multipliers of the margin rows, on the simplex
};

/// min s s.t. sum_i D(i) m[i][tau] <= s for every column, sum D = 1,
/// lower <= D <= upper. Empty bound spans mean [0, inf).
DualSolution solve_dual_weights(const MarginMatrix& mm, std::span<const double> lower = {},
                                std::span<const double> upper = {});

struct DualRoundRecord {
  double edge = 0.0;            ///< sum_i D_t(i) m[i][t] of the new component
  double s = 0.0;               ///< optimum of the round's dual LP
  std::vector<double> weights;  ///< D_{t+1}
};

struct DualTrainResult {
  Ensemble ensemble;
  std::vector<DualRoundRecord> rounds;
  std::vector<std::string> warnings;
  double rho = 0.0;             ///< final hard margin (Dual-LPAdaBoost only)
};

/// Column generation on the hard-margin dual. A round stops the loop when
/// the new component's edge under D_t does not exceed the current margin.
/// Final weights come from a hard-margin solve on all kept components.
DualTrainResult dual_lp_adaboost_train(const Dataset& ds, const LpVariantConfig& cfg);

/// Column generation on the bounded dual; the final component weights are
/// the multipliers of the last round's margin rows.
DualTrainResult dual_lpu_boost_train(const Dataset& ds, const LpVariantConfig& cfg);

/// dual_lpu_boost_train with beta = 1 and no lower bound; any class count.
DualTrainResult dual_lp_boost_train(const Dataset& ds, const LpVariantConfig& cfg);

} // namespace lexiboost
