#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "lexiboost/ensemble.hpp"

namespace lexiboost {

/// Minimum average hinge loss of one class over simplex component weights.
struct ClassStageOne {
  ClassIndex cls = 0;
  std::vector<double> alpha;
  std::vector<std::size_t> rows;  ///< margin-matrix rows of the class
  std::vector<double> losses;     ///< lambda*_i, aligned with rows
  double average = 0.0;           ///< L*_j
};

struct StageOneResult {
  std::vector<ClassStageOne> classes;

  /// L*_j for every class.
  std::vector<double> references() const;
};

struct StageTwoResult {
  std::vector<double> alpha;
  std::vector<double> losses;     ///< lambda_i for every row
  double chi = 0.0;
  std::vector<double> achieved;   ///< average hinge loss per class under alpha
};

/// min (1/n_j) sum lambda_i over the rows of class j subject to
/// 1 - rho_i <= lambda_i, lambda >= 0, alpha on the simplex.
ClassStageOne solve_stage1(const MarginMatrix& mm, ClassIndex j);

/// Every class, solved concurrently.
StageOneResult solve_stage1_all(const MarginMatrix& mm);

/// min chi s.t. (c_j/n_j) sum_{i in j} lambda_i - c_j L*_j <= chi for all j,
/// 1 - rho_i <= lambda_i, lambda >= 0, chi >= 0, alpha on the simplex.
/// Empty costs means c_j = 1. Returned losses are the hinge losses under
/// the returned alpha.
StageTwoResult solve_stage2(const MarginMatrix& mm, std::span<const double> references,
                            std::span<const double> costs = {});
StageTwoResult solve_stage2(const MarginMatrix& mm, const StageOneResult& stage1,
                            std::span<const double> costs = {});

struct LexiBoostResult {
  Ensemble ensemble;
  AdaBoostResult boosting;
  StageOneResult stage1;
  StageTwoResult stage2;
  std::vector<std::string> warnings;
};

/// AdaBoost components (multi-class variant above two classes), then the
/// per-class LPs and the balancing LP on their training margins.
LexiBoostResult train_lexiboost(const Dataset& ds, const LearnerConfig& learner, std::size_t rounds,
                                const MarginOptions& margin = {}, std::span<const double> costs = {});

} // namespace lexiboost
