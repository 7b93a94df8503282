#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "lexiboost/ensemble.hpp"
#include "lexiboost/lexiboost.hpp"

namespace lexiboost {

struct PPrimeSolution {
  std::vector<double> weights;  ///< D over every instance
  double s = 0.0;
  double objective = 0.0;
};

/// max sum_{i in c_j} D(i) - s s.t. sum_i D(i) m[i][tau] <= s for every
/// column, sum D = 1, 0 <= D(i) <= 1/n_{class(i)}.
PPrimeSolution solve_pprime(const MarginMatrix& mm, ClassIndex j);

struct QPrimeSolution {
  std::vector<double> weights;
  std::vector<double> d;        ///< per-class scale, sum <= 1
  double s = 0.0;
  double objective = 0.0;
};

/// max sum D - sum_j d_j L*_j - s s.t. the margin rows, sum D = 1,
/// 0 <= D(i) <= d_j / n_j, sum d <= 1, d >= 0. references holds L*_j.
QPrimeSolution solve_qprime(const MarginMatrix& mm, std::span<const double> references);

/// Combines per-class solutions into one distribution: entries of class j
/// come from candidates[j]. A total above one is divided out; a total below
/// one is raised by water-filling against the caps 1/n_j, so every entry
/// stays within its bound.
std::vector<double> assemble_class_weights(const std::vector<std::vector<double>>& candidates,
                                           std::span<const ClassIndex> class_of);

struct DualLexiConfig {
  LearnerConfig learner;
  std::size_t rounds = 10;
  MarginOptions margin;
  /// Break on error above 1 - 1/|C| instead of 1/|C|.
  bool chance_threshold = false;

  double error_threshold(std::size_t class_count) const;
};

/// One instance-weight distribution produced during training, together
/// with the per-instance upper bounds it must respect.
struct EmittedDistribution {
  char phase = 'A';             ///< 'A': per-class duals, 'C': balancing dual
  std::size_t round = 0;        ///< 0 for the initial distribution
  std::vector<double> weights;
  std::vector<double> upper;
};

struct DualLexiRound {
  char phase = 'A';
  std::size_t round = 0;
  double error = 0.0;
  bool kept = false;
  double s = 0.0;               ///< Phase A: mean over the class LPs
  std::vector<double> d;        ///< Phase C only
};

struct DualLexiResult {
  Ensemble ensemble;
  std::vector<DualLexiRound> rounds;
  std::vector<EmittedDistribution> distributions;
  StageOneResult stage1;        ///< on Phase-A components
  StageTwoResult stage2;        ///< on Phase-C components
  std::size_t phase_a_components = 0;
  std::vector<std::string> warnings;
};

DualLexiResult train_dual_lexiboost(const Dataset& ds, const DualLexiConfig& cfg);

} // namespace lexiboost
