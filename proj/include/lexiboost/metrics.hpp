#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lexiboost/data.hpp"
#include "lexiboost/ensemble.hpp"

namespace lexiboost {

/// counts[true][predicted].
using ConfusionMatrix = std::vector<std::vector<std::size_t>>;

ConfusionMatrix confusion_matrix(std::span<const ClassIndex> truth, std::span<const ClassIndex> predicted,
                                 std::size_t class_count);

/// Per-class recall; classes without test instances get no entry in the
/// returned `present` mask and a recall of 0.
struct Recalls {
  std::vector<double> recall;
  std::vector<bool> present;
};
Recalls class_recalls(const ConfusionMatrix& cm);

/// (prod recall_j)^(1/|C|).
double g_mean(std::span<const double> recalls);

/// Mann-Whitney AUC of `scores` for positive_class vs every other label,
/// ties counted one half. Throws DataError when either side is empty.
double auc_binary(std::span<const double> scores, std::span<const ClassIndex> labels,
                  ClassIndex positive_class = 1);

/// Hand-and-Till average of pairwise AUCs. scores is row-major with
/// class_count entries per instance. Every class must be present.
double avg_auc(std::span<const double> scores, std::span<const ClassIndex> labels, std::size_t class_count);

struct EvaluationReport {
  ConfusionMatrix confusion;
  std::vector<double> recalls;
  double g_mean = 0.0;
  double accuracy = 0.0;
  std::optional<double> auc;      ///< two-class only
  std::optional<double> avg_auc;
  std::size_t n_test = 0;
  std::vector<std::string> warnings;
};

/// Scores are row-major (class_count per instance); predictions take the
/// first maximal score.
EvaluationReport evaluate_scores(std::span<const double> scores, std::span<const ClassIndex> labels,
                                 std::size_t class_count);

EvaluationReport evaluate(const Ensemble& ens, const Dataset& test);

} // namespace lexiboost
