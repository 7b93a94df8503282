#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "lexiboost/data.hpp"
#include "lexiboost/weak.hpp"

namespace lexiboost {

struct MarginOptions {
  /// Scale multi-class agreements y^T f by 1/|C| so a correct crisp vote
  /// scores exactly +1 for every class count. Off gives the raw y^T f.
  bool normalize_multiclass = true;
};

/// Signed agreement of one prediction vector with class `label`.
/// Two classes: y * f[1] with y = +1 for class 1, -1 for class 0.
/// More classes: y^T f (divided by |C| when normalising), where y has +1 on
/// the true class and -1 elsewhere.
double margin_entry(std::span<const double> prediction, ClassIndex label,
                    const MarginOptions& opts = {});

/// m[i][t]: agreement of component t with instance i. Row-major.
class MarginMatrix {
public:
  MarginMatrix() = default;
  MarginMatrix(std::size_t rows, std::size_t cols, std::vector<double> values,
               std::vector<ClassIndex> class_of, std::size_t class_count);

  std::size_t rows() const { return class_of_.size(); }
  std::size_t cols() const { return cols_; }
  std::size_t class_count() const { return class_count_; }

  double operator()(std::size_t i, std::size_t t) const { return values_[i * cols_ + t]; }
  std::span<const double> row(std::size_t i) const { return {values_.data() + i * cols_, cols_}; }
  const std::vector<double>& values() const { return values_; }
  ClassIndex class_of(std::size_t i) const { return class_of_[i]; }
  const std::vector<ClassIndex>& classes() const { return class_of_; }

  /// Row positions belonging to class j, ascending.
  std::vector<std::size_t> class_rows(ClassIndex j) const;
  std::vector<std::size_t> class_sizes() const;

  /// Copy with one extra column appended.
  MarginMatrix with_column(std::span<const double> column) const;

private:
  std::size_t cols_ = 0;
  std::size_t class_count_ = 0;
  std::vector<double> values_;
  std::vector<ClassIndex> class_of_;
};

/// Margin column of one component from its crisp predicted classes.
std::vector<double> margin_column(std::span<const ClassIndex> predicted, const Dataset& ds,
                                  const MarginOptions& opts = {});

/// Builds m for all components on ds. With in_sample set, ds is the training
/// set and kNN components predict leave-one-out. Rows are filled in parallel.
MarginMatrix margin_matrix(std::span<const WeakHypothesis> components, const Dataset& ds,
                           bool in_sample = true, const MarginOptions& opts = {});
/// Single-threaded reference with identical arithmetic.
MarginMatrix margin_matrix_serial(std::span<const WeakHypothesis> components, const Dataset& ds,
                                  bool in_sample = true, const MarginOptions& opts = {});

/// rho = sum_t alpha_t m_t.
double margin(std::span<const double> alpha, std::span<const double> margin_row);
/// Margins of every row of mm under alpha.
std::vector<double> margins(const MarginMatrix& mm, std::span<const double> alpha);

/// 0 if rho >= 1, else 1 - rho.
double hinge_loss(double rho);

/// Component classifiers with convex weights.
struct Ensemble {
  std::vector<WeakHypothesis> components;
  std::vector<double> alpha;
  std::size_t class_count = 0;
  std::vector<std::string> class_names;

  /// alpha >= 0, sum alpha = 1 within 1e-7, sizes consistent.
  void validate() const;

  /// s_j = sum_t alpha_t f_{t,j}(x).
  std::vector<double> scores(std::span<const double> x) const;
  /// argmax_j s_j; ties go to the lower class index.
  ClassIndex predict(std::span<const double> x) const;

  /// Scores for every row of ds (row-major, |C| per row), out-of-sample.
  std::vector<double> scores(const Dataset& ds) const;
  std::vector<ClassIndex> predict(const Dataset& ds) const;

  bool operator==(const Ensemble&) const = default;
};

/// Builds an ensemble, projecting non-negative weights onto the simplex by
/// rescaling. All-zero weights fall back to uniform.
Ensemble make_ensemble(std::vector<WeakHypothesis> components, std::vector<double> weights,
                       const Dataset& ds);

struct BoostRound {
  double error = 0.0;
  double alpha = 0.0;
};

struct AdaBoostResult {
  std::vector<WeakHypothesis> components;
  std::vector<double> alpha;  ///< AdaBoost's own (unnormalised) weights
  std::vector<BoostRound> rounds;
  std::vector<std::string> warnings;
};

/// Weight cap used when a component makes no weighted errors.
inline constexpr double kPerfectAlphaCap = 6.907755278982137;  // ln(1e6) / 2

/// Classical two-class AdaBoost: alpha_t = 0.5 ln((1 - e_t) / e_t), weights
/// multiplied by exp(-alpha_t y h) and renormalised. Stops on e_t >= 0.5
/// (keeping a lone first component with a warning) or e_t = 0.
AdaBoostResult run_adaboost(const Dataset& ds, const LearnerConfig& learner, std::size_t rounds);

/// Multi-class weighted-error boosting: alpha_t = ln((1 - e_t) / e_t) +
/// ln(|C| - 1), misclassified weights multiplied by exp(alpha_t). Stops on
/// e_t >= 1 - 1/|C|.
AdaBoostResult run_adaboost_multiclass(const Dataset& ds, const LearnerConfig& learner,
                                       std::size_t rounds);

} // namespace lexiboost
