#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "lexiboost/data.hpp"

namespace lexiboost {

/// Per-instance training weights: non-negative, summing to 1 within 1e-9.
class WeightDistribution {
public:
  WeightDistribution() = default;
  /// Validates the distribution invariants; throws DataError otherwise.
  explicit WeightDistribution(std::vector<double> weights);

  static WeightDistribution uniform(std::size_t n);
  /// D(i) = 1 / (|C| n_j) for i in class j.
  static WeightDistribution class_balanced(const Dataset& ds);
  /// Divides non-negative raw weights by their sum.
  static WeightDistribution normalized(std::vector<double> raw);

  std::size_t size() const { return weights_.size(); }
  double operator[](std::size_t i) const { return weights_[i]; }
  std::span<const double> values() const { return weights_; }

private:
  std::vector<double> weights_;
};

enum class LearnerKind { Stump, Tree, Knn };

std::string to_string(LearnerKind kind);
LearnerKind learner_kind_from_string(const std::string& name);

struct LearnerConfig {
  LearnerKind kind = LearnerKind::Knn;
  std::size_t k = 5;
  std::size_t max_depth = 3;
};

/// Axis-aligned split: x[feature] <= threshold -> left class, else right.
/// A constant stump has left == right.
struct StumpModel {
  std::size_t feature = 0;
  double threshold = 0.0;
  ClassIndex left = 0;
  ClassIndex right = 0;

  bool operator==(const StumpModel&) const = default;
};

struct TreeNode {
  bool leaf = true;
  std::size_t feature = 0;
  double threshold = 0.0;
  std::size_t left = 0;   ///< child node index when !leaf
  std::size_t right = 0;
  ClassIndex label = 0;   ///< prediction when leaf

  bool operator==(const TreeNode&) const = default;
};

struct TreeModel {
  std::vector<TreeNode> nodes;  ///< nodes[0] is the root
  std::size_t max_depth = 1;

  bool operator==(const TreeModel&) const = default;
};

/// Weighted-vote k nearest neighbours over the positively weighted part of
/// the training sample. `source_index` maps stored points back to training
/// positions so in-sample queries can leave themselves out.
struct KnnModel {
  std::size_t k = 1;
  std::vector<double> features;
  std::vector<ClassIndex> labels;
  std::vector<double> weights;
  std::vector<std::size_t> source_index;

  std::size_t stored() const { return labels.size(); }
  bool operator==(const KnnModel&) const = default;
};

/// A trained weak classifier. Immutable; prediction is reentrant.
class WeakHypothesis {
public:
  using Model = std::variant<StumpModel, TreeModel, KnnModel>;

  WeakHypothesis() = default;
  WeakHypothesis(Model model, std::size_t class_count, std::size_t dimension);

  LearnerKind kind() const;
  const Model& model() const { return model_; }
  std::size_t class_count() const { return class_count_; }
  std::size_t dimension() const { return dimension_; }

  ClassIndex predict_class(std::span<const double> x) const;

  /// Crisp prediction vector: +1 on the predicted class, -1 elsewhere.
  std::vector<double> predict(std::span<const double> x) const;

  /// Predictions for every row of ds. With in_sample set, ds must be the
  /// training set and kNN excludes each query point from its own vote.
  std::vector<ClassIndex> predict_classes(const Dataset& ds, bool in_sample) const;

  bool operator==(const WeakHypothesis&) const = default;

private:
  void check_dimension(std::size_t d) const;

  Model model_;
  std::size_t class_count_ = 0;
  std::size_t dimension_ = 0;
};

/// Minimum D-weighted 0/1 error over (feature, midpoint threshold, class
/// pair), including the constant stump. Zero-weight instances are ignored.
WeakHypothesis train_stump(const Dataset& ds, const WeightDistribution& d);

/// Greedy top-down tree maximising weighted information gain, depth-limited.
WeakHypothesis train_tree(const Dataset& ds, const WeightDistribution& d, std::size_t max_depth);

/// Stores the positively weighted instances; votes are D-weighted.
WeakHypothesis train_knn(const Dataset& ds, const WeightDistribution& d, std::size_t k);

WeakHypothesis train_weak(const Dataset& ds, const WeightDistribution& d, const LearnerConfig& cfg);

/// Sum of D(i) over misclassified instances (in-sample predictions).
double weighted_error(const WeakHypothesis& h, const Dataset& ds, const WeightDistribution& d);
double weighted_error(std::span<const ClassIndex> predictions, const Dataset& ds,
                      const WeightDistribution& d);

} // namespace lexiboost
