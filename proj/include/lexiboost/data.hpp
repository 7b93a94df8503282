#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace lexiboost {

using ClassIndex = std::size_t;

/// Parameters of the two-class imbalanced Gaussian generator. The minority
/// class (class 0) is centred at the origin, the majority class (class 1) at
/// majority_center * (1, ..., 1); both have identity covariance.
struct SyntheticSpec {
  std::size_t total_size = 500;
  double imbalance_ratio = 10.0;
  double majority_center = 1.7;
  double outlier_rate = 0.0;
  std::uint64_t seed = 1;
  std::size_t dimension = 5;

  std::size_t minority_size() const;
  std::size_t majority_size() const { return total_size - minority_size(); }
  /// Throws DataError when the spec cannot produce two non-empty classes.
  void validate() const;
};

/// Generating distribution of a synthetic dataset. Class j was drawn from
/// N(centers[j] * 1, I). Only datasets that carry this metadata accept
/// inject_outliers().
struct GaussianSource {
  std::vector<double> centers;
  std::size_t dimension = 5;
  std::uint64_t seed = 0;
  std::optional<SyntheticSpec> spec;
  double outlier_rate = 0.0;
  std::uint64_t outlier_seed = 0;
  /// Per class, the instance positions whose features were resampled.
  std::vector<std::vector<std::size_t>> replaced;
};

/// Labelled instances with a per-class partition of their positions.
///
/// Immutable once built. Features are stored row-major.
class Dataset {
public:
  Dataset() = default;

  /// Validates every invariant: finite features, labels below the class
  /// count, and (unless allow_empty_classes) at least one instance per class.
  Dataset(std::vector<double> features, std::size_t dimension,
          std::vector<ClassIndex> labels, std::vector<std::string> class_names,
          bool allow_empty_classes = false);

  std::size_t size() const { return labels_.size(); }
  std::size_t dimension() const { return dimension_; }
  std::size_t class_count() const { return class_names_.size(); }

  std::span<const double> row(std::size_t i) const {
    return {features_.data() + i * dimension_, dimension_};
  }
  ClassIndex label(std::size_t i) const { return labels_[i]; }
  const std::vector<ClassIndex>& labels() const { return labels_; }
  const std::vector<double>& features() const { return features_; }

  const std::vector<std::size_t>& class_indices(ClassIndex j) const {
    return class_indices_[j];
  }
  std::size_t class_size(ClassIndex j) const { return class_indices_[j].size(); }
  std::vector<std::size_t> class_sizes() const;
  const std::vector<std::string>& class_names() const { return class_names_; }

  const std::optional<GaussianSource>& source() const { return source_; }
  Dataset with_source(GaussianSource source) const;

  /// Rows at the given positions, in the given order. Class names and the
  /// generating metadata are kept.
  Dataset subset(std::span<const std::size_t> positions,
                 bool allow_empty_classes = false) const;

private:
  std::vector<double> features_;
  std::size_t dimension_ = 0;
  std::vector<ClassIndex> labels_;
  std::vector<std::string> class_names_;
  std::vector<std::vector<std::size_t>> class_indices_;
  std::optional<GaussianSource> source_;
};

/// Reads feature columns followed by one label column. Labels are mapped to
/// class indices in order of first appearance. Requires at least two classes.
Dataset load_csv(const std::filesystem::path& path, bool has_header);

/// Same format, but labels are mapped onto a fixed list of class names (for
/// scoring a model on held-out data). Unknown labels are an error; classes
/// absent from the file are allowed.
Dataset load_csv_with_classes(const std::filesystem::path& path, bool has_header,
                              const std::vector<std::string>& class_names);

/// Writes the CSV format read by load_csv, with a header row
/// `x0,...,x{d-1},label` and round-trip precision reals.
void write_csv(const Dataset& ds, const std::filesystem::path& path);

/// Per class, round(train_fraction * n_j) instances go to the training side.
/// Both sides keep the original relative order.
std::pair<Dataset, Dataset> stratified_split(const Dataset& ds, double train_fraction,
                                             std::uint64_t seed);

/// Stratified k-fold partition: returns, per fold, the held-out positions.
std::vector<std::vector<std::size_t>> stratified_folds(const Dataset& ds, std::size_t folds,
                                                       std::uint64_t seed);

Dataset generate_gaussian(const SyntheticSpec& spec);

/// Multi-class variant: class j has sizes[j] points drawn from
/// N(centers[j] * 1, I) in `dimension` dimensions.
Dataset generate_gaussian_classes(const std::vector<std::size_t>& sizes,
                                  const std::vector<double>& centers,
                                  std::size_t dimension, std::uint64_t seed);

/// For each class j, round(rate * n_j) randomly chosen instances get fresh
/// features drawn from the other class's distribution while keeping label j.
/// Only two-class synthetic datasets qualify.
Dataset inject_outliers(const Dataset& ds, double rate, std::uint64_t seed);

} // namespace lexiboost
