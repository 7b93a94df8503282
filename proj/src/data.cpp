#include "lexiboost/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "lexiboost/error.hpp"
#include "lexiboost/rng.hpp"

namespace lexiboost {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return out;
}

double parse_real(std::string_view field, std::size_t line_no) {
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (field.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw DataError("line " + std::to_string(line_no) + ": non-numeric or non-finite feature '" +
                    std::string(field) + "'");
  }
  return value;
}

struct RawRows {
  std::vector<double> features;
  std::vector<std::string> labels;
  std::size_t dimension = 0;
};

RawRows read_rows(const std::filesystem::path& path, bool has_header) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");

  RawRows rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t columns = 0;
  bool header_pending = has_header;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (columns == 0) {
      if (fields.size() < 2)
        throw DataError("line " + std::to_string(line_no) + ": need at least 2 columns");
      columns = fields.size();
    } else if (fields.size() != columns) {
      throw DataError("line " + std::to_string(line_no) + ": ragged row (" +
                      std::to_string(fields.size()) + " columns, expected " +
                      std::to_string(columns) + ")");
    }
    if (header_pending) {
      header_pending = false;
      continue;
    }
    for (std::size_t c = 0; c + 1 < columns; ++c)
      rows.features.push_back(parse_real(fields[c], line_no));
    if (fields.back().empty())
      throw DataError("line " + std::to_string(line_no) + ": empty label");
    rows.labels.emplace_back(fields.back());
  }
  if (in.bad()) throw DataError("read failure on '" + path.string() + "'");
  if (rows.labels.empty()) throw DataError("'" + path.string() + "' contains no data rows");
  rows.dimension = columns - 1;
  return rows;
}

std::vector<double> draw_gaussian(Rng& rng, double center, std::size_t dimension) {
  std::vector<double> x(dimension);
  for (auto& v : x) v = center + rng.normal();
  return x;
}

} // namespace

std::size_t SyntheticSpec::minority_size() const {
  return static_cast<std::size_t>(
      std::llround(static_cast<double>(total_size) / (imbalance_ratio + 1.0)));
}

void SyntheticSpec::validate() const {
  if (!(imbalance_ratio > 1.0)) throw DataError("imbalance ratio must exceed 1");
  if (total_size == 0) throw DataError("dataset size must be positive");
  if (dimension == 0) throw DataError("dimension must be positive");
  if (!std::isfinite(majority_center)) throw DataError("majority center must be finite");
  if (!(outlier_rate >= 0.0 && outlier_rate < 0.5)) throw DataError("outlier rate must lie in [0, 0.5)");
  const auto minority = minority_size();
  if (minority < 1 || minority >= total_size)
    throw DataError("size " + std::to_string(total_size) + " with IR " +
                    std::to_string(imbalance_ratio) + " leaves a class empty");
}

Dataset::Dataset(std::vector<double> features, std::size_t dimension,
                 std::vector<ClassIndex> labels, std::vector<std::string> class_names,
                 bool allow_empty_classes)
    : features_(std::move(features)),
      dimension_(dimension),
      labels_(std::move(labels)),
      class_names_(std::move(class_names)) {
  if (dimension_ == 0) throw DataError("feature dimension must be positive");
  if (features_.size() != labels_.size() * dimension_)
    throw DataError("feature matrix does not match label count");
  if (class_names_.empty()) throw DataError("dataset needs at least one class");
  for (double v : features_)
    if (!std::isfinite(v)) throw DataError("non-finite feature value");
  class_indices_.assign(class_names_.size(), {});
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] >= class_names_.size())
      throw DataError("label " + std::to_string(labels_[i]) + " out of range");
    class_indices_[labels_[i]].push_back(i);
  }
  if (!allow_empty_classes) {
    for (std::size_t j = 0; j < class_indices_.size(); ++j)
      if (class_indices_[j].empty())
        throw DataError("class '" + class_names_[j] + "' has no instances");
  }
}

std::vector<std::size_t> Dataset::class_sizes() const {
  std::vector<std::size_t> sizes;
  sizes.reserve(class_indices_.size());
  for (const auto& idx : class_indices_) sizes.push_back(idx.size());
  return sizes;
}

Dataset Dataset::with_source(GaussianSource source) const {
  Dataset copy = *this;
  copy.source_ = std::move(source);
  return copy;
}

Dataset Dataset::subset(std::span<const std::size_t> positions, bool allow_empty_classes) const {
  std::vector<double> features;
  features.reserve(positions.size() * dimension_);
  std::vector<ClassIndex> labels;
  labels.reserve(positions.size());
  for (auto p : positions) {
    const auto r = row(p);
    features.insert(features.end(), r.begin(), r.end());
    labels.push_back(labels_[p]);
  }
  Dataset out(std::move(features), dimension_, std::move(labels), class_names_,
              allow_empty_classes);
  if (source_) {
    // Replacement records refer to the parent's positions; they do not survive
    // re-indexing.
    GaussianSource src = *source_;
    src.replaced.clear();
    out.source_ = std::move(src);
  }
  return out;
}

Dataset load_csv(const std::filesystem::path& path, bool has_header) {
  auto rows = read_rows(path, has_header);
  std::vector<std::string> names;
  std::unordered_map<std::string, ClassIndex> lookup;
  std::vector<ClassIndex> labels;
  labels.reserve(rows.labels.size());
  for (const auto& token : rows.labels) {
    auto [it, inserted] = lookup.try_emplace(token, names.size());
    if (inserted) names.push_back(token);
    labels.push_back(it->second);
  }
  if (names.size() < 2)
    throw DataError("'" + path.string() + "' has a single class; at least 2 are required");
  return Dataset(std::move(rows.features), rows.dimension, std::move(labels), std::move(names));
}

Dataset load_csv_with_classes(const std::filesystem::path& path, bool has_header,
                              const std::vector<std::string>& class_names) {
  auto rows = read_rows(path, has_header);
  std::unordered_map<std::string, ClassIndex> lookup;
  for (std::size_t j = 0; j < class_names.size(); ++j) lookup.emplace(class_names[j], j);
  std::vector<ClassIndex> labels;
  labels.reserve(rows.labels.size());
  for (const auto& token : rows.labels) {
    const auto it = lookup.find(token);
    if (it == lookup.end()) throw DataError("unknown class label '" + token + "'");
    labels.push_back(it->second);
  }
  return Dataset(std::move(rows.features), rows.dimension, std::move(labels), class_names,
                 /*allow_empty_classes=*/true);
}

void write_csv(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  for (std::size_t c = 0; c < ds.dimension(); ++c) out << 'x' << c << ',';
  out << "label\n";
  char buf[32];
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (double v : ds.row(i)) {
      const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
      out.write(buf, ptr - buf);
      out << ',';
    }
    out << ds.class_names()[ds.label(i)] << '\n';
  }
  if (!out) throw DataError("write failure on '" + path.string() + "'");
}

std::pair<Dataset, Dataset> stratified_split(const Dataset& ds, double train_fraction,
                                             std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw DataError("train fraction must lie in (0, 1)");
  std::vector<std::size_t> train, test;
  for (ClassIndex j = 0; j < ds.class_count(); ++j) {
    auto idx = ds.class_indices(j);
    const auto n_j = idx.size();
    const auto n_train = static_cast<std::size_t>(
        std::llround(train_fraction * static_cast<double>(n_j)));
    if (n_train < 1 || n_train >= n_j)
      throw DataError("train fraction " + std::to_string(train_fraction) + " empties class '" +
                      ds.class_names()[j] + "' (" + std::to_string(n_j) +
                      " instances) on one side of the split");
    Rng rng(derive_seed(seed, j));
    rng.shuffle(idx);
    train.insert(train.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
    test.insert(test.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
  }
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {ds.subset(train), ds.subset(test)};
}

std::vector<std::vector<std::size_t>> stratified_folds(const Dataset& ds, std::size_t folds,
                                                       std::uint64_t seed) {
  if (folds < 2) throw DataError("need at least 2 folds");
  std::vector<std::vector<std::size_t>> out(folds);
  std::size_t offset = 0;
  for (ClassIndex j = 0; j < ds.class_count(); ++j) {
    auto idx = ds.class_indices(j);
    if (idx.size() < folds)
      throw DataError("class '" + ds.class_names()[j] + "' has fewer instances than folds");
    Rng rng(derive_seed(seed, 1000 + j));
    rng.shuffle(idx);
    // Round-robin continues across classes so fold sizes stay balanced.
    for (std::size_t k = 0; k < idx.size(); ++k) out[(offset + k) % folds].push_back(idx[k]);
    offset += idx.size();
  }
  for (auto& f : out) std::sort(f.begin(), f.end());
  return out;
}

Dataset generate_gaussian(const SyntheticSpec& spec) {
  spec.validate();
  const auto minority = spec.minority_size();
  auto ds = generate_gaussian_classes({minority, spec.total_size - minority},
                                      {0.0, spec.majority_center}, spec.dimension, spec.seed);
  GaussianSource src = *ds.source();
  src.spec = spec;
  src.spec->outlier_rate = 0.0;
  auto out = ds.with_source(std::move(src));
  if (spec.outlier_rate > 0.0)
    return inject_outliers(out, spec.outlier_rate, derive_seed(spec.seed, 0x0071));
  return out;
}

Dataset generate_gaussian_classes(const std::vector<std::size_t>& sizes,
                                  const std::vector<double>& centers, std::size_t dimension,
                                  std::uint64_t seed) {
  if (sizes.size() != centers.size() || sizes.size() < 2)
    throw DataError("need matching sizes and centers for at least 2 classes");
  if (dimension == 0) throw DataError("dimension must be positive");
  Rng rng(seed);
  std::vector<double> features;
  std::vector<ClassIndex> labels;
  std::vector<std::string> names;
  for (std::size_t j = 0; j < sizes.size(); ++j) {
    if (sizes[j] == 0) throw DataError("class " + std::to_string(j) + " has size 0");
    names.push_back(std::to_string(j));
    for (std::size_t i = 0; i < sizes[j]; ++i) {
      const auto x = draw_gaussian(rng, centers[j], dimension);
      features.insert(features.end(), x.begin(), x.end());
      labels.push_back(j);
    }
  }
  Dataset ds(std::move(features), dimension, std::move(labels), std::move(names));
  GaussianSource src;
  src.centers = centers;
  src.dimension = dimension;
  src.seed = seed;
  src.replaced.assign(sizes.size(), {});
  return ds.with_source(std::move(src));
}

Dataset inject_outliers(const Dataset& ds, double rate, std::uint64_t seed) {
  if (!ds.source())
    throw DataError("outlier injection needs generator metadata; dataset was not synthesized");
  const auto& src = *ds.source();
  if (src.centers.size() != 2 || ds.class_count() != 2)
    throw DataError("outlier injection is defined for two-class synthetic data only");
  if (!(rate >= 0.0 && rate < 0.5)) throw DataError("outlier rate must lie in [0, 0.5)");

  std::vector<double> features = ds.features();
  GaussianSource out_src = src;
  out_src.outlier_rate = rate;
  out_src.outlier_seed = seed;
  out_src.replaced.assign(2, {});
  if (out_src.spec) out_src.spec->outlier_rate = rate;

  Rng rng(seed);
  for (ClassIndex j = 0; j < 2; ++j) {
    auto idx = ds.class_indices(j);
    const auto count = static_cast<std::size_t>(
        std::llround(rate * static_cast<double>(idx.size())));
    if (count >= idx.size())
      throw DataError("outlier rate would replace every instance of a class");
    rng.shuffle(idx);
    idx.resize(count);
    std::sort(idx.begin(), idx.end());
    const double other_center = src.centers[1 - j];
    for (auto p : idx) {
      for (std::size_t c = 0; c < ds.dimension(); ++c)
        features[p * ds.dimension() + c] = other_center + rng.normal();
    }
    out_src.replaced[j] = std::move(idx);
  }
  Dataset out(std::move(features), ds.dimension(), ds.labels(), ds.class_names());
  return out.with_source(std::move(out_src));
}

} // namespace lexiboost
