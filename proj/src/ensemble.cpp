#include "lexiboost/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "lexiboost/error.hpp"
#include "lexiboost/kernels.hpp"

namespace lexiboost {

double margin_entry(std::span<const double> prediction, ClassIndex label, const MarginOptions& opts) {
  const auto classes = prediction.size();
  if (classes == 2) {
    const double y = label == 1 ? 1.0 : -1.0;
    return y * prediction[1];
  }
  double dot = 0.0;
  for (ClassIndex j = 0; j < classes; ++j) dot += (j == label ? 1.0 : -1.0) * prediction[j];
  return opts.normalize_multiclass ? dot / static_cast<double>(classes) : dot;
}

MarginMatrix::MarginMatrix(std::size_t rows, std::size_t cols, std::vector<double> values,
                           std::vector<ClassIndex> class_of, std::size_t class_count)
    : cols_(cols), class_count_(class_count), values_(std::move(values)), class_of_(std::move(class_of)) {
  if (class_of_.size() != rows || values_.size() != rows * cols)
    throw DataError("margin matrix shape mismatch");
  for (auto c : class_of_)
    if (c >= class_count_) throw DataError("margin matrix class out of range");
}

std::vector<std::size_t> MarginMatrix::class_rows(ClassIndex j) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < class_of_.size(); ++i)
    if (class_of_[i] == j) out.push_back(i);
  return out;
}

std::vector<std::size_t> MarginMatrix::class_sizes() const {
  std::vector<std::size_t> sizes(class_count_, 0);
  for (auto c : class_of_) ++sizes[c];
  return sizes;
}

MarginMatrix MarginMatrix::with_column(std::span<const double> column) const {
  if (column.size() != rows()) throw DataError("margin column length mismatch");
  std::vector<double> v;
  v.reserve(rows() * (cols_ + 1));
  for (std::size_t i = 0; i < rows(); ++i) {
    const auto r = row(i);
    v.insert(v.end(), r.begin(), r.end());
    v.push_back(column[i]);
  }
  return MarginMatrix(rows(), cols_ + 1, std::move(v), class_of_, class_count_);
}

std::vector<double> margin_column(std::span<const ClassIndex> predicted, const Dataset& ds,
                                  const MarginOptions& opts) {
  std::vector<double> col(ds.size());
  std::vector<double> f(ds.class_count());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    std::fill(f.begin(), f.end(), -1.0);
    f[predicted[i]] = 1.0;
    col[i] = margin_entry(f, ds.label(i), opts);
  }
  return col;
}

namespace {

std::vector<std::vector<ClassIndex>> all_predictions(std::span<const WeakHypothesis> components,
                                                     const Dataset& ds, bool in_sample) {
  if (components.empty()) throw DataError("margin matrix needs at least one component");
  std::vector<std::vector<ClassIndex>> preds;
  preds.reserve(components.size());
  for (const auto& h : components) preds.push_back(h.predict_classes(ds, in_sample));
  return preds;
}

void fill_row(std::vector<double>& values, const std::vector<std::vector<ClassIndex>>& preds,
              const Dataset& ds, std::size_t i, const MarginOptions& opts) {
  const auto cols = preds.size();
  std::vector<double> f(ds.class_count());
  for (std::size_t t = 0; t < cols; ++t) {
    std::fill(f.begin(), f.end(), -1.0);
    f[preds[t][i]] = 1.0;
    values[i * cols + t] = margin_entry(f, ds.label(i), opts);
  }
}

} // namespace

MarginMatrix margin_matrix(std::span<const WeakHypothesis> components, const Dataset& ds,
                           bool in_sample, const MarginOptions& opts) {
  const auto preds = all_predictions(components, ds, in_sample);
  const auto cols = preds.size();
  std::vector<double> values(ds.size() * cols);
  const auto n = static_cast<std::int64_t>(ds.size());
  const bool big = ds.size() * cols * ds.class_count() >= kernels::kParallelThreshold;
#pragma omp parallel for schedule(static) if (big)
  for (std::int64_t i = 0; i < n; ++i) fill_row(values, preds, ds, static_cast<std::size_t>(i), opts);
  return MarginMatrix(ds.size(), cols, std::move(values), ds.labels(), ds.class_count());
}

MarginMatrix margin_matrix_serial(std::span<const WeakHypothesis> components, const Dataset& ds,
                                  bool in_sample, const MarginOptions& opts) {
  const auto preds = all_predictions(components, ds, in_sample);
  const auto cols = preds.size();
  std::vector<double> values(ds.size() * cols);
  for (std::size_t i = 0; i < ds.size(); ++i) fill_row(values, preds, ds, i, opts);
  return MarginMatrix(ds.size(), cols, std::move(values), ds.labels(), ds.class_count());
}

double margin(std::span<const double> alpha, std::span<const double> margin_row) {
  double rho = 0.0;
  for (std::size_t t = 0; t < alpha.size(); ++t) rho += alpha[t] * margin_row[t];
  return rho;
}

std::vector<double> margins(const MarginMatrix& mm, std::span<const double> alpha) {
  if (alpha.size() != mm.cols()) throw DataError("alpha length does not match margin columns");
  std::vector<double> out(mm.rows());
  kernels::row_dots(mm.values(), mm.rows(), mm.cols(), alpha, out);
  return out;
}

double hinge_loss(double rho) { return rho >= 1.0 ? 0.0 : 1.0 - rho; }

void Ensemble::validate() const {
  if (components.empty()) throw DataError("ensemble has no components");
  if (alpha.size() != components.size()) throw DataError("ensemble weight count mismatch");
  double total = 0.0;
  for (double a : alpha) {
    if (!(a >= 0.0) || !std::isfinite(a)) throw DataError("ensemble weights must be non-negative");
    total += a;
  }
  if (std::abs(total - 1.0) > 1e-7) throw DataError("ensemble weights must sum to 1");
  for (const auto& h : components)
    if (h.class_count() != class_count) throw DataError("component class count mismatch");
}

std::vector<double> Ensemble::scores(std::span<const double> x) const {
  std::vector<double> s(class_count, 0.0);
  for (std::size_t t = 0; t < components.size(); ++t) {
    const auto f = components[t].predict(x);
    for (ClassIndex j = 0; j < class_count; ++j) s[j] += alpha[t] * f[j];
  }
  return s;
}

ClassIndex Ensemble::predict(std::span<const double> x) const {
  const auto s = scores(x);
  return static_cast<ClassIndex>(std::max_element(s.begin(), s.end()) - s.begin());
}

std::vector<double> Ensemble::scores(const Dataset& ds) const {
  std::vector<double> s(ds.size() * class_count, 0.0);
  for (std::size_t t = 0; t < components.size(); ++t) {
    const auto pred = components[t].predict_classes(ds, /*in_sample=*/false);
    for (std::size_t i = 0; i < ds.size(); ++i)
      for (ClassIndex j = 0; j < class_count; ++j)
        s[i * class_count + j] += alpha[t] * (pred[i] == j ? 1.0 : -1.0);
  }
  return s;
}

std::vector<ClassIndex> Ensemble::predict(const Dataset& ds) const {
  const auto s = scores(ds);
  std::vector<ClassIndex> out(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto* row = s.data() + i * class_count;
    out[i] = static_cast<ClassIndex>(std::max_element(row, row + class_count) - row);
  }
  return out;
}

Ensemble make_ensemble(std::vector<WeakHypothesis> components, std::vector<double> weights,
                       const Dataset& ds) {
  if (components.size() != weights.size()) throw DataError("component/weight count mismatch");
  double total = 0.0;
  for (double& w : weights) {
    w = std::max(w, 0.0);
    total += w;
  }
  if (total > 0.0) {
    for (double& w : weights) w /= total;
  } else {
    std::fill(weights.begin(), weights.end(), 1.0 / static_cast<double>(weights.size()));
  }
  Ensemble e{std::move(components), std::move(weights), ds.class_count(), ds.class_names()};
  e.validate();
  return e;
}

AdaBoostResult run_adaboost(const Dataset& ds, const LearnerConfig& learner, std::size_t rounds) {
  if (ds.class_count() != 2) throw UsageError("two-class AdaBoost needs a two-class dataset");
  if (rounds < 1) throw UsageError("number of rounds must be at least 1");
  AdaBoostResult out;
  auto d = WeightDistribution::uniform(ds.size());
  for (std::size_t t = 0; t < rounds; ++t) {
    auto h = train_weak(ds, d, learner);
    const auto pred = h.predict_classes(ds, true);
    const double err = weighted_error(pred, ds, d);
    if (err >= 0.5) {
      if (t == 0) {
        out.warnings.push_back("first component has weighted error " + std::to_string(err) +
                               " >= 0.5; keeping it as a single-component ensemble");
        out.components.push_back(std::move(h));
        out.alpha.push_back(1.0);
        out.rounds.push_back({err, 1.0});
      }
      break;
    }
    const double a =
        err > 0.0 ? std::min(0.5 * std::log((1.0 - err) / err), kPerfectAlphaCap) : kPerfectAlphaCap;
    out.components.push_back(std::move(h));
    out.alpha.push_back(a);
    out.rounds.push_back({err, a});
    if (err == 0.0) break;

    std::vector<double> next(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i)
      next[i] = d[i] * std::exp(pred[i] == ds.label(i) ? -a : a);
    d = WeightDistribution::normalized(std::move(next));
  }
  return out;
}

AdaBoostResult run_adaboost_multiclass(const Dataset& ds, const LearnerConfig& learner,
                                       std::size_t rounds) {
  if (ds.class_count() < 2) throw UsageError("boosting needs at least two classes");
  if (rounds < 1) throw UsageError("number of rounds must be at least 1");
  const double classes = static_cast<double>(ds.class_count());
  const double chance = 1.0 - 1.0 / classes;
  const double prior_term = std::log(classes - 1.0);
  AdaBoostResult out;
  auto d = WeightDistribution::uniform(ds.size());
  for (std::size_t t = 0; t < rounds; ++t) {
    auto h = train_weak(ds, d, learner);
    const auto pred = h.predict_classes(ds, true);
    const double err = weighted_error(pred, ds, d);
    if (err >= chance) {
      if (t == 0) {
        out.warnings.push_back("first component has weighted error " + std::to_string(err) +
                               " at or above chance; keeping it as a single-component ensemble");
        out.components.push_back(std::move(h));
        out.alpha.push_back(1.0);
        out.rounds.push_back({err, 1.0});
      }
      break;
    }
    const double a = err > 0.0
                         ? std::min(std::log((1.0 - err) / err), 2.0 * kPerfectAlphaCap) + prior_term
                         : 2.0 * kPerfectAlphaCap + prior_term;
    out.components.push_back(std::move(h));
    out.alpha.push_back(a);
    out.rounds.push_back({err, a});
    if (err == 0.0) break;

    std::vector<double> next(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i)
      next[i] = pred[i] == ds.label(i) ? d[i] : d[i] * std::exp(a);
    d = WeightDistribution::normalized(std::move(next));
  }
  return out;
}

} // namespace lexiboost
