#include "lexiboost/weak.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lexiboost/error.hpp"
#include "lexiboost/kernels.hpp"

namespace lexiboost {

namespace {

constexpr double kImprovementTol = 1e-12;
constexpr std::size_t kQueryChunk = 256;

ClassIndex argmax_class(std::span<const double> mass) {
  ClassIndex best = 0;
  for (ClassIndex c = 1; c < mass.size(); ++c)
    if (mass[c] > mass[best]) best = c;
  return best;
}

/// Positions with strictly positive weight, and those weights rescaled to
/// sum to one.
struct ActiveSample {
  std::vector<std::size_t> index;
  std::vector<double> weight;
};

ActiveSample active_sample(const Dataset& ds, const WeightDistribution& d) {
  if (d.size() != ds.size()) throw DataError("weight vector length does not match dataset");
  ActiveSample s;
  double total = 0.0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (d[i] > 0.0) {
      s.index.push_back(i);
      s.weight.push_back(d[i]);
      total += d[i];
    }
  }
  if (s.index.empty()) throw DataError("weight distribution has no positive mass");
  for (double& w : s.weight) w /= total;
  return s;
}

double entropy(std::span<const double> mass, double total) {
  if (total <= 0.0) return 0.0;
  double h = 0.0;
  for (double m : mass) {
    if (m <= 0.0) continue;
    const double p = m / total;
    h -= p * std::log2(p);
  }
  return h;
}

struct SplitCandidate {
  bool found = false;
  std::size_t feature = 0;
  double threshold = 0.0;
  double score = 0.0;
};

/// Best information-gain split of the rows in `rows` (positions into the
/// active sample).
SplitCandidate best_gain_split(const Dataset& ds, const ActiveSample& s,
                               const std::vector<std::size_t>& rows) {
  const auto classes = ds.class_count();
  std::vector<double> total_mass(classes, 0.0);
  double total = 0.0;
  for (auto r : rows) {
    total_mass[ds.label(s.index[r])] += s.weight[r];
    total += s.weight[r];
  }
  const double parent_h = entropy(total_mass, total);

  SplitCandidate best;
  best.score = kImprovementTol;
  std::vector<std::size_t> order(rows);
  std::vector<double> left(classes), right(classes);
  for (std::size_t f = 0; f < ds.dimension(); ++f) {
    auto value = [&](std::size_t r) { return ds.row(s.index[r])[f]; };
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return value(a) < value(b); });
    std::fill(left.begin(), left.end(), 0.0);
    right = total_mass;
    double left_total = 0.0;
    for (std::size_t p = 0; p + 1 < order.size(); ++p) {
      const auto r = order[p];
      const double w = s.weight[r];
      left[ds.label(s.index[r])] += w;
      right[ds.label(s.index[r])] -= w;
      left_total += w;
      const double v0 = value(r), v1 = value(order[p + 1]);
      if (!(v0 < v1)) continue;
      const double right_total = total - left_total;
      const double gain = parent_h - (left_total / total) * entropy(left, left_total) -
                          (right_total / total) * entropy(right, right_total);
      if (gain > best.score + kImprovementTol) {
        best = {true, f, 0.5 * (v0 + v1), gain};
      }
    }
  }
  return best;
}

std::size_t grow(const Dataset& ds, const ActiveSample& s, const std::vector<std::size_t>& rows,
                 std::size_t depth, std::size_t max_depth, std::vector<TreeNode>& nodes) {
  std::vector<double> mass(ds.class_count(), 0.0);
  for (auto r : rows) mass[ds.label(s.index[r])] += s.weight[r];
  const auto node_id = nodes.size();
  nodes.push_back(TreeNode{true, 0, 0.0, 0, 0, argmax_class(mass)});

  const auto nonzero = std::count_if(mass.begin(), mass.end(), [](double m) { return m > 0.0; });
  if (depth >= max_depth || nonzero <= 1) return node_id;
  const auto split = best_gain_split(ds, s, rows);
  if (!split.found) return node_id;

  std::vector<std::size_t> left_rows, right_rows;
  for (auto r : rows)
    (ds.row(s.index[r])[split.feature] <= split.threshold ? left_rows : right_rows).push_back(r);
  const auto l = grow(ds, s, left_rows, depth + 1, max_depth, nodes);
  const auto r = grow(ds, s, right_rows, depth + 1, max_depth, nodes);
  nodes[node_id] = TreeNode{false, split.feature, split.threshold, l, r, nodes[node_id].label};
  return node_id;
}

/// Indices of the k nearest stored points for one query row of distances,
/// skipping `exclude` (a stored position, or stored() for none). Ties in
/// distance go to the lower stored position, which follows instance order.
ClassIndex knn_vote(const KnnModel& m, std::span<const double> dist, std::size_t exclude,
                    std::size_t class_count, std::vector<std::size_t>& scratch) {
  scratch.clear();
  for (std::size_t p = 0; p < m.stored(); ++p)
    if (p != exclude) scratch.push_back(p);
  const auto k = std::min(m.k, scratch.size());
  auto closer = [&](std::size_t a, std::size_t b) {
    return dist[a] < dist[b] || (dist[a] == dist[b] && a < b);
  };
  std::partial_sort(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(k),
                    scratch.end(), closer);
  std::vector<double> votes(class_count, 0.0);
  for (std::size_t n = 0; n < k; ++n) votes[m.labels[scratch[n]]] += m.weights[scratch[n]];
  return argmax_class(votes);
}

} // namespace

WeightDistribution::WeightDistribution(std::vector<double> weights) : weights_(std::move(weights)) {
  double total = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw DataError("weights must be finite and non-negative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) throw DataError("weights must sum to 1");
}

WeightDistribution WeightDistribution::uniform(std::size_t n) {
  if (n == 0) throw DataError("cannot build a distribution over zero instances");
  return WeightDistribution(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

WeightDistribution WeightDistribution::class_balanced(const Dataset& ds) {
  std::vector<double> w(ds.size(), 0.0);
  const double classes = static_cast<double>(ds.class_count());
  for (ClassIndex j = 0; j < ds.class_count(); ++j) {
    const double v = 1.0 / (classes * static_cast<double>(ds.class_size(j)));
    for (auto i : ds.class_indices(j)) w[i] = v;
  }
  return normalized(std::move(w));
}

WeightDistribution WeightDistribution::normalized(std::vector<double> raw) {
  double total = 0.0;
  for (double w : raw) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw DataError("weights must be finite and non-negative");
    total += w;
  }
  if (!(total > 0.0)) throw DataError("weights have no positive mass");
  for (double& w : raw) w /= total;
  return WeightDistribution(std::move(raw));
}

std::string to_string(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::Stump: return "stump";
    case LearnerKind::Tree: return "tree";
    case LearnerKind::Knn: return "knn";
  }
  return "unknown";
}

LearnerKind learner_kind_from_string(const std::string& name) {
  if (name == "stump") return LearnerKind::Stump;
  if (name == "tree") return LearnerKind::Tree;
  if (name == "knn") return LearnerKind::Knn;
  throw UsageError("unknown base learner '" + name + "' (expected stump, tree or knn)");
}

WeakHypothesis::WeakHypothesis(Model model, std::size_t class_count, std::size_t dimension)
    : model_(std::move(model)), class_count_(class_count), dimension_(dimension) {}

LearnerKind WeakHypothesis::kind() const {
  switch (model_.index()) {
    case 0: return LearnerKind::Stump;
    case 1: return LearnerKind::Tree;
    default: return LearnerKind::Knn;
  }
}

void WeakHypothesis::check_dimension(std::size_t d) const {
  if (d != dimension_)
    throw DataError("feature dimension " + std::to_string(d) + " does not match trained dimension " +
                    std::to_string(dimension_));
}

ClassIndex WeakHypothesis::predict_class(std::span<const double> x) const {
  check_dimension(x.size());
  if (const auto* s = std::get_if<StumpModel>(&model_))
    return x[s->feature] <= s->threshold ? s->left : s->right;
  if (const auto* t = std::get_if<TreeModel>(&model_)) {
    std::size_t node = 0;
    while (!t->nodes[node].leaf)
      node = x[t->nodes[node].feature] <= t->nodes[node].threshold ? t->nodes[node].left
                                                                    : t->nodes[node].right;
    return t->nodes[node].label;
  }
  const auto& m = std::get<KnnModel>(model_);
  std::vector<double> dist(m.stored());
  kernels::squared_distances_serial(x, 1, m.features, m.stored(), dimension_, dist);
  std::vector<std::size_t> scratch;
  return knn_vote(m, dist, m.stored(), class_count_, scratch);
}

std::vector<double> WeakHypothesis::predict(std::span<const double> x) const {
  std::vector<double> out(class_count_, -1.0);
  out[predict_class(x)] = 1.0;
  return out;
}

std::vector<ClassIndex> WeakHypothesis::predict_classes(const Dataset& ds, bool in_sample) const {
  check_dimension(ds.dimension());
  std::vector<ClassIndex> out(ds.size());
  const auto* knn = std::get_if<KnnModel>(&model_);
  if (!knn) {
    for (std::size_t i = 0; i < ds.size(); ++i) out[i] = predict_class(ds.row(i));
    return out;
  }

  // Map training position -> stored position for leave-one-out.
  std::vector<std::size_t> stored_at;
  if (in_sample) {
    stored_at.assign(ds.size(), knn->stored());
    for (std::size_t p = 0; p < knn->stored(); ++p)
      if (knn->source_index[p] < ds.size()) stored_at[knn->source_index[p]] = p;
  }
  std::vector<double> dist;
  std::vector<std::size_t> scratch;
  for (std::size_t begin = 0; begin < ds.size(); begin += kQueryChunk) {
    const auto count = std::min(kQueryChunk, ds.size() - begin);
    dist.resize(count * knn->stored());
    kernels::squared_distances(
        std::span<const double>(ds.features().data() + begin * dimension_, count * dimension_),
        count, knn->features, knn->stored(), dimension_, dist);
    for (std::size_t q = 0; q < count; ++q) {
      const auto i = begin + q;
      const auto exclude = in_sample ? stored_at[i] : knn->stored();
      out[i] = knn_vote(*knn,
                        std::span<const double>(dist.data() + q * knn->stored(), knn->stored()),
                        exclude, class_count_, scratch);
    }
  }
  return out;
}

WeakHypothesis train_stump(const Dataset& ds, const WeightDistribution& d) {
  const auto s = active_sample(ds, d);
  const auto classes = ds.class_count();
  std::vector<double> total_mass(classes, 0.0);
  for (std::size_t r = 0; r < s.index.size(); ++r) total_mass[ds.label(s.index[r])] += s.weight[r];

  const auto constant = argmax_class(total_mass);
  StumpModel best{0, 0.0, constant, constant};
  double best_error = 1.0 - total_mass[constant];

  std::vector<std::size_t> order(s.index.size());
  std::vector<double> left(classes), right(classes);
  for (std::size_t f = 0; f < ds.dimension(); ++f) {
    std::iota(order.begin(), order.end(), 0);
    auto value = [&](std::size_t r) { return ds.row(s.index[r])[f]; };
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return value(a) < value(b); });
    std::fill(left.begin(), left.end(), 0.0);
    right = total_mass;
    for (std::size_t p = 0; p + 1 < order.size(); ++p) {
      const auto r = order[p];
      left[ds.label(s.index[r])] += s.weight[r];
      right[ds.label(s.index[r])] -= s.weight[r];
      const double v0 = value(r), v1 = value(order[p + 1]);
      if (!(v0 < v1)) continue;
      const auto lc = argmax_class(left), rc = argmax_class(right);
      double correct = left[lc] + right[rc];
      const double error = 1.0 - correct;
      if (error < best_error - kImprovementTol) {
        best_error = error;
        best = {f, 0.5 * (v0 + v1), lc, rc};
      }
    }
  }
  return WeakHypothesis(best, classes, ds.dimension());
}

WeakHypothesis train_tree(const Dataset& ds, const WeightDistribution& d, std::size_t max_depth) {
  if (max_depth < 1) throw UsageError("tree depth must be at least 1");
  const auto s = active_sample(ds, d);
  std::vector<std::size_t> rows(s.index.size());
  std::iota(rows.begin(), rows.end(), 0);
  TreeModel model;
  model.max_depth = max_depth;
  grow(ds, s, rows, 0, max_depth, model.nodes);
  return WeakHypothesis(std::move(model), ds.class_count(), ds.dimension());
}

WeakHypothesis train_knn(const Dataset& ds, const WeightDistribution& d, std::size_t k) {
  if (k < 1 || k > ds.size()) throw UsageError("kNN needs 1 <= k <= n");
  const auto s = active_sample(ds, d);
  KnnModel m;
  m.k = k;
  for (std::size_t r = 0; r < s.index.size(); ++r) {
    const auto row = ds.row(s.index[r]);
    m.features.insert(m.features.end(), row.begin(), row.end());
    m.labels.push_back(ds.label(s.index[r]));
    m.weights.push_back(s.weight[r]);
    m.source_index.push_back(s.index[r]);
  }
  return WeakHypothesis(std::move(m), ds.class_count(), ds.dimension());
}

WeakHypothesis train_weak(const Dataset& ds, const WeightDistribution& d, const LearnerConfig& cfg) {
  switch (cfg.kind) {
    case LearnerKind::Stump: return train_stump(ds, d);
    case LearnerKind::Tree: return train_tree(ds, d, cfg.max_depth);
    case LearnerKind::Knn: return train_knn(ds, d, cfg.k);
  }
  throw UsageError("unknown learner kind");
}

double weighted_error(std::span<const ClassIndex> predictions, const Dataset& ds,
                      const WeightDistribution& d) {
  double err = 0.0;
  for (std::size_t i = 0; i < ds.size(); ++i)
    if (predictions[i] != ds.label(i)) err += d[i];
  return std::clamp(err, 0.0, 1.0);
}

double weighted_error(const WeakHypothesis& h, const Dataset& ds, const WeightDistribution& d) {
  const auto pred = h.predict_classes(ds, /*in_sample=*/true);
  return weighted_error(pred, ds, d);
}

} // namespace lexiboost
