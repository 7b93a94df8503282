#include "lexiboost/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "lexiboost/error.hpp"

namespace lexiboost {

ConfusionMatrix confusion_matrix(std::span<const ClassIndex> truth, std::span<const ClassIndex> predicted,
                                 std::size_t class_count) {
  if (truth.size() != predicted.size()) throw DataError("prediction count does not match label count");
  ConfusionMatrix cm(class_count, std::vector<std::size_t>(class_count, 0));
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] >= class_count || predicted[i] >= class_count) throw DataError("class index out of range");
    ++cm[truth[i]][predicted[i]];
  }
  return cm;
}

Recalls class_recalls(const ConfusionMatrix& cm) {
  Recalls r;
  for (std::size_t j = 0; j < cm.size(); ++j) {
    std::size_t total = 0;
    for (auto c : cm[j]) total += c;
    r.present.push_back(total > 0);
    r.recall.push_back(total > 0 ? static_cast<double>(cm[j][j]) / static_cast<double>(total) : 0.0);
  }
  return r;
}

double g_mean(std::span<const double> recalls) {
  if (recalls.empty()) throw DataError("g-mean of no classes");
  double log_sum = 0.0;
  for (double r : recalls) {
    if (r < 0.0 || r > 1.0) throw DataError("recall outside [0, 1]");
    if (r == 0.0) return 0.0;
    log_sum += std::log(r);
  }
  return std::exp(log_sum / static_cast<double>(recalls.size()));
}

double auc_binary(std::span<const double> scores, std::span<const ClassIndex> labels,
                  ClassIndex positive_class) {
  if (scores.size() != labels.size()) throw DataError("score count does not match label count");
  std::vector<double> pos, neg;
  for (std::size_t i = 0; i < scores.size(); ++i)
    (labels[i] == positive_class ? pos : neg).push_back(scores[i]);
  if (pos.empty() || neg.empty()) throw DataError("AUC is undefined without both classes");
  std::sort(neg.begin(), neg.end());
  // Twice the Mann-Whitney count, kept integral: 2 per win, 1 per tie.
  unsigned long long twice = 0;
  for (double p : pos) {
    const auto lo = std::lower_bound(neg.begin(), neg.end(), p);
    const auto hi = std::upper_bound(lo, neg.end(), p);
    twice += 2ULL * static_cast<unsigned long long>(lo - neg.begin()) +
             static_cast<unsigned long long>(hi - lo);
  }
  return static_cast<double>(twice) / (2.0 * static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

double avg_auc(std::span<const double> scores, std::span<const ClassIndex> labels, std::size_t class_count) {
  if (class_count < 2) throw DataError("Avg-AUC needs at least two classes");
  if (scores.size() != labels.size() * class_count) throw DataError("score matrix shape mismatch");
  double total = 0.0;
  std::size_t pairs = 0;
  for (ClassIndex a = 0; a < class_count; ++a)
    for (ClassIndex b = a + 1; b < class_count; ++b) {
      std::vector<double> sa, sb;
      std::vector<ClassIndex> lab;
      for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != a && labels[i] != b) continue;
        sa.push_back(scores[i * class_count + a]);
        sb.push_back(scores[i * class_count + b]);
        lab.push_back(labels[i]);
      }
      total += 0.5 * (auc_binary(sa, lab, a) + auc_binary(sb, lab, b));
      ++pairs;
    }
  return total / static_cast<double>(pairs);
}

EvaluationReport evaluate_scores(std::span<const double> scores, std::span<const ClassIndex> labels,
                                 std::size_t class_count) {
  if (scores.size() != labels.size() * class_count) throw DataError("score matrix shape mismatch");
  EvaluationReport rep;
  rep.n_test = labels.size();
  std::vector<ClassIndex> predicted(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto* row = scores.data() + i * class_count;
    predicted[i] = static_cast<ClassIndex>(std::max_element(row, row + class_count) - row);
  }
  rep.confusion = confusion_matrix(labels, predicted, class_count);
  const auto r = class_recalls(rep.confusion);
  rep.recalls = r.recall;

  std::size_t correct = 0;
  for (ClassIndex j = 0; j < class_count; ++j) correct += rep.confusion[j][j];
  rep.accuracy = labels.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(labels.size());

  std::vector<double> present_recalls;
  for (ClassIndex j = 0; j < class_count; ++j)
    if (r.present[j]) present_recalls.push_back(r.recall[j]);
  const bool all_present = present_recalls.size() == class_count;
  if (!present_recalls.empty()) rep.g_mean = g_mean(present_recalls);
  if (!all_present) {
    rep.warnings.push_back("test set lacks at least one class; g_mean covers present classes only and "
                           "AUC metrics are omitted");
    return rep;
  }
  if (class_count == 2) {
    std::vector<double> diff(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) diff[i] = scores[2 * i + 1] - scores[2 * i];
    rep.auc = auc_binary(diff, labels, 1);
  }
  rep.avg_auc = avg_auc(scores, labels, class_count);
  return rep;
}

EvaluationReport evaluate(const Ensemble& ens, const Dataset& test) {
  if (test.class_count() != ens.class_count) throw DataError("test set class count does not match the model");
  const auto scores = ens.scores(test);
  return evaluate_scores(scores, test.labels(), ens.class_count);
}

} // namespace lexiboost
