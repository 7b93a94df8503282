#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "lexiboost/error.hpp"
#include "lexiboost/metrics.hpp"

using namespace lexiboost;

namespace {

double pairwise_auc(const std::vector<double>& s, const std::vector<ClassIndex>& y) {
  double wins = 0.0, pairs = 0.0;
  for (std::size_t p = 0; p < s.size(); ++p)
    for (std::size_t q = 0; q < s.size(); ++q)
      if (y[p] == 1 && y[q] != 1) {
        wins += s[p] > s[q] ? 1.0 : (s[p] == s[q] ? 0.5 : 0.0);
        pairs += 1.0;
      }
  return wins / pairs;
}

} // namespace

TEST_CASE("confusion matrix and recalls") {
  const std::vector<ClassIndex> truth{0, 0, 1, 1, 1, 2};
  const std::vector<ClassIndex> pred{0, 1, 1, 1, 0, 2};
  const auto cm = confusion_matrix(truth, pred, 3);
  CHECK(cm == ConfusionMatrix{{1, 1, 0}, {1, 2, 0}, {0, 0, 1}});
  const auto r = class_recalls(cm);
  CHECK(r.recall[0] == 0.5);
  CHECK(r.recall[1] == doctest::Approx(2.0 / 3.0));
  CHECK(r.recall[2] == 1.0);
  CHECK(r.present == std::vector<bool>{true, true, true});
  CHECK_THROWS_AS(confusion_matrix(truth, std::vector<ClassIndex>{0}, 3), DataError);
  CHECK_THROWS_AS(confusion_matrix(truth, std::vector<ClassIndex>{0, 0, 0, 0, 0, 3}, 3), DataError);
}

TEST_CASE("g-mean") {
  CHECK(g_mean(std::vector<double>{1.0, 1.0}) == 1.0);
  CHECK(g_mean(std::vector<double>{0.25, 1.0}) == doctest::Approx(0.5));
  CHECK(g_mean(std::vector<double>{0.5, 0.5, 0.5}) == doctest::Approx(0.5));
  CHECK(g_mean(std::vector<double>{0.9, 0.0}) == 0.0);
  CHECK(g_mean(std::vector<double>{0.2, 0.8, 0.5}) == g_mean(std::vector<double>{0.5, 0.2, 0.8}));
}

TEST_CASE("binary auc") {
  const std::vector<double> s{0.1, 0.4, 0.35, 0.8};
  const std::vector<ClassIndex> y{0, 0, 1, 1};
  CHECK(auc_binary(s, y) == 0.75);
  const std::vector<double> ties{0.5, 0.5, 0.5, 0.5};
  CHECK(auc_binary(ties, y) == 0.5);
  CHECK(auc_binary(s, y, 0) == 0.25);
  CHECK_THROWS_AS(auc_binary(s, std::vector<ClassIndex>{1, 1, 1, 1}), DataError);
}

TEST_CASE("auc agrees with pair counting and is antisymmetric") {
  std::mt19937_64 rng(51);
  std::uniform_int_distribution<int> level(0, 6);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 5 + trial % 30;
    std::vector<double> s(n), neg(n);
    std::vector<ClassIndex> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = level(rng) * 0.25;
      neg[i] = -s[i];
      y[i] = i < 2 ? i : static_cast<ClassIndex>(level(rng) % 2);
    }
    CHECK(auc_binary(s, y) == doctest::Approx(pairwise_auc(s, y)).epsilon(1e-15));
    CHECK(auc_binary(s, y) + auc_binary(neg, y) == 1.0);
  }
}

TEST_CASE("hand and till average") {
  // Reference 59/72 from an independent pairwise computation.
  const std::vector<double> s{0.9, 0.05, 0.05, 0.6, 0.3, 0.1, 0.2, 0.7, 0.1, 0.3, 0.3,
                              0.4, 0.1, 0.2, 0.7, 0.4, 0.4, 0.2, 0.5, 0.1, 0.4};
  const std::vector<ClassIndex> y{0, 0, 1, 1, 2, 2, 1};
  CHECK(avg_auc(s, y, 3) == doctest::Approx(59.0 / 72.0).epsilon(1e-12));

  // Relabelling classes permutes score columns and leaves the value alone.
  const std::vector<std::size_t> perm{2, 0, 1};
  std::vector<double> sp(s.size());
  std::vector<ClassIndex> yp(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    yp[i] = perm[y[i]];
    for (std::size_t j = 0; j < 3; ++j) sp[i * 3 + perm[j]] = s[i * 3 + j];
  }
  CHECK(avg_auc(sp, yp, 3) == doctest::Approx(59.0 / 72.0).epsilon(1e-12));

  const std::vector<ClassIndex> missing{0, 0, 1, 1, 1, 1, 1};
  CHECK_THROWS_AS(avg_auc(s, missing, 3), DataError);
}

TEST_CASE("evaluation report") {
  // Two-class scores: class-1 minus class-0 ranks the instances.
  // Rows 0, 1 of class 0 and rows 2, 3 of class 1; row 2 is misclassified.
  const std::vector<double> scores{1, -1, 0.2, -0.2, 0.3, -0.3, -1, 1};
  const std::vector<ClassIndex> y{0, 0, 1, 1};
  const auto rep = evaluate_scores(scores, y, 2);
  CHECK(rep.confusion == ConfusionMatrix{{2, 0}, {1, 1}});
  CHECK(rep.accuracy == 0.75);
  CHECK(rep.g_mean == doctest::Approx(std::sqrt(0.5)));
  REQUIRE(rep.auc);
  CHECK(*rep.auc == 0.75);
  REQUIRE(rep.avg_auc);
  CHECK(rep.n_test == 4);
  CHECK(rep.warnings.empty());
  std::size_t trace = 0;
  for (std::size_t j = 0; j < 2; ++j) trace += rep.confusion[j][j];
  CHECK(static_cast<double>(trace) / 4.0 == rep.accuracy);
}

TEST_CASE("missing test classes") {
  const std::vector<double> scores{1, -1, -1, 1, -1, -1, -1, 1, -1};
  const std::vector<ClassIndex> y{0, 0, 1};
  const auto rep = evaluate_scores(scores, y, 3);
  CHECK(!rep.avg_auc);
  CHECK(!rep.auc);
  CHECK(!rep.warnings.empty());
  // Classes 0 and 1 are recalled perfectly; class 2 is absent.
  CHECK(rep.g_mean == 1.0);
}

TEST_CASE("perfect model on separable data") {
  const auto ds = fixture::make({{0}, {1}, {5}, {6}}, {0, 0, 1, 1});
  const auto h = train_stump(ds, WeightDistribution::uniform(4));
  const auto e = make_ensemble({h}, {1.0}, ds);
  const auto rep = evaluate(e, ds);
  CHECK(rep.g_mean == 1.0);
  CHECK(rep.accuracy == 1.0);
  CHECK(*rep.auc == 1.0);
}
