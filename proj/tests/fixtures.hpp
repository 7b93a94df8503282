#pragma once

#include <random>
#include <string>
#include <vector>

#include "lexiboost/data.hpp"
#include "lexiboost/ensemble.hpp"

namespace fixture {

using lexiboost::ClassIndex;

inline lexiboost::Dataset make(std::vector<std::vector<double>> rows, std::vector<ClassIndex> labels,
                               std::size_t classes = 2, bool allow_empty = false) {
  std::vector<double> flat;
  for (auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
  std::vector<std::string> names;
  for (std::size_t j = 0; j < classes; ++j) names.push_back("c" + std::to_string(j));
  return lexiboost::Dataset(std::move(flat), rows.front().size(), std::move(labels), std::move(names),
                            allow_empty);
}

/// Entries in {-1, +1}; every class gets at least one row.
inline lexiboost::MarginMatrix random_margins(std::mt19937_64& rng, std::size_t rows, std::size_t cols,
                                              std::size_t classes = 2) {
  std::bernoulli_distribution coin(0.5);
  std::uniform_int_distribution<std::size_t> pick(0, classes - 1);
  std::vector<double> v(rows * cols);
  for (double& x : v) x = coin(rng) ? 1.0 : -1.0;
  std::vector<ClassIndex> cls(rows);
  for (std::size_t i = 0; i < rows; ++i) cls[i] = i < classes ? i : pick(rng);
  return {rows, cols, std::move(v), std::move(cls), classes};
}

/// One point per class, two components that each get exactly one right.
inline lexiboost::MarginMatrix symmetric_toy() { return {2, 2, {1.0, -1.0, -1.0, 1.0}, {0, 1}, 2}; }

} // namespace fixture
