#pragma once

// Independent reference implementations used only by tests. None of these
// share code paths with the library routines they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "lexiboost/lp.hpp"

namespace oracle {

using lexiboost::lp::LinearProgram;
using lexiboost::lp::Relation;
using lexiboost::lp::Sense;
using lexiboost::lp::Status;

struct HalfSpace {
  std::vector<double> a;
  double b = 0.0;
  bool equality = false;  // a.x == b, otherwise a.x <= b
};

/// Every row and finite bound as a.x <= b (or equality).
inline std::vector<HalfSpace> halfspaces(const LinearProgram& lp) {
  const auto v = lp.variable_count();
  std::vector<HalfSpace> hs;
  for (const auto& row : lp.constraints) {
    HalfSpace h{row.coeffs, row.rhs, row.relation == Relation::Equal};
    if (row.relation == Relation::GreaterEqual) {
      for (auto& c : h.a) c = -c;
      h.b = -h.b;
    }
    hs.push_back(std::move(h));
  }
  for (std::size_t j = 0; j < v; ++j) {
    if (std::isfinite(lp.lower[j])) {
      HalfSpace h{std::vector<double>(v, 0.0), -lp.lower[j], false};
      h.a[j] = -1.0;
      hs.push_back(std::move(h));
    }
    if (std::isfinite(lp.upper[j])) {
      HalfSpace h{std::vector<double>(v, 0.0), lp.upper[j], false};
      h.a[j] = 1.0;
      hs.push_back(std::move(h));
    }
  }
  return hs;
}

/// Solves the square system A x = b by Gaussian elimination with partial
/// pivoting; nullopt when singular.
inline std::optional<std::vector<double>> solve_square(std::vector<std::vector<double>> a,
                                                       std::vector<double> b) {
  const auto n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
    if (std::abs(a[p][c]) < 1e-10) return std::nullopt;
    std::swap(a[p], a[c]);
    std::swap(b[p], b[c]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
  return x;
}

/// Unit direction spanning the null space of `rows` (n-1 rows, n columns),
/// nullopt unless the rank is exactly n-1.
inline std::optional<std::vector<double>> null_direction(std::vector<std::vector<double>> rows,
                                                         std::size_t n) {
  std::vector<std::size_t> pivot_col;
  std::size_t r = 0;
  for (std::size_t c = 0; c < n && r < rows.size(); ++c) {
    std::size_t p = r;
    for (std::size_t i = r + 1; i < rows.size(); ++i)
      if (std::abs(rows[i][c]) > std::abs(rows[p][c])) p = i;
    if (std::abs(rows[p][c]) < 1e-10) continue;
    std::swap(rows[p], rows[r]);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == r) continue;
      const double f = rows[i][c] / rows[r][c];
      for (std::size_t k = 0; k < n; ++k) rows[i][k] -= f * rows[r][k];
    }
    pivot_col.push_back(c);
    ++r;
  }
  if (pivot_col.size() + 1 != n) return std::nullopt;
  std::size_t free_col = 0;
  while (std::find(pivot_col.begin(), pivot_col.end(), free_col) != pivot_col.end()) ++free_col;
  std::vector<double> d(n, 0.0);
  d[free_col] = 1.0;
  for (std::size_t i = 0; i < pivot_col.size(); ++i)
    d[pivot_col[i]] = -rows[i][free_col] / rows[i][pivot_col[i]];
  double norm = 0.0;
  for (double x : d) norm += x * x;
  norm = std::sqrt(norm);
  for (double& x : d) x /= norm;
  return d;
}

inline void for_each_subset(std::size_t n, std::size_t k,
                            const std::function<void(const std::vector<std::size_t>&)>& fn) {
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  if (k > n) return;
  while (true) {
    fn(idx);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

struct EnumResult {
  Status status = Status::Infeasible;
  double objective = 0.0;
  std::vector<double> point;
};

/// Brute-force LP oracle for small problems whose feasible region is pointed
/// (every variable must have at least one finite bound).
///
/// Optimal value: best objective over all feasible basic points (intersections
/// of n linearly independent constraints). Unboundedness: some extreme ray of
/// the recession cone improves the objective.
inline EnumResult enumerate_lp(const LinearProgram& lp, double tol = 1e-9) {
  const auto n = lp.variable_count();
  const auto hs = halfspaces(lp);
  const double sign = lp.sense == Sense::Maximize ? -1.0 : 1.0;

  auto feasible = [&](const std::vector<double>& x) {
    for (const auto& h : hs) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += h.a[j] * x[j];
      if (h.equality ? std::abs(s - h.b) > tol * (1 + std::abs(h.b)) : s > h.b + tol * (1 + std::abs(h.b)))
        return false;
    }
    return true;
  };

  EnumResult best;
  for_each_subset(hs.size(), n, [&](const std::vector<std::size_t>& pick) {
    std::vector<std::vector<double>> a;
    std::vector<double> b;
    for (auto k : pick) {
      a.push_back(hs[k].a);
      b.push_back(hs[k].b);
    }
    auto x = solve_square(a, b);
    if (!x || !feasible(*x)) return;
    double obj = 0.0;
    for (std::size_t j = 0; j < n; ++j) obj += lp.objective[j] * (*x)[j];
    if (best.status != Status::Optimal || sign * obj < sign * best.objective) {
      best.status = Status::Optimal;
      best.objective = obj;
      best.point = *x;
    }
  });
  if (best.status != Status::Optimal) return best;

  // Recession cone: a.d <= 0 (== 0 for equalities).
  auto in_cone = [&](const std::vector<double>& d) {
    for (const auto& h : hs) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += h.a[j] * d[j];
      if (h.equality ? std::abs(s) > 1e-9 : s > 1e-9) return false;
    }
    return true;
  };
  bool unbounded = false;
  auto try_direction = [&](const std::vector<double>& d) {
    if (!in_cone(d)) return;
    double slope = 0.0;
    for (std::size_t j = 0; j < n; ++j) slope += lp.objective[j] * d[j];
    if (sign * slope < -1e-9) unbounded = true;
  };
  if (n == 1) {
    try_direction({1.0});
    try_direction({-1.0});
  } else {
    for_each_subset(hs.size(), n - 1, [&](const std::vector<std::size_t>& pick) {
      if (unbounded) return;
      std::vector<std::vector<double>> rows;
      for (auto k : pick) rows.push_back(hs[k].a);
      auto d = null_direction(rows, n);
      if (!d) return;
      try_direction(*d);
      for (double& x : *d) x = -x;
      try_direction(*d);
    });
  }
  if (unbounded) best.status = Status::Unbounded;
  return best;
}

/// Random LP with integer data in [-5, 5], at most `max_vars` variables and
/// `max_rows` rows. Variables are >= 0, some with an integer upper bound.
inline LinearProgram random_small_lp(std::mt19937_64& rng, std::size_t max_vars,
                                     std::size_t max_rows) {
  std::uniform_int_distribution<int> coef(-5, 5);
  std::uniform_int_distribution<std::size_t> nv(1, max_vars), nr(1, max_rows);
  std::uniform_int_distribution<int> rel(0, 5), coin(0, 3), ub(1, 6);
  LinearProgram lp;
  lp.sense = coin(rng) == 0 ? Sense::Maximize : Sense::Minimize;
  const auto v = nv(rng);
  for (std::size_t j = 0; j < v; ++j) {
    const double hi = coin(rng) == 0 ? static_cast<double>(ub(rng)) : lexiboost::lp::kInf;
    lp.add_variable(coef(rng), 0.0, hi);
  }
  const auto rows = nr(rng);
  for (std::size_t k = 0; k < rows; ++k) {
    std::vector<double> a(v);
    for (auto& x : a) x = coef(rng);
    const int r = rel(rng);
    const Relation relation = r <= 2 ? Relation::LessEqual : r <= 4 ? Relation::GreaterEqual : Relation::Equal;
    lp.add_constraint(std::move(a), relation, coef(rng));
  }
  return lp;
}

/// min over a 1-D grid of f(x) for x in [lo, hi].
template <typename F>
double grid_min(F&& f, double lo, double hi, std::size_t steps, double* argmin = nullptr) {
  double best = f(lo), best_x = lo;
  for (std::size_t s = 1; s <= steps; ++s) {
    const double x = lo + (hi - lo) * static_cast<double>(s) / static_cast<double>(steps);
    const double v = f(x);
    if (v < best) {
      best = v;
      best_x = x;
    }
  }
  if (argmin) *argmin = best_x;
  return best;
}

} // namespace oracle
