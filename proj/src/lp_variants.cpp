#include "lexiboost/lp_variants.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lexiboost/error.hpp"

namespace lexiboost {

namespace {

void require_optimal(const lp::LpSolution& sol, const char* what) {
  if (!sol.optimal())
    throw SolverError(std::string(what) + " LP did not reach an optimum (" + lp::to_string(sol.status) + ")");
}

void require_columns(const MarginMatrix& mm) {
  if (mm.rows() == 0 || mm.cols() == 0) throw DataError("margin matrix is empty");
}

std::vector<double> simplex_part(const std::vector<double>& point, std::size_t count) {
  std::vector<double> alpha(point.begin(), point.begin() + static_cast<std::ptrdiff_t>(count));
  double total = 0.0;
  for (double& a : alpha) {
    a = std::max(a, 0.0);
    total += a;
  }
  for (double& a : alpha) a /= total;
  return alpha;
}

SoftMarginResult soft_margin(const MarginMatrix& mm, const std::vector<double>& slack_cost) {
  require_columns(mm);
  const auto n = mm.rows(), cols = mm.cols();
  lp::LinearProgram prog;
  for (std::size_t t = 0; t < cols; ++t) prog.add_variable(0.0);
  const auto rho = prog.add_variable(-1.0, -1.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) prog.add_variable(slack_cost[i]);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> row(prog.variable_count(), 0.0);
    const auto m = mm.row(i);
    std::copy(m.begin(), m.end(), row.begin());
    row[rho] = -1.0;
    row[rho + 1 + i] = 1.0;
    prog.add_constraint(std::move(row), lp::Relation::GreaterEqual, 0.0);
  }
  std::vector<double> sum(prog.variable_count(), 0.0);
  std::fill(sum.begin(), sum.begin() + static_cast<std::ptrdiff_t>(cols), 1.0);
  prog.add_constraint(std::move(sum), lp::Relation::Equal, 1.0);

  const auto sol = lp::solve(prog);
  require_optimal(sol, "soft-margin");
  SoftMarginResult out;
  out.alpha = simplex_part(sol.point, cols);
  out.rho = sol.point[rho];
  const auto rhos = margins(mm, out.alpha);
  out.xi.resize(n);
  out.objective = -out.rho;
  for (std::size_t i = 0; i < n; ++i) {
    out.xi[i] = std::max(0.0, out.rho - rhos[i]);
    out.objective += slack_cost[i] * out.xi[i];
  }
  return out;
}

std::string format_triple(double cost, double beta, double divisor) {
  std::ostringstream s;
  s << "(D=" << cost << ", beta=" << beta << ", D_LB=" << divisor << ")";
  return s.str();
}

DualTrainResult column_generation(const Dataset& ds, const LpVariantConfig& cfg,
                                  const WeightBounds& bounds, bool hard_margin) {
  DualTrainResult out;
  auto d = WeightDistribution::uniform(ds.size());
  std::vector<WeakHypothesis> components;
  MarginMatrix mm;
  std::vector<double> alpha;
  double previous_s = 0.0;

  for (std::size_t t = 0; t < cfg.rounds; ++t) {
    auto h = train_weak(ds, d, cfg.learner);
    const auto col = margin_column(h.predict_classes(ds, true), ds, cfg.margin);
    double edge = 0.0;
    for (std::size_t i = 0; i < ds.size(); ++i) edge += d[i] * col[i];
    if (t > 0 && edge <= previous_s + cfg.tolerance) break;

    components.push_back(std::move(h));
    mm = t == 0 ? MarginMatrix(ds.size(), 1, col, ds.labels(), ds.class_count()) : mm.with_column(col);
    auto sol = solve_dual_weights(mm, bounds.lower, bounds.upper);
    out.rounds.push_back({edge, sol.s, sol.weights});
    alpha = std::move(sol.alpha);
    previous_s = sol.s;
    for (double& w : sol.weights) w = std::max(w, 0.0);
    d = WeightDistribution::normalized(std::move(sol.weights));
  }

  if (hard_margin) {
    auto res = lp_adaboost_weights(mm);
    alpha = std::move(res.alpha);
    out.rho = res.rho;
  }
  out.ensemble = make_ensemble(std::move(components), std::move(alpha), ds);
  return out;
}

} // namespace

void LpVariantConfig::validate() const {
  if (!(cost > 0.0) || !std::isfinite(cost)) throw UsageError("regularisation cost D must be positive");
  if (!(beta >= 1.0) || !std::isfinite(beta)) throw UsageError("beta must be at least 1");
  if (!(lower_divisor >= 1.0)) throw UsageError("D_LB must be at least 1 (or infinite)");
  if (rounds < 1) throw UsageError("number of rounds must be at least 1");
}

HardMarginResult lp_adaboost_weights(const MarginMatrix& mm) {
  require_columns(mm);
  const auto cols = mm.cols();
  lp::LinearProgram prog;
  prog.sense = lp::Sense::Maximize;
  for (std::size_t t = 0; t < cols; ++t) prog.add_variable(0.0);
  const auto rho = prog.add_variable(1.0, -lp::kInf, lp::kInf);
  for (std::size_t i = 0; i < mm.rows(); ++i) {
    std::vector<double> row(cols + 1);
    const auto m = mm.row(i);
    std::copy(m.begin(), m.end(), row.begin());
    row[rho] = -1.0;
    prog.add_constraint(std::move(row), lp::Relation::GreaterEqual, 0.0);
  }
  std::vector<double> sum(cols + 1, 1.0);
  sum[rho] = 0.0;
  prog.add_constraint(std::move(sum), lp::Relation::Equal, 1.0);

  const auto sol = lp::solve(prog);
  require_optimal(sol, "hard-margin");
  return {simplex_part(sol.point, cols), sol.point[rho]};
}

SoftMarginResult lp_boost_weights(const MarginMatrix& mm, double cost) {
  if (!(cost > 0.0)) throw UsageError("regularisation cost D must be positive");
  const double c = cost / static_cast<double>(mm.rows());
  return soft_margin(mm, std::vector<double>(mm.rows(), c));
}

SoftMarginResult lpu_boost_weights(const MarginMatrix& mm, double cost, double beta,
                                   ClassIndex target_class) {
  if (mm.class_count() != 2) throw UsageError("LPUBoost is defined for two-class data only");
  if (!(cost > 0.0)) throw UsageError("regularisation cost D must be positive");
  if (!(beta >= 1.0)) throw UsageError("beta must be at least 1");
  if (target_class >= 2) throw UsageError("target class out of range");
  const double c = cost / static_cast<double>(mm.rows());
  std::vector<double> slack_cost(mm.rows());
  for (std::size_t i = 0; i < mm.rows(); ++i) slack_cost[i] = mm.class_of(i) == target_class ? beta * c : c;
  return soft_margin(mm, slack_cost);
}

WeightBounds dual_weight_bounds(std::span<const ClassIndex> class_of, double cost, double beta,
                                double lower_divisor, ClassIndex target_class) {
  const auto n = class_of.size();
  const double c = cost / static_cast<double>(n);
  WeightBounds b{std::vector<double>(n), std::vector<double>(n)};
  double lo_total = 0.0, hi_total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    b.upper[i] = class_of[i] == target_class ? beta * c : c;
    b.lower[i] = std::isinf(lower_divisor) ? 0.0 : b.upper[i] / lower_divisor;
    lo_total += b.lower[i];
    hi_total += b.upper[i];
  }
  if (lo_total > 1.0 + lp::kFeasTol || hi_total < 1.0 - lp::kFeasTol)
    throw UsageError("instance-weight bounds admit no distribution for " +
                     format_triple(cost, beta, lower_divisor));
  return b;
}

DualSolution solve_dual_weights(const MarginMatrix& mm, std::span<const double> lower,
                                std::span<const double> upper) {
  require_columns(mm);
  const auto n = mm.rows(), cols = mm.cols();
  lp::LinearProgram prog;
  for (std::size_t i = 0; i < n; ++i)
    prog.add_variable(0.0, lower.empty() ? 0.0 : lower[i], upper.empty() ? lp::kInf : upper[i]);
  const auto s = prog.add_variable(1.0, -lp::kInf, lp::kInf);
  for (std::size_t t = 0; t < cols; ++t) {
    std::vector<double> row(n + 1);
    for (std::size_t i = 0; i < n; ++i) row[i] = mm(i, t);
    row[s] = -1.0;
    prog.add_constraint(std::move(row), lp::Relation::LessEqual, 0.0);
  }
  std::vector<double> sum(n + 1, 1.0);
  sum[s] = 0.0;
  prog.add_constraint(std::move(sum), lp::Relation::Equal, 1.0);

  const auto sol = lp::solve(prog);
  require_optimal(sol, "instance-weight");
  DualSolution out;
  out.weights.assign(sol.point.begin(), sol.point.begin() + static_cast<std::ptrdiff_t>(n));
  out.s = sol.point[s];
  out.alpha.resize(cols);
  double total = 0.0;
  for (std::size_t t = 0; t < cols; ++t) {
    out.alpha[t] = std::max(0.0, -sol.duals[t]);
    total += out.alpha[t];
  }
  if (total > 0.0) {
    for (double& a : out.alpha) a /= total;
  } else {
    std::fill(out.alpha.begin(), out.alpha.end(), 1.0 / static_cast<double>(cols));
  }
  return out;
}

DualTrainResult dual_lp_adaboost_train(const Dataset& ds, const LpVariantConfig& cfg) {
  cfg.validate();
  return column_generation(ds, cfg, {}, /*hard_margin=*/true);
}

DualTrainResult dual_lpu_boost_train(const Dataset& ds, const LpVariantConfig& cfg) {
  cfg.validate();
  if (ds.class_count() != 2) throw UsageError("Dual-LPUBoost is defined for two-class data only");
  if (cfg.target_class >= 2) throw UsageError("target class out of range");
  const auto bounds =
      dual_weight_bounds(ds.labels(), cfg.cost, cfg.beta, cfg.lower_divisor, cfg.target_class);
  return column_generation(ds, cfg, bounds, /*hard_margin=*/false);
}

DualTrainResult dual_lp_boost_train(const Dataset& ds, const LpVariantConfig& cfg) {
  auto plain = cfg;
  plain.beta = 1.0;
  plain.lower_divisor = lp::kInf;
  plain.validate();
  const auto bounds = dual_weight_bounds(ds.labels(), plain.cost, 1.0, lp::kInf, 0);
  return column_generation(ds, plain, bounds, /*hard_margin=*/false);
}

} // namespace lexiboost
