#include "lexiboost/lexiboost.hpp"

#include <algorithm>
#include <cstdint>
#include <exception>

#include "lexiboost/error.hpp"
#include "lexiboost/lp.hpp"

namespace lexiboost {

namespace {

std::vector<double> simplex_weights(const std::vector<double>& point, std::size_t count) {
  std::vector<double> alpha(point.begin(), point.begin() + static_cast<std::ptrdiff_t>(count));
  double total = 0.0;
  for (double& a : alpha) {
    a = std::max(a, 0.0);
    total += a;
  }
  for (double& a : alpha) a /= total;
  return alpha;
}

void add_simplex_row(lp::LinearProgram& prog, std::size_t cols) {
  std::vector<double> sum(prog.variable_count(), 0.0);
  std::fill(sum.begin(), sum.begin() + static_cast<std::ptrdiff_t>(cols), 1.0);
  prog.add_constraint(std::move(sum), lp::Relation::Equal, 1.0);
}

/// Row: sum_t alpha_t m[i][t] + lambda >= 1.
void add_hinge_row(lp::LinearProgram& prog, const MarginMatrix& mm, std::size_t i, std::size_t lambda) {
  std::vector<double> row(prog.variable_count(), 0.0);
  const auto m = mm.row(i);
  std::copy(m.begin(), m.end(), row.begin());
  row[lambda] = 1.0;
  prog.add_constraint(std::move(row), lp::Relation::GreaterEqual, 1.0);
}

} // namespace

std::vector<double> StageOneResult::references() const {
  std::vector<double> r;
  for (const auto& c : classes) r.push_back(c.average);
  return r;
}

ClassStageOne solve_stage1(const MarginMatrix& mm, ClassIndex j) {
  if (mm.cols() == 0) throw DataError("margin matrix has no components");
  if (j >= mm.class_count()) throw DataError("class index out of range");
  ClassStageOne out;
  out.cls = j;
  out.rows = mm.class_rows(j);
  if (out.rows.empty()) throw DataError("class " + std::to_string(j) + " has no rows");
  const auto cols = mm.cols();
  const double inv = 1.0 / static_cast<double>(out.rows.size());

  lp::LinearProgram prog;
  for (std::size_t t = 0; t < cols; ++t) prog.add_variable(0.0);
  for (std::size_t r = 0; r < out.rows.size(); ++r) prog.add_variable(inv);
  for (std::size_t r = 0; r < out.rows.size(); ++r) add_hinge_row(prog, mm, out.rows[r], cols + r);
  add_simplex_row(prog, cols);

  const auto sol = lp::solve(prog);
  if (!sol.optimal())
    throw SolverError("stage-1 LP for class " + std::to_string(j) + " failed (" + lp::to_string(sol.status) + ")");
  out.alpha = simplex_weights(sol.point, cols);
  double total = 0.0;
  for (auto i : out.rows) {
    const double loss = hinge_loss(margin(out.alpha, mm.row(i)));
    out.losses.push_back(loss);
    total += loss;
  }
  out.average = total * inv;
  return out;
}

StageOneResult solve_stage1_all(const MarginMatrix& mm) {
  const auto classes = static_cast<std::int64_t>(mm.class_count());
  StageOneResult out;
  out.classes.resize(mm.class_count());
  std::vector<std::exception_ptr> failures(mm.class_count());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t j = 0; j < classes; ++j) {
    try {
      out.classes[j] = solve_stage1(mm, static_cast<ClassIndex>(j));
    } catch (...) {
      failures[j] = std::current_exception();
    }
  }
  for (auto& f : failures)
    if (f) std::rethrow_exception(f);
  return out;
}

StageTwoResult solve_stage2(const MarginMatrix& mm, std::span<const double> references,
                            std::span<const double> costs) {
  const auto classes = mm.class_count();
  if (mm.cols() == 0) throw DataError("margin matrix has no components");
  if (references.size() != classes) throw DataError("need one reference loss per class");
  if (!costs.empty() && costs.size() != classes) throw UsageError("need one cost per class");
  for (double c : costs)
    if (!(c > 0.0)) throw UsageError("class costs must be positive");
  const auto sizes = mm.class_sizes();
  for (auto s : sizes)
    if (s == 0) throw DataError("every class needs at least one row");
  const auto cols = mm.cols(), n = mm.rows();

  lp::LinearProgram prog;
  for (std::size_t t = 0; t < cols; ++t) prog.add_variable(0.0);
  for (std::size_t i = 0; i < n; ++i) prog.add_variable(0.0);
  const auto chi = prog.add_variable(1.0);
  for (ClassIndex j = 0; j < classes; ++j) {
    const double c = costs.empty() ? 1.0 : costs[j];
    const double scale = c / static_cast<double>(sizes[j]);
    std::vector<double> row(prog.variable_count(), 0.0);
    for (std::size_t i = 0; i < n; ++i)
      if (mm.class_of(i) == j) row[cols + i] = scale;
    row[chi] = -1.0;
    prog.add_constraint(std::move(row), lp::Relation::LessEqual, c * references[j]);
  }
  for (std::size_t i = 0; i < n; ++i) add_hinge_row(prog, mm, i, cols + i);
  add_simplex_row(prog, cols);

  const auto sol = lp::solve(prog);
  if (!sol.optimal()) throw SolverError("stage-2 LP failed (" + lp::to_string(sol.status) + ")");
  StageTwoResult out;
  out.alpha = simplex_weights(sol.point, cols);
  out.chi = sol.point[chi];
  out.losses.resize(n);
  out.achieved.assign(classes, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    out.losses[i] = hinge_loss(margin(out.alpha, mm.row(i)));
    out.achieved[mm.class_of(i)] += out.losses[i];
  }
  for (ClassIndex j = 0; j < classes; ++j) out.achieved[j] /= static_cast<double>(sizes[j]);
  return out;
}

StageTwoResult solve_stage2(const MarginMatrix& mm, const StageOneResult& stage1,
                            std::span<const double> costs) {
  const auto refs = stage1.references();
  return solve_stage2(mm, refs, costs);
}

LexiBoostResult train_lexiboost(const Dataset& ds, const LearnerConfig& learner, std::size_t rounds,
                                const MarginOptions& margin_opts, std::span<const double> costs) {
  LexiBoostResult out;
  out.boosting = ds.class_count() == 2 ? run_adaboost(ds, learner, rounds)
                                       : run_adaboost_multiclass(ds, learner, rounds);
  out.warnings = out.boosting.warnings;
  if (out.boosting.components.size() < 2)
    out.warnings.push_back("boosting produced a single component; its weight is fixed at 1");

  const auto mm = margin_matrix(out.boosting.components, ds, /*in_sample=*/true, margin_opts);
  out.stage1 = solve_stage1_all(mm);
  out.stage2 = solve_stage2(mm, out.stage1, costs);
  out.ensemble = make_ensemble(out.boosting.components, out.stage2.alpha, ds);
  return out;
}

} // namespace lexiboost
