#include "lexiboost/dual_lexiboost.hpp"

#include <algorithm>
#include <cstdint>
#include <exception>
#include <numeric>

#include "lexiboost/error.hpp"
#include "lexiboost/lp.hpp"

namespace lexiboost {

namespace {

std::vector<double> class_caps(const MarginMatrix& mm) {
  const auto sizes = mm.class_sizes();
  std::vector<double> caps(mm.rows());
  for (std::size_t i = 0; i < mm.rows(); ++i) caps[i] = 1.0 / static_cast<double>(sizes[mm.class_of(i)]);
  return caps;
}

void add_margin_rows(lp::LinearProgram& prog, const MarginMatrix& mm, std::size_t s) {
  for (std::size_t t = 0; t < mm.cols(); ++t) {
    std::vector<double> row(prog.variable_count(), 0.0);
    for (std::size_t i = 0; i < mm.rows(); ++i) row[i] = mm(i, t);
    row[s] = -1.0;
    prog.add_constraint(std::move(row), lp::Relation::LessEqual, 0.0);
  }
  std::vector<double> sum(prog.variable_count(), 0.0);
  std::fill(sum.begin(), sum.begin() + static_cast<std::ptrdiff_t>(mm.rows()), 1.0);
  prog.add_constraint(std::move(sum), lp::Relation::Equal, 1.0);
}

/// Clamps into [0, upper] and rescales to sum 1.
std::vector<double> clean_distribution(std::vector<double> w, std::span<const double> upper) {
  double total = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = std::clamp(w[i], 0.0, upper[i]);
    total += w[i];
  }
  if (!(total > 0.0)) throw SolverError("instance-weight LP returned no mass");
  for (double& x : w) x /= total;
  return w;
}

MarginMatrix append(const MarginMatrix& mm, const std::vector<double>& col, const Dataset& ds) {
  if (mm.cols() == 0) return MarginMatrix(ds.size(), 1, col, ds.labels(), ds.class_count());
  return mm.with_column(col);
}

std::vector<double> uniform_caps(const Dataset& ds) {
  std::vector<double> caps(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i)
    caps[i] = 1.0 / static_cast<double>(ds.class_size(ds.label(i)));
  return caps;
}

} // namespace

PPrimeSolution solve_pprime(const MarginMatrix& mm, ClassIndex j) {
  if (mm.cols() == 0) throw DataError("margin matrix has no components");
  if (j >= mm.class_count()) throw DataError("class index out of range");
  const auto caps = class_caps(mm);
  lp::LinearProgram prog;
  prog.sense = lp::Sense::Maximize;
  for (std::size_t i = 0; i < mm.rows(); ++i) prog.add_variable(mm.class_of(i) == j ? 1.0 : 0.0, 0.0, caps[i]);
  const auto s = prog.add_variable(-1.0, -lp::kInf, lp::kInf);
  add_margin_rows(prog, mm, s);

  const auto sol = lp::solve(prog);
  if (!sol.optimal())
    throw SolverError("per-class weight LP for class " + std::to_string(j) + " failed (" +
                      lp::to_string(sol.status) + ")");
  PPrimeSolution out;
  out.weights.assign(sol.point.begin(), sol.point.begin() + static_cast<std::ptrdiff_t>(mm.rows()));
  out.s = sol.point[s];
  out.objective = sol.objective;
  return out;
}

QPrimeSolution solve_qprime(const MarginMatrix& mm, std::span<const double> references) {
  if (mm.cols() == 0) throw DataError("margin matrix has no components");
  const auto classes = mm.class_count(), n = mm.rows();
  if (references.size() != classes) throw DataError("need one reference loss per class");
  const auto sizes = mm.class_sizes();

  lp::LinearProgram prog;
  prog.sense = lp::Sense::Maximize;
  for (std::size_t i = 0; i < n; ++i) prog.add_variable(1.0);
  for (ClassIndex j = 0; j < classes; ++j) prog.add_variable(-references[j]);
  const auto s = prog.add_variable(-1.0, -lp::kInf, lp::kInf);
  add_margin_rows(prog, mm, s);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> row(prog.variable_count(), 0.0);
    row[i] = 1.0;
    row[n + mm.class_of(i)] = -1.0 / static_cast<double>(sizes[mm.class_of(i)]);
    prog.add_constraint(std::move(row), lp::Relation::LessEqual, 0.0);
  }
  std::vector<double> dsum(prog.variable_count(), 0.0);
  for (ClassIndex j = 0; j < classes; ++j) dsum[n + j] = 1.0;
  prog.add_constraint(std::move(dsum), lp::Relation::LessEqual, 1.0);

  const auto sol = lp::solve(prog);
  if (!sol.optimal()) throw SolverError("balancing weight LP failed (" + lp::to_string(sol.status) + ")");
  QPrimeSolution out;
  out.weights.assign(sol.point.begin(), sol.point.begin() + static_cast<std::ptrdiff_t>(n));
  out.d.assign(sol.point.begin() + static_cast<std::ptrdiff_t>(n),
               sol.point.begin() + static_cast<std::ptrdiff_t>(n + classes));
  for (double& x : out.d) x = std::max(x, 0.0);
  out.s = sol.point[s];
  out.objective = sol.objective;
  return out;
}

std::vector<double> assemble_class_weights(const std::vector<std::vector<double>>& candidates,
                                           std::span<const ClassIndex> class_of) {
  const auto n = class_of.size();
  std::vector<std::size_t> sizes(candidates.size(), 0);
  for (auto c : class_of) {
    if (c >= candidates.size()) throw DataError("class index out of range");
    ++sizes[c];
  }
  std::vector<double> w(n), caps(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (candidates[class_of[i]].size() != n) throw DataError("candidate length mismatch");
    caps[i] = 1.0 / static_cast<double>(sizes[class_of[i]]);
    w[i] = std::clamp(candidates[class_of[i]][i], 0.0, caps[i]);
    total += w[i];
  }
  if (total >= 1.0) {
    for (double& x : w) x /= total;
    return w;
  }

  // Water-filling: find theta with sum_i min(cap_i, theta w_i) = 1.
  std::vector<std::size_t> positive;
  double positive_caps = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    if (w[i] > 0.0) {
      positive.push_back(i);
      positive_caps += caps[i];
    }
  if (positive_caps < 1.0) {
    // Saturate the supported entries, spread the rest over the others.
    double zero_caps = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (w[i] > 0.0) w[i] = caps[i];
      else zero_caps += caps[i];
    const double rate = (1.0 - positive_caps) / zero_caps;
    for (std::size_t i = 0; i < n; ++i)
      if (w[i] == 0.0) w[i] = rate * caps[i];
    return w;
  }
  std::sort(positive.begin(), positive.end(), [&](std::size_t a, std::size_t b) {
    return caps[a] / w[a] < caps[b] / w[b] || (caps[a] / w[a] == caps[b] / w[b] && a < b);
  });
  double capped = 0.0, free_mass = total, theta = 1.0;
  for (auto i : positive) {
    theta = (1.0 - capped) / free_mass;
    if (theta * w[i] <= caps[i]) break;
    capped += caps[i];
    free_mass -= w[i];
  }
  for (auto i : positive) w[i] = std::min(caps[i], theta * w[i]);
  const double sum = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& x : w) x /= sum;
  return w;
}

double DualLexiConfig::error_threshold(std::size_t class_count) const {
  const double c = static_cast<double>(class_count);
  return chance_threshold ? 1.0 - 1.0 / c : 1.0 / c;
}

DualLexiResult train_dual_lexiboost(const Dataset& ds, const DualLexiConfig& cfg) {
  if (ds.class_count() < 2) throw UsageError("training needs at least two classes");
  if (cfg.rounds < 1) throw UsageError("number of rounds must be at least 1");
  const auto classes = ds.class_count();
  const double threshold = cfg.error_threshold(classes);
  const auto base_caps = uniform_caps(ds);
  DualLexiResult out;

  // Phase A: per-class weight LPs drive the component sequence.
  std::vector<WeakHypothesis> phase_a;
  MarginMatrix mm_a;
  {
    auto d = WeightDistribution::class_balanced(ds);
    out.distributions.push_back({'A', 0, {d.values().begin(), d.values().end()}, base_caps});
    for (std::size_t t = 1; t <= cfg.rounds; ++t) {
      auto h = train_weak(ds, d, cfg.learner);
      const auto pred = h.predict_classes(ds, true);
      const double err = weighted_error(pred, ds, d);
      DualLexiRound rec{'A', t, err, err <= threshold, 0.0, {}};
      if (!rec.kept) {
        if (phase_a.empty()) {
          out.warnings.push_back("first component of the per-class phase is above the error threshold; "
                                 "keeping it alone");
          phase_a.push_back(std::move(h));
          mm_a = append(mm_a, margin_column(pred, ds, cfg.margin), ds);
        }
        out.rounds.push_back(rec);
        break;
      }
      phase_a.push_back(std::move(h));
      mm_a = append(mm_a, margin_column(pred, ds, cfg.margin), ds);

      std::vector<std::vector<double>> candidates(classes);
      std::vector<double> s_values(classes);
      std::vector<std::exception_ptr> failures(classes);
      const auto cls = static_cast<std::int64_t>(classes);
#pragma omp parallel for schedule(dynamic)
      for (std::int64_t j = 0; j < cls; ++j) {
        try {
          auto sol = solve_pprime(mm_a, static_cast<ClassIndex>(j));
          candidates[j] = std::move(sol.weights);
          s_values[j] = sol.s;
        } catch (...) {
          failures[j] = std::current_exception();
        }
      }
      for (auto& f : failures)
        if (f) std::rethrow_exception(f);
      rec.s = std::accumulate(s_values.begin(), s_values.end(), 0.0) / static_cast<double>(classes);
      out.rounds.push_back(rec);
      auto next = assemble_class_weights(candidates, ds.labels());
      out.distributions.push_back({'A', t, next, base_caps});
      d = WeightDistribution(std::move(next));
    }
  }
  out.phase_a_components = phase_a.size();

  // Phase B: reference losses on the Phase-A components.
  out.stage1 = solve_stage1_all(mm_a);
  const auto refs = out.stage1.references();

  // Phase C: new components under the balancing weight LP.
  std::vector<WeakHypothesis> phase_c;
  MarginMatrix mm_c;
  {
    auto d = WeightDistribution::class_balanced(ds);
    out.distributions.push_back({'C', 0, {d.values().begin(), d.values().end()}, base_caps});
    for (std::size_t t = 1; t <= cfg.rounds; ++t) {
      auto h = train_weak(ds, d, cfg.learner);
      const auto pred = h.predict_classes(ds, true);
      const double err = weighted_error(pred, ds, d);
      DualLexiRound rec{'C', t, err, err <= threshold, 0.0, {}};
      if (!rec.kept) {
        if (phase_c.empty()) {
          out.warnings.push_back("first component of the balancing phase is above the error threshold; "
                                 "keeping it alone");
          phase_c.push_back(std::move(h));
          mm_c = append(mm_c, margin_column(pred, ds, cfg.margin), ds);
        }
        out.rounds.push_back(rec);
        break;
      }
      phase_c.push_back(std::move(h));
      mm_c = append(mm_c, margin_column(pred, ds, cfg.margin), ds);

      auto sol = solve_qprime(mm_c, refs);
      rec.s = sol.s;
      rec.d = sol.d;
      out.rounds.push_back(rec);
      std::vector<double> upper(ds.size());
      for (std::size_t i = 0; i < ds.size(); ++i) upper[i] = sol.d[ds.label(i)] * base_caps[i];
      auto next = clean_distribution(std::move(sol.weights), upper);
      out.distributions.push_back({'C', t, next, upper});
      d = WeightDistribution(std::move(next));
    }
  }

  // Phase D: balancing LP on the Phase-C components.
  out.stage2 = solve_stage2(mm_c, refs);
  out.ensemble = make_ensemble(std::move(phase_c), out.stage2.alpha, ds);
  return out;
}

} // namespace lexiboost
