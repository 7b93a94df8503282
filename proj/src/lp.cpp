#include "lexiboost/lp.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "lexiboost/error.hpp"
#include "lexiboost/kernels.hpp"

namespace lexiboost::lp {

std::string to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
    case Status::IterationLimit: return "iteration_limit";
    case Status::NumericalTrouble: return "numerical_trouble";
  }
  return "unknown";
}

std::size_t LinearProgram::add_variable(double cost, double lo, double hi) {
  objective.push_back(cost);
  lower.push_back(lo);
  upper.push_back(hi);
  for (auto& row : constraints) row.coeffs.push_back(0.0);
  return objective.size() - 1;
}

void LinearProgram::add_constraint(std::vector<double> coeffs, Relation rel, double rhs) {
  if (coeffs.size() != variable_count())
    throw SolverError("constraint width " + std::to_string(coeffs.size()) + " != " +
                      std::to_string(variable_count()) + " variables");
  constraints.push_back({std::move(coeffs), rel, rhs});
}

void LinearProgram::validate() const {
  const auto v = variable_count();
  if (lower.size() != v || upper.size() != v) throw SolverError("bound vectors have wrong length");
  for (std::size_t j = 0; j < v; ++j) {
    if (!std::isfinite(objective[j])) throw SolverError("non-finite objective coefficient");
    if (std::isnan(lower[j]) || std::isnan(upper[j]) || lower[j] > upper[j] ||
        lower[j] == kInf || upper[j] == -kInf)
      throw SolverError("invalid bounds on variable " + std::to_string(j));
  }
  for (std::size_t k = 0; k < constraints.size(); ++k) {
    const auto& row = constraints[k];
    if (row.coeffs.size() != v) throw SolverError("row " + std::to_string(k) + " has wrong width");
    if (!std::isfinite(row.rhs)) throw SolverError("non-finite rhs in row " + std::to_string(k));
    for (double a : row.coeffs)
      if (!std::isfinite(a)) throw SolverError("non-finite coefficient in row " + std::to_string(k));
  }
}

bool check_feasible(const LinearProgram& lp, std::span<const double> point, double tol) {
  if (point.size() != lp.variable_count()) return false;
  for (std::size_t j = 0; j < point.size(); ++j) {
    if (point[j] < lp.lower[j] - tol || point[j] > lp.upper[j] + tol) return false;
  }
  for (const auto& row : lp.constraints) {
    double lhs = 0.0;
    for (std::size_t j = 0; j < point.size(); ++j) lhs += row.coeffs[j] * point[j];
    switch (row.relation) {
      case Relation::LessEqual:
        if (lhs > row.rhs + tol) return false;
        break;
      case Relation::GreaterEqual:
        if (lhs < row.rhs - tol) return false;
        break;
      case Relation::Equal:
        if (std::abs(lhs - row.rhs) > tol) return false;
        break;
    }
  }
  return true;
}

namespace {

enum class VarState { Basic, AtLower, AtUpper, Free };

constexpr double kReducedCostTol = 1e-9;
constexpr double kRatioTieTol = 1e-12;
constexpr double kDegenerateStep = 1e-12;

/// Dense bounded-variable simplex state.
///
/// Columns: [0, V) structural, [V, V+m) one slack per row (coefficient +1),
/// then one artificial per row that needed it. Row m of the tableau holds the
/// reduced costs of the current phase.
class Tableau {
public:
  Tableau(const LinearProgram& lp, const SolveOptions& opts) : lp_(lp), opts_(opts) {
    m_ = lp.row_count();
    v_ = lp.variable_count();
    build();
  }

  LpSolution run() {
    LpSolution sol;
    if (!artificials_.empty()) {
      std::vector<double> phase1(n_, 0.0);
      for (auto a : artificials_) phase1[a] = 1.0;
      set_costs(phase1);
      const auto st = iterate(sol.iterations);
      if (st != Status::Optimal) {
        sol.status = st == Status::Unbounded ? Status::NumericalTrouble : st;
        return sol;
      }
      refresh_basic_values();
      double infeasibility = 0.0;
      for (auto a : artificials_) infeasibility += std::abs(x_[a]);
      if (infeasibility > kFeasTol) {
        sol.status = Status::Infeasible;
        return sol;
      }
      retire_artificials();
    }

    std::vector<double> phase2(n_, 0.0);
    const double sign = lp_.sense == Sense::Maximize ? -1.0 : 1.0;
    for (std::size_t j = 0; j < v_; ++j) phase2[j] = sign * lp_.objective[j];
    set_costs(phase2);
    const auto st = iterate(sol.iterations);
    if (st != Status::Optimal) {
      sol.status = st;
      return sol;
    }
    refresh_basic_values();

    sol.point.assign(x_.begin(), x_.begin() + static_cast<std::ptrdiff_t>(v_));
    for (std::size_t j = 0; j < v_; ++j) {
      // Snap onto bounds that round-off pushed us across.
      sol.point[j] = std::clamp(sol.point[j], lp_.lower[j], lp_.upper[j]);
    }
    sol.objective = 0.0;
    for (std::size_t j = 0; j < v_; ++j) sol.objective += lp_.objective[j] * sol.point[j];

    sol.duals.assign(m_, 0.0);
    for (std::size_t k = 0; k < m_; ++k) {
      double y = 0.0;
      for (std::size_t r = 0; r < m_; ++r) y += cost_[basis_[r]] * at(r, v_ + k);
      sol.duals[k] = sign * y;
    }
    sol.status = check_feasible(lp_, sol.point, kFeasTol) ? Status::Optimal
                                                          : Status::NumericalTrouble;
    return sol;
  }

private:
  double& at(std::size_t r, std::size_t c) { return t_[r * n_ + c]; }
  double at(std::size_t r, std::size_t c) const { return t_[r * n_ + c]; }
  double* reduced() { return t_.data() + m_ * n_; }

  static std::pair<double, double> slack_bounds(Relation rel) {
    switch (rel) {
      case Relation::LessEqual: return {0.0, kInf};
      case Relation::GreaterEqual: return {-kInf, 0.0};
      case Relation::Equal: return {0.0, 0.0};
    }
    return {0.0, 0.0};
  }

  void build() {
    lo_.assign(lp_.lower.begin(), lp_.lower.end());
    hi_.assign(lp_.upper.begin(), lp_.upper.end());
    x_.assign(v_, 0.0);
    state_.assign(v_, VarState::AtLower);
    for (std::size_t j = 0; j < v_; ++j) {
      if (std::isfinite(lo_[j])) {
        x_[j] = lo_[j];
        state_[j] = VarState::AtLower;
      } else if (std::isfinite(hi_[j])) {
        x_[j] = hi_[j];
        state_[j] = VarState::AtUpper;
      } else {
        x_[j] = 0.0;
        state_[j] = VarState::Free;
      }
    }

    // Slacks, and artificials where the slack cannot absorb the residual.
    std::vector<double> residual(m_);
    row_sign_.assign(m_, 1.0);
    std::vector<bool> needs_artificial(m_, false);
    for (std::size_t k = 0; k < m_; ++k) {
      const auto& row = lp_.constraints[k];
      double lhs = 0.0;
      for (std::size_t j = 0; j < v_; ++j) lhs += row.coeffs[j] * x_[j];
      residual[k] = row.rhs - lhs;
      const auto [slo, shi] = slack_bounds(row.relation);
      lo_.push_back(slo);
      hi_.push_back(shi);
      needs_artificial[k] = residual[k] < slo || residual[k] > shi;
    }
    for (std::size_t k = 0; k < m_; ++k) {
      if (needs_artificial[k]) {
        x_.push_back(0.0);
        state_.push_back(lo_[v_ + k] == 0.0 ? VarState::AtLower : VarState::AtUpper);
      } else {
        x_.push_back(residual[k]);
        state_.push_back(VarState::Basic);
      }
    }
    basis_.assign(m_, 0);
    artificial_row_.clear();
    for (std::size_t k = 0; k < m_; ++k) {
      if (needs_artificial[k]) {
        const auto col = x_.size();
        artificials_.push_back(col);
        artificial_row_.push_back(k);
        row_sign_[k] = residual[k] >= 0.0 ? 1.0 : -1.0;
        lo_.push_back(0.0);
        hi_.push_back(kInf);
        x_.push_back(std::abs(residual[k]));
        state_.push_back(VarState::Basic);
        basis_[k] = col;
      } else {
        basis_[k] = v_ + k;
      }
    }
    n_ = x_.size();

    t_.assign((m_ + 1) * n_, 0.0);
    for (std::size_t k = 0; k < m_; ++k) {
      const double s = row_sign_[k];
      const auto& row = lp_.constraints[k];
      for (std::size_t j = 0; j < v_; ++j) at(k, j) = s * row.coeffs[j];
      at(k, v_ + k) = s;
    }
    for (std::size_t a = 0; a < artificials_.size(); ++a)
      at(artificial_row_[a], artificials_[a]) = 1.0;
    cost_.assign(n_, 0.0);
  }

  void set_costs(const std::vector<double>& c) {
    cost_ = c;
    double* d = reduced();
    for (std::size_t j = 0; j < n_; ++j) {
      double s = c[j];
      for (std::size_t r = 0; r < m_; ++r) s -= c[basis_[r]] * at(r, j);
      d[j] = s;
    }
    for (std::size_t r = 0; r < m_; ++r) d[basis_[r]] = 0.0;
  }

  /// x_B = B^{-1} (b - N x_N), using the slack columns of the tableau as B^{-1}.
  void refresh_basic_values() {
    std::vector<double> rhs(m_);
    for (std::size_t k = 0; k < m_; ++k) {
      const auto& row = lp_.constraints[k];
      double s = row.rhs;
      for (std::size_t j = 0; j < v_; ++j)
        if (state_[j] != VarState::Basic) s -= row.coeffs[j] * x_[j];
      if (state_[v_ + k] != VarState::Basic) s -= x_[v_ + k];
      rhs[k] = s;
    }
    for (std::size_t a = 0; a < artificials_.size(); ++a) {
      const auto col = artificials_[a];
      if (state_[col] != VarState::Basic) {
        const auto k = artificial_row_[a];
        rhs[k] -= row_sign_[k] * x_[col];
      }
    }
    for (std::size_t r = 0; r < m_; ++r) {
      double s = 0.0;
      for (std::size_t k = 0; k < m_; ++k) s += at(r, v_ + k) * rhs[k];
      x_[basis_[r]] = s;
    }
  }

  /// Fixes artificials at zero and pivots basic ones out where possible.
  void retire_artificials() {
    for (auto a : artificials_) {
      lo_[a] = 0.0;
      hi_[a] = 0.0;
      if (state_[a] != VarState::Basic) {
        state_[a] = VarState::AtLower;
        x_[a] = 0.0;
      }
    }
    for (std::size_t r = 0; r < m_; ++r) {
      const auto b = basis_[r];
      if (b < v_ + m_) continue;
      std::size_t best = n_;
      double best_abs = 1e-7;
      for (std::size_t j = 0; j < v_ + m_; ++j) {
        if (state_[j] == VarState::Basic) continue;
        const double a = std::abs(at(r, j));
        if (a > best_abs) {
          best_abs = a;
          best = j;
        }
      }
      if (best == n_) continue;  // redundant row; the artificial stays basic at 0
      x_[b] = 0.0;
      do_pivot(r, best);
      state_[b] = VarState::AtLower;
    }
  }

  void do_pivot(std::size_t r, std::size_t q) {
    kernels::MatrixView view{t_.data(), m_ + 1, n_};
    if (opts_.parallel)
      kernels::pivot(view, r, q);
    else
      kernels::pivot_serial(view, r, q);
    basis_[r] = q;
    state_[q] = VarState::Basic;
  }

  bool eligible(std::size_t j, double d) const {
    switch (state_[j]) {
      case VarState::Basic: return false;
      case VarState::AtLower: return lo_[j] != hi_[j] && d < -kReducedCostTol;
      case VarState::AtUpper: return lo_[j] != hi_[j] && d > kReducedCostTol;
      case VarState::Free: return std::abs(d) > kReducedCostTol;
    }
    return false;
  }

  Status iterate(std::size_t& iterations) {
    const std::size_t limit =
        opts_.max_iterations ? opts_.max_iterations : 100 * (m_ + n_) + 1000;
    std::size_t degenerate_streak = 0;
    const double* d = reduced();
    for (std::size_t iter = 0;; ++iter) {
      if (iter >= limit) return Status::IterationLimit;
      const bool bland = degenerate_streak >= opts_.bland_after;

      std::size_t q = n_;
      double best = 0.0;
      for (std::size_t j = 0; j < n_; ++j) {
        if (!eligible(j, d[j])) continue;
        if (bland) {
          q = j;
          break;
        }
        if (std::abs(d[j]) > best) {
          best = std::abs(d[j]);
          q = j;
        }
      }
      if (q == n_) return Status::Optimal;
      ++iterations;

      const double dir = d[q] < 0.0 ? 1.0 : -1.0;
      double theta = kInf;
      std::size_t leave_row = m_;
      bool leave_to_lower = true;
      for (std::size_t r = 0; r < m_; ++r) {
        const double a = dir * at(r, q);
        const auto b = basis_[r];
        double ratio = kInf;
        bool to_lower = true;
        if (a > kPivotTol && std::isfinite(lo_[b])) {
          ratio = std::max(0.0, (x_[b] - lo_[b]) / a);
        } else if (a < -kPivotTol && std::isfinite(hi_[b])) {
          ratio = std::max(0.0, (hi_[b] - x_[b]) / -a);
          to_lower = false;
        } else {
          continue;
        }
        if (ratio < theta - kRatioTieTol ||
            (ratio <= theta + kRatioTieTol && leave_row < m_ && b < basis_[leave_row])) {
          theta = ratio;
          leave_row = r;
          leave_to_lower = to_lower;
        }
      }

      const double span = hi_[q] - lo_[q];
      const bool flip = std::isfinite(span) && state_[q] != VarState::Free && span <= theta;
      if (!flip && leave_row == m_) return Status::Unbounded;
      if (flip) theta = span;

      degenerate_streak = theta <= kDegenerateStep ? degenerate_streak + 1 : 0;

      for (std::size_t r = 0; r < m_; ++r) x_[basis_[r]] -= theta * dir * at(r, q);
      x_[q] += theta * dir;

      if (flip) {
        state_[q] = state_[q] == VarState::AtLower ? VarState::AtUpper : VarState::AtLower;
        x_[q] = state_[q] == VarState::AtLower ? lo_[q] : hi_[q];
        continue;
      }
      const auto leaving = basis_[leave_row];
      x_[leaving] = leave_to_lower ? lo_[leaving] : hi_[leaving];
      do_pivot(leave_row, q);
      state_[leaving] = leave_to_lower ? VarState::AtLower : VarState::AtUpper;
    }
  }

  const LinearProgram& lp_;
  const SolveOptions& opts_;
  std::size_t m_ = 0, v_ = 0, n_ = 0;
  std::vector<double> t_;
  std::vector<double> lo_, hi_, x_, cost_, row_sign_;
  std::vector<VarState> state_;
  std::vector<std::size_t> basis_;
  std::vector<std::size_t> artificials_;
  std::vector<std::size_t> artificial_row_;
};

std::string format_bound(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

double parse_bound(const std::string& tok) {
  if (tok == "inf") return kInf;
  if (tok == "-inf") return -kInf;
  return std::stod(tok);
}

} // namespace

LpSolution solve(const LinearProgram& lp, const SolveOptions& options) {
  lp.validate();
  Tableau tableau(lp, options);
  return tableau.run();
}

void write_lp_text(const LinearProgram& lp, std::ostream& out) {
  const auto prec = out.precision(17);
  out << "lp " << (lp.sense == Sense::Minimize ? "minimize" : "maximize") << ' '
      << lp.variable_count() << ' ' << lp.row_count() << '\n';
  out << "obj";
  for (double c : lp.objective) out << ' ' << c;
  out << '\n';
  for (const auto& row : lp.constraints) {
    out << "row "
        << (row.relation == Relation::LessEqual ? "<=" : row.relation == Relation::GreaterEqual ? ">=" : "=")
        << ' ' << row.rhs;
    for (double a : row.coeffs) out << ' ' << a;
    out << '\n';
  }
  for (std::size_t j = 0; j < lp.variable_count(); ++j)
    out << "bound " << format_bound(lp.lower[j]) << ' ' << format_bound(lp.upper[j]) << '\n';
  out.precision(prec);
}

LinearProgram read_lp_text(std::istream& in) {
  LinearProgram lp;
  std::string tag, sense;
  std::size_t vars = 0, rows = 0;
  if (!(in >> tag >> sense >> vars >> rows) || tag != "lp")
    throw SolverError("malformed LP dump header");
  lp.sense = sense == "maximize" ? Sense::Maximize : Sense::Minimize;
  if (!(in >> tag) || tag != "obj") throw SolverError("malformed LP dump: expected obj");
  lp.objective.resize(vars);
  for (auto& c : lp.objective) in >> c;
  for (std::size_t k = 0; k < rows; ++k) {
    std::string rel;
    Constraint row;
    if (!(in >> tag >> rel >> row.rhs) || tag != "row") throw SolverError("malformed LP dump row");
    row.relation = rel == "<=" ? Relation::LessEqual : rel == ">=" ? Relation::GreaterEqual : Relation::Equal;
    row.coeffs.resize(vars);
    for (auto& a : row.coeffs) in >> a;
    lp.constraints.push_back(std::move(row));
  }
  for (std::size_t j = 0; j < vars; ++j) {
    std::string lo, hi;
    if (!(in >> tag >> lo >> hi) || tag != "bound") throw SolverError("malformed LP dump bound");
    lp.lower.push_back(parse_bound(lo));
    lp.upper.push_back(parse_bound(hi));
  }
  if (!in) throw SolverError("truncated LP dump");
  return lp;
}

} // namespace lexiboost::lp
