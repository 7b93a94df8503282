#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace lexiboost::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Tolerances shared by every LP in the library.
inline constexpr double kPivotTol = 1e-9;
inline constexpr double kFeasTol = 1e-7;
inline constexpr double kObjTol = 1e-6;

enum class Sense { Minimize, Maximize };
enum class Relation { LessEqual, GreaterEqual, Equal };
enum class Status { Optimal, Infeasible, Unbounded, IterationLimit, NumericalTrouble };

std::string to_string(Status s);

struct Constraint {
  std::vector<double> coeffs;
  Relation relation = Relation::LessEqual;
  double rhs = 0.0;
};

/// Dense LP model: optimize c.x subject to rows a_k.x {<=,>=,=} b_k and
/// per-variable bounds lo <= x <= hi (either side may be infinite).
struct LinearProgram {
  Sense sense = Sense::Minimize;
  std::vector<double> objective;
  std::vector<Constraint> constraints;
  std::vector<double> lower;
  std::vector<double> upper;

  std::size_t variable_count() const { return objective.size(); }
  std::size_t row_count() const { return constraints.size(); }

  /// Appends a variable and returns its index. Existing rows are widened.
  std::size_t add_variable(double cost, double lo = 0.0, double hi = kInf);
  /// Row coefficients must have one entry per variable.
  void add_constraint(std::vector<double> coeffs, Relation rel, double rhs);

  /// Throws SolverError on non-finite coefficients, bad row widths or
  /// inverted bounds.
  void validate() const;
};

struct LpSolution {
  Status status = Status::IterationLimit;
  std::vector<double> point;      ///< present iff Optimal
  double objective = 0.0;         ///< meaningful iff Optimal
  /// d(objective)/d(rhs_k) at the optimum, one entry per constraint row.
  std::vector<double> duals;
  std::size_t iterations = 0;

  bool optimal() const { return status == Status::Optimal; }
};

struct SolveOptions {
  std::size_t max_iterations = 0;   ///< 0 selects a size-based default
  bool parallel = true;             ///< OpenMP row elimination
  std::size_t bland_after = 50;     ///< degenerate pivots before Bland's rule kicks in
};

/// Two-phase bounded-variable primal simplex on a dense tableau.
///
/// Pricing is Dantzig (largest reduced cost, lowest index on ties) until a
/// streak of degenerate pivots, then Bland's rule until progress resumes.
/// Ratio-test ties go to the lowest variable index. Deterministic.
LpSolution solve(const LinearProgram& lp, const SolveOptions& options = {});

/// True iff every bound and row holds within tol.
bool check_feasible(const LinearProgram& lp, std::span<const double> point, double tol);

/// Plain-text dump for reproducing solver issues; read_lp_text parses it back.
void write_lp_text(const LinearProgram& lp, std::ostream& out);
LinearProgram read_lp_text(std::istream& in);

} // namespace lexiboost::lp
