#include <random>
#include <sstream>

#include "doctest.h"
#include "lexiboost/error.hpp"
#include "lexiboost/lp.hpp"
#include "oracles.hpp"

using namespace lexiboost::lp;

TEST_CASE("dominant vertex") {
  LinearProgram lp;
  lp.add_variable(-2.0);
  lp.add_variable(-1.0);
  lp.add_constraint({1.0, 1.0}, Relation::LessEqual, 1.0);
  const auto sol = solve(lp);
  REQUIRE(sol.status == Status::Optimal);
  CHECK(sol.objective == doctest::Approx(-2.0));
  CHECK(sol.point[0] == doctest::Approx(1.0));
  CHECK(sol.point[1] == doctest::Approx(0.0));
  // Relaxing x + y <= 1 by db lowers the objective by 2 db.
  CHECK(sol.duals[0] == doctest::Approx(-2.0));
}

TEST_CASE("contradictory rows are infeasible") {
  LinearProgram lp;
  lp.add_variable(1.0, -kInf, kInf);
  lp.add_constraint({1.0}, Relation::GreaterEqual, 1.0);
  lp.add_constraint({1.0}, Relation::LessEqual, 0.0);
  CHECK(solve(lp).status == Status::Infeasible);
}

TEST_CASE("open ray is unbounded") {
  LinearProgram lp;
  lp.add_variable(-1.0);
  CHECK(solve(lp).status == Status::Unbounded);
}

TEST_CASE("maximize with free variable and equality") {
  // max x + y  s.t. x - y = 1, x <= 3, y free
  LinearProgram lp;
  lp.sense = Sense::Maximize;
  lp.add_variable(1.0, -kInf, 3.0);
  lp.add_variable(1.0, -kInf, kInf);
  lp.add_constraint({1.0, -1.0}, Relation::Equal, 1.0);
  const auto sol = solve(lp);
  REQUIRE(sol.optimal());
  CHECK(sol.objective == doctest::Approx(5.0));
  CHECK(sol.point[0] == doctest::Approx(3.0));
  CHECK(sol.point[1] == doctest::Approx(2.0));
}

TEST_CASE("iteration limit is reported, never Optimal") {
  LinearProgram lp;
  for (int j = 0; j < 4; ++j) lp.add_variable(-1.0 - j, 0.0, kInf);
  lp.add_constraint({1, 1, 1, 1}, Relation::LessEqual, 10.0);
  lp.add_constraint({1, 2, 3, 4}, Relation::LessEqual, 12.0);
  lp.add_constraint({1, 0, 0, 0}, Relation::GreaterEqual, 1.0);
  SolveOptions opts;
  opts.max_iterations = 1;
  CHECK(solve(lp, opts).status == Status::IterationLimit);
}

TEST_CASE("invalid models are rejected") {
  LinearProgram lp;
  lp.add_variable(1.0, 2.0, 1.0);
  CHECK_THROWS_AS(solve(lp), lexiboost::SolverError);
  LinearProgram bad;
  bad.add_variable(1.0);
  CHECK_THROWS_AS(bad.add_constraint({1.0, 2.0}, Relation::LessEqual, 1.0), lexiboost::SolverError);
}

TEST_CASE("check_feasible tolerance semantics") {
  LinearProgram lp;
  lp.add_variable(0.0);
  lp.add_variable(0.0);
  lp.add_constraint({1.0, 1.0}, Relation::LessEqual, 1.0);
  CHECK(check_feasible(lp, std::vector<double>{0.5, 0.5}, 1e-9));
  CHECK_FALSE(check_feasible(lp, std::vector<double>{0.6, 0.6}, 1e-9));

  LinearProgram eq;
  eq.add_variable(0.0, -kInf, kInf);
  eq.add_constraint({1.0}, Relation::Equal, 1.0);
  CHECK(check_feasible(eq, std::vector<double>{1.0 + 1e-10}, 1e-9));
  CHECK_FALSE(check_feasible(eq, std::vector<double>{1.0 + 1e-8}, 1e-9));
}

TEST_CASE("random small LPs agree with vertex enumeration") {
  std::mt19937_64 rng(20240917);
  int optimal = 0, infeasible = 0, unbounded = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto lp = oracle::random_small_lp(rng, 6, 8);
    const auto expected = oracle::enumerate_lp(lp);
    const auto got = solve(lp);
    INFO("trial " << trial);
    REQUIRE(got.status == expected.status);
    if (got.optimal()) {
      ++optimal;
      CHECK(std::abs(got.objective - expected.objective) <= 1e-6);
      CHECK(check_feasible(lp, got.point, kFeasTol));
    } else if (got.status == Status::Infeasible) {
      ++infeasible;
    } else {
      ++unbounded;
    }
  }
  // The generator should exercise every outcome.
  CHECK(optimal > 0);
  CHECK(infeasible > 0);
  CHECK(unbounded > 0);
}

TEST_CASE("deterministic and serial/parallel agree") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    const auto lp = oracle::random_small_lp(rng, 6, 8);
    const auto a = solve(lp);
    const auto b = solve(lp);
    SolveOptions serial;
    serial.parallel = false;
    const auto c = solve(lp, serial);
    CHECK(a.status == b.status);
    CHECK(a.status == c.status);
    CHECK(a.point == b.point);
    CHECK(a.point == c.point);
  }
}

TEST_CASE("duals satisfy strong duality on random feasible LPs") {
  std::mt19937_64 rng(99);
  int checked = 0;
  for (int trial = 0; trial < 200 && checked < 40; ++trial) {
    auto lp = oracle::random_small_lp(rng, 5, 6);
    // With x >= 0 only, the dual objective is y.b.
    for (auto& u : lp.upper) u = kInf;
    const auto sol = solve(lp);
    if (!sol.optimal()) continue;
    ++checked;
    double dual_obj = 0.0;
    for (std::size_t k = 0; k < lp.row_count(); ++k) dual_obj += sol.duals[k] * lp.constraints[k].rhs;
    // Reduced costs c - A^T y must carry the sign of an optimal basis.
    for (std::size_t j = 0; j < lp.variable_count(); ++j) {
      double rc = lp.objective[j];
      for (std::size_t k = 0; k < lp.row_count(); ++k) rc -= sol.duals[k] * lp.constraints[k].coeffs[j];
      if (lp.sense == Sense::Minimize)
        CHECK(rc >= -1e-7);
      else
        CHECK(rc <= 1e-7);
    }
    CHECK(std::abs(dual_obj - sol.objective) <= 1e-6);
  }
  CHECK(checked >= 20);
}

TEST_CASE("text dump round-trips") {
  LinearProgram lp;
  lp.sense = Sense::Maximize;
  lp.add_variable(0.1, -kInf, 2.5);
  lp.add_variable(-3.0, 0.0, kInf);
  lp.add_constraint({1.0 / 3.0, 2.0}, Relation::GreaterEqual, -1.0);
  lp.add_constraint({1.0, -1.0}, Relation::Equal, 0.25);
  std::stringstream s;
  write_lp_text(lp, s);
  const auto back = read_lp_text(s);
  CHECK(back.sense == lp.sense);
  CHECK(back.objective == lp.objective);
  CHECK(back.lower == lp.lower);
  CHECK(back.upper == lp.upper);
  REQUIRE(back.row_count() == 2);
  CHECK(back.constraints[0].coeffs == lp.constraints[0].coeffs);
  CHECK(back.constraints[1].relation == Relation::Equal);
  CHECK(solve(back).objective == solve(lp).objective);
}
