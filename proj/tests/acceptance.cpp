// One line per acceptance criterion; exit status is non-zero if any fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "fixtures.hpp"
#include "lexiboost/dual_lexiboost.hpp"
#include "lexiboost/error.hpp"
#include "lexiboost/experiment.hpp"
#include "lexiboost/lexiboost.hpp"
#include "lexiboost/lp_variants.hpp"
#include "lexiboost/metrics.hpp"
#include "lexiboost/rng.hpp"
#include "lexiboost/serialize.hpp"
#include "oracles.hpp"

using namespace lexiboost;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!out.pass) ++failures;
  std::printf("[%s] %2d %s: %s (%.2fs)\n", out.pass ? "PASS" : "FAIL", id, name.c_str(), out.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::vector<double> random_simplex(std::mt19937_64& rng, std::size_t n) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> a(n);
  double total = 0.0;
  for (double& x : a) total += (x = e(rng));
  for (double& x : a) x /= total;
  return a;
}

std::vector<double> class_losses(const MarginMatrix& mm, std::span<const double> alpha) {
  const auto rhos = margins(mm, alpha);
  const auto sizes = mm.class_sizes();
  std::vector<double> l(mm.class_count(), 0.0);
  for (std::size_t i = 0; i < mm.rows(); ++i) l[mm.class_of(i)] += hinge_loss(rhos[i]);
  for (std::size_t j = 0; j < l.size(); ++j) l[j] /= static_cast<double>(sizes[j]);
  return l;
}

// max sum_{i in c_j} D(i) - s s.t. sum_{i in c_j} D(i) m[i][t] <= s, 0 <= D(i) <= 1/n_j.
double class_dual_value(const MarginMatrix& mm, ClassIndex j) {
  const auto rows = mm.class_rows(j);
  const double cap = 1.0 / static_cast<double>(rows.size());
  lp::LinearProgram prog;
  prog.sense = lp::Sense::Maximize;
  for (std::size_t k = 0; k < rows.size(); ++k) prog.add_variable(1.0, 0.0, cap);
  const auto s = prog.add_variable(-1.0, -lp::kInf, lp::kInf);
  for (std::size_t t = 0; t < mm.cols(); ++t) {
    std::vector<double> r(prog.variable_count(), 0.0);
    for (std::size_t k = 0; k < rows.size(); ++k) r[k] = mm(rows[k], t);
    r[s] = -1.0;
    prog.add_constraint(std::move(r), lp::Relation::LessEqual, 0.0);
  }
  const auto sol = lp::solve(prog);
  if (!sol.optimal()) throw SolverError("class dual not optimal");
  return sol.objective;
}

// Raw solutions of the per-class and balancing LPs written from their
// definitions; returns the largest |lambda_i - max(0, 1 - rho_i)|.
double raw_hinge_gap(const MarginMatrix& mm, std::span<const double> refs) {
  const auto n = mm.rows(), cols = mm.cols(), classes = mm.class_count();
  const auto sizes = mm.class_sizes();
  double worst = 0.0;
  auto check = [&](const lp::LpSolution& sol, const std::vector<std::size_t>& rows) {
    if (!sol.optimal()) throw SolverError("stage LP not optimal");
    const std::vector<double> alpha(sol.point.begin(), sol.point.begin() + static_cast<std::ptrdiff_t>(cols));
    for (std::size_t k = 0; k < rows.size(); ++k)
      worst = std::max(worst, std::abs(sol.point[cols + k] - hinge_loss(margin(alpha, mm.row(rows[k])))));
  };
  auto base = [&](lp::LinearProgram& prog, const std::vector<std::size_t>& rows) {
    for (std::size_t t = 0; t < cols; ++t) prog.add_variable(0.0);
    for (std::size_t k = 0; k < rows.size(); ++k) prog.add_variable(0.0);
    for (std::size_t k = 0; k < rows.size(); ++k) {
      std::vector<double> r(prog.variable_count(), 0.0);
      for (std::size_t t = 0; t < cols; ++t) r[t] = mm(rows[k], t);
      r[cols + k] = 1.0;
      prog.add_constraint(std::move(r), lp::Relation::GreaterEqual, 1.0);
    }
  };
  auto simplex_row = [&](lp::LinearProgram& prog) {
    std::vector<double> r(prog.variable_count(), 0.0);
    std::fill(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(cols), 1.0);
    prog.add_constraint(std::move(r), lp::Relation::Equal, 1.0);
  };

  for (ClassIndex j = 0; j < classes; ++j) {
    const auto rows = mm.class_rows(j);
    lp::LinearProgram p;
    base(p, rows);
    for (std::size_t k = 0; k < rows.size(); ++k) p.objective[cols + k] = 1.0 / static_cast<double>(rows.size());
    simplex_row(p);
    check(lp::solve(p), rows);
  }

  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  lp::LinearProgram q;
  base(q, all);
  const auto chi = q.add_variable(1.0);
  for (ClassIndex j = 0; j < classes; ++j) {
    std::vector<double> r(q.variable_count(), 0.0);
    for (std::size_t i = 0; i < n; ++i)
      if (mm.class_of(i) == j) r[cols + i] = 1.0 / static_cast<double>(sizes[j]);
    r[chi] = -1.0;
    q.add_constraint(std::move(r), lp::Relation::LessEqual, refs[j]);
  }
  simplex_row(q);
  check(lp::solve(q), all);
  return worst;
}

// Same protocol as the bench: generate, stratified split, train, score.
struct SeedRun {
  double ada = 0.0, lexi = 0.0, dual = 0.0;
};

std::pair<Dataset, Dataset> split_for(const Dataset& ds, std::uint64_t seed) {
  return stratified_split(ds, 0.8, derive_seed(seed, 0x5eed));
}

double max_distribution_violation(const DualLexiResult& r) {
  double worst = 0.0;
  for (const auto& e : r.distributions) {
    double total = 0.0;
    for (std::size_t i = 0; i < e.weights.size(); ++i) {
      total += e.weights[i];
      worst = std::max(worst, e.weights[i] - e.upper[i]);
      worst = std::max(worst, -e.weights[i]);
    }
    worst = std::max(worst, std::abs(total - 1.0));
  }
  return worst;
}

double distribution_violation = 0.0;
std::size_t distributions_checked = 0;

SeedRun run_seed(const Dataset& ds, std::uint64_t seed, const LearnerConfig& learner) {
  const auto [train, test] = split_for(ds, seed);
  TrainConfig ada;
  ada.algorithm = Algorithm::AdaBoost;
  ada.learner = learner;
  TrainConfig lexi = ada;
  lexi.algorithm = Algorithm::LexiBoost;
  DualLexiConfig dcfg;
  dcfg.learner = learner;
  const auto dual = train_dual_lexiboost(train, dcfg);
  distribution_violation = std::max(distribution_violation, max_distribution_violation(dual));
  distributions_checked += dual.distributions.size();
  return {evaluate(train_model(train, ada).ensemble, test).g_mean,
          evaluate(train_model(train, lexi).ensemble, test).g_mean, evaluate(dual.ensemble, test).g_mean};
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(LEXIBOOST_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

std::string strip_timing(const std::string& text) {
  auto j = Json::parse(text);
  j.erase("timing");
  if (j.contains("rows"))
    for (auto& r : j["rows"]) r.erase("timing");
  return j.dump();
}

} // namespace

int main() {
  report(1, "LP solver vs vertex enumeration", [] {
    std::mt19937_64 rng(7001);
    int agree = 0, opt = 0;
    double worst = 0.0;
    const auto start = std::chrono::steady_clock::now();
    for (int trial = 0; trial < 200; ++trial) {
      const auto lp = oracle::random_small_lp(rng, 6, 8);
      const auto want = oracle::enumerate_lp(lp);
      const auto got = lp::solve(lp);
      if (got.status != want.status) continue;
      ++agree;
      if (got.optimal()) {
        ++opt;
        worst = std::max(worst, std::abs(got.objective - want.objective));
      }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return Outcome{agree == 200 && worst <= 1e-6 && secs < 10.0,
                   std::to_string(agree) + "/200 statuses agree, " + std::to_string(opt) +
                       " optimal, max objective gap " + fmt("%.2e", worst)};
  });

  report(2, "strong duality of the per-class LPs", [] {
    std::mt19937_64 rng(7002);
    std::uniform_int_distribution<std::size_t> rows(3, 40), cols(1, 6);
    double worst = 0.0;
    std::size_t solved = 0;
    for (int trial = 0; trial < 50; ++trial) {
      const auto mm = fixture::random_margins(rng, rows(rng), cols(rng), trial % 3 == 0 ? 3 : 2);
      for (ClassIndex j = 0; j < mm.class_count(); ++j) {
        worst = std::max(worst, std::abs(solve_stage1(mm, j).average - class_dual_value(mm, j)));
        ++solved;
      }
    }
    return Outcome{worst < 1e-6, std::to_string(solved) + " primal/dual pairs, max gap " + fmt("%.2e", worst)};
  });

  std::vector<MarginMatrix> sampled;
  {
    std::mt19937_64 rng(7003);
    std::uniform_int_distribution<std::size_t> rows(6, 40), cols(2, 6);
    for (int k = 0; k < 20; ++k) sampled.push_back(fixture::random_margins(rng, rows(rng), cols(rng), 2 + k % 3));
  }

  report(3, "stage optima beat random simplex samples", [&] {
    std::mt19937_64 rng(7004);
    double worst = 0.0;  // largest amount by which a sample beat an optimum
    for (const auto& mm : sampled) {
      const auto s1 = solve_stage1_all(mm);
      const auto refs = s1.references();
      const auto s2 = solve_stage2(mm, s1);
      for (int k = 0; k < 10000; ++k) {
        const auto alpha = random_simplex(rng, mm.cols());
        const auto l = class_losses(mm, alpha);
        double chi = 0.0;
        for (std::size_t j = 0; j < l.size(); ++j) {
          worst = std::max(worst, refs[j] - l[j]);
          chi = std::max(chi, l[j] - refs[j]);
        }
        worst = std::max(worst, s2.chi - chi);
      }
    }
    return Outcome{worst <= 1e-7, "20 matrices x 10^4 samples, max improvement " + fmt("%.2e", worst)};
  });

  report(4, "hinge identity at stage optima", [&] {
    double worst = 0.0;
    for (const auto& mm : sampled) {
      const auto s1 = solve_stage1_all(mm);
      worst = std::max(worst, raw_hinge_gap(mm, s1.references()));
      for (const auto& c : s1.classes) {
        const auto rhos = margins(mm, c.alpha);
        for (std::size_t k = 0; k < c.rows.size(); ++k)
          worst = std::max(worst, std::abs(c.losses[k] - hinge_loss(rhos[c.rows[k]])));
      }
    }
    return Outcome{worst <= 1e-7, "raw LP lambda vs max(0, 1 - rho), max gap " + fmt("%.2e", worst)};
  });

  report(5, "symmetric two-point toy", [] {
    const auto s2 = solve_stage2(fixture::symmetric_toy(), solve_stage1_all(fixture::symmetric_toy()));
    const double err = std::max({std::abs(s2.alpha[0] - 0.5), std::abs(s2.alpha[1] - 0.5), std::abs(s2.chi - 1.0)});
    return Outcome{err <= 1e-6, "alpha = (" + fmt("%.9f", s2.alpha[0]) + ", " + fmt("%.9f", s2.alpha[1]) +
                                    "), chi = " + fmt("%.9f", s2.chi)};
  });

  report(6, "synthetic G-Mean ordering, kNN k=5, 10 seeds", [] {
    const LearnerConfig knn{LearnerKind::Knn, 5, 3};
    std::string detail;
    bool pass = true;
    for (double outliers : {0.0, 0.1}) {
      SeedRun mean;
      for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        SyntheticSpec spec;
        spec.total_size = 500;
        spec.imbalance_ratio = 10;
        spec.majority_center = 1.7;
        spec.outlier_rate = outliers;
        spec.seed = seed;
        const auto r = run_seed(generate_gaussian(spec), seed, knn);
        mean.ada += r.ada / 10.0;
        mean.lexi += r.lexi / 10.0;
        mean.dual += r.dual / 10.0;
      }
      const bool ok = mean.lexi > mean.ada && mean.dual > mean.ada;
      pass = pass && ok;
      detail += (detail.empty() ? "" : "; ") + std::string(outliers > 0 ? "10% outliers" : "clean") +
                " AdaBoost " + fmt("%.4f", mean.ada) + " LexiBoost " + fmt("%.4f", mean.lexi) +
                " Dual-LexiBoost " + fmt("%.4f", mean.dual);
    }
    return Outcome{pass, detail};
  });

  report(7, "three-class G-Mean vs multi-class AdaBoost, 5 seeds", [] {
    const LearnerConfig knn{LearnerKind::Knn, 5, 3};
    SeedRun mean;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const auto ds = generate_gaussian_classes({400, 80, 40}, {0.0, 1.7, 3.4}, 5, seed);
      const auto r = run_seed(ds, seed, knn);
      mean.ada += r.ada / 5.0;
      mean.dual += r.dual / 5.0;
    }
    return Outcome{mean.dual >= mean.ada,
                   "AdaBoost " + fmt("%.4f", mean.ada) + " Dual-LexiBoost " + fmt("%.4f", mean.dual)};
  });

  report(8, "emitted distributions sum to one within their bounds", [] {
    return Outcome{distributions_checked > 0 && distribution_violation <= 1e-9,
                   std::to_string(distributions_checked) + " distributions from criteria 6-7, max violation " +
                       fmt("%.2e", distribution_violation)};
  });

  report(9, "repeated CLI runs are byte-identical", [] {
    const auto dir = std::filesystem::temp_directory_path() / "lexiboost_acceptance";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    const auto p = [&](const std::string& name) { return (dir / name).string(); };
    if (run_cli("gen --size 300 --ir 10 --seed 4 --outlier-rate 0.1 --out " + p("d.csv")) != 0)
      return Outcome{false, "gen failed"};
    std::size_t compared = 0;
    for (const std::string algo : {"lexiboost", "dual-lexiboost", "dual-lpuboost"}) {
      const std::string cmd = "train --data " + p("d.csv") + " --algo " + algo + " --tune --seed 3";
      if (run_cli(cmd + " --model " + p("m1.json") + " --report " + p("r1.json")) != 0 ||
          run_cli(cmd + " --model " + p("m2.json") + " --report " + p("r2.json")) != 0)
        return Outcome{false, "train " + algo + " failed"};
      if (slurp(p("m1.json")) != slurp(p("m2.json"))) return Outcome{false, algo + " model files differ"};
      if (strip_timing(slurp(p("r1.json"))) != strip_timing(slurp(p("r2.json"))))
        return Outcome{false, algo + " reports differ outside timing"};
      compared += 2;
    }
    std::ofstream(p("bench.json")) << R"({"algorithms": ["adaboost", "lexiboost", "dual-lexiboost", "lpuboost"],
      "rounds": 5, "datasets": [{"size": 200, "imbalance_ratio": 5}, {"size": 200, "imbalance_ratio": 10, "outlier_rate": 0.1}],
      "seeds": [1, 2]})";
    if (run_cli("bench --config " + p("bench.json") + " --out " + p("b1.json") + " --csv " + p("b1.csv")) != 0 ||
        run_cli("bench --config " + p("bench.json") + " --out " + p("b2.json") + " --csv " + p("b2.csv")) != 0)
      return Outcome{false, "bench failed"};
    if (strip_timing(slurp(p("b1.json"))) != strip_timing(slurp(p("b2.json"))))
      return Outcome{false, "bench results differ outside timing"};
    compared += 1;
    return Outcome{true, std::to_string(compared) + " output pairs identical (timing excluded)"};
  });

  report(10, "comparator collapse identities", [] {
    std::mt19937_64 rng(7010);
    std::size_t checks = 0;
    bool ok = true;
    for (int k = 0; k < 20; ++k) {
      const auto mm = fixture::random_margins(rng, 8 + k, 1 + k % 5, k < 10 ? 2 : 3);
      if (mm.class_count() == 2) {
        const auto a = lpu_boost_weights(mm, 5.0, 1.0, 0);
        const auto b = lp_boost_weights(mm, 5.0);
        ok = ok && a.alpha == b.alpha && a.rho == b.rho && a.objective == b.objective;
        ++checks;
      }
      const auto s1 = solve_stage1_all(mm);
      const std::vector<double> ones(mm.class_count(), 1.0);
      const auto plain = solve_stage2(mm, s1), costed = solve_stage2(mm, s1, ones);
      ok = ok && plain.alpha == costed.alpha && plain.chi == costed.chi;
      ++checks;
    }
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      SyntheticSpec spec;
      spec.total_size = 150;
      spec.imbalance_ratio = 5;
      spec.seed = seed;
      const auto ds = generate_gaussian(spec);
      LpVariantConfig cfg;
      cfg.cost = 5.0;
      cfg.beta = 1.0;
      cfg.learner = {LearnerKind::Knn, 5, 3};
      const auto u = dual_lpu_boost_train(ds, cfg), p = dual_lp_boost_train(ds, cfg);
      ok = ok && u.ensemble == p.ensemble && u.rounds.size() == p.rounds.size();
      for (std::size_t t = 0; ok && t < u.rounds.size(); ++t) ok = u.rounds[t].weights == p.rounds[t].weights;
      ++checks;
    }
    return Outcome{ok, std::to_string(checks) + " exact comparisons"};
  });

  std::printf("%s: %d criterion(s) failed\n", failures == 0 ? "OK" : "FAILED", failures);
  return failures == 0 ? 0 : 1;
}
