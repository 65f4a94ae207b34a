// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "procnash/agents/agent.hpp"
#include "procnash/eval/harness.hpp"
#include "procnash/eval/padding_experiment.hpp"
#include "procnash/gen/gamegen.hpp"
#include "procnash/solver/nash.hpp"
#include "procnash/theory/checks.hpp"
#include "procnash/theory/toy_grpo.hpp"

using namespace procnash;

namespace {

constexpr std::uint64_t kEvalSeed = 99;

// Every EvalResult produced here, for the metric-algebra criterion.
std::vector<EvalResult> g_all_results;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& why) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + why;
    }
  }
  void note(const std::string& s) { detail += (detail.empty() ? "" : "; ") + s; }
};

std::string fmt(double x, int digits = 3) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

std::vector<GameRecord> eval_set(int n, int count, Distribution d = Distribution::integer) {
  GameSpec spec;
  spec.distribution = d;
  return make_eval_set(n, count, spec, kEvalSeed);
}

EvalResult run_eval(const Agent& agent, const std::vector<GameRecord>& games, int k = 4) {
  EvalOptions opt;
  opt.k = k;
  opt.jobs = 4;
  auto r = evaluate(agent, games, opt).result;
  g_all_results.push_back(r);
  return r;
}

// Per-size comparison against reference values within `tol`.
Outcome table_row(const Agent& agent, const std::vector<int>& sizes, const std::vector<double>& reference, int count,
                  double tol, Distribution d = Distribution::integer) {
  Outcome o;
  std::string cells;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const auto r = run_eval(agent, eval_set(sizes[i], count, d));
    const double diff = std::abs(r.s_at_tau - reference[i]);
    cells += " n=" + std::to_string(sizes[i]) + ":" + fmt(r.s_at_tau, 3) + "(ref " + fmt(reference[i], 2) + ")";
    o.require(diff <= tol, "n=" + std::to_string(sizes[i]) + " off by " + fmt(diff));
  }
  o.note(cells.substr(1));
  return o;
}

Outcome criterion_oracle() {
  Outcome o;
  const auto agent = oracle_agent();
  for (int n = 2; n <= 7; ++n) {
    const auto r = run_eval(*agent, eval_set(n, 50));
    o.require(r.s_at_tau == 1.0 && r.pass_at_1 == 1.0,
              "n=" + std::to_string(n) + " s=" + fmt(r.s_at_tau) + " pass=" + fmt(r.pass_at_1));
  }
  if (o.pass) o.note("s@0.10 = pass@1 = 1.00 for n = 2..7");
  return o;
}

Outcome criterion_uniform() {
  return table_row(*uniform_agent(), {2, 3, 4, 5, 6, 7}, {0.18, 0.04, 0.16, 0.04, 0.08, 0.04}, 1000, 0.09);
}

Outcome criterion_maximin() {
  return table_row(*maximin_agent(), {2, 3, 4, 5, 6, 7}, {0.72, 0.74, 0.38, 0.28, 0.28, 0.10}, 1000, 0.10);
}

Outcome criterion_far_ood() {
  const std::vector<int> sizes{8, 10, 12, 15, 20};
  const auto agent = uniform_agent();
  Outcome o = table_row(*agent, sizes, {0.03, 0.03, 0.00, 0.10, 0.10}, 1000, 0.08);

  std::vector<double> gauss;
  std::vector<double> se;
  for (int n : sizes) {
    const auto r = run_eval(*agent, eval_set(n, 1000, Distribution::gaussian));
    gauss.push_back(r.s_at_tau);
    se.push_back(r.se_s);
  }
  std::string cells;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    cells += " " + fmt(gauss[i], 3);
    // Qualitative: non-decreasing up to sampling noise.
    if (i > 0) o.require(gauss[i] >= gauss[i - 1] - 2 * (se[i] + se[i - 1]), "gaussian not increasing at n=" + std::to_string(sizes[i]));
  }
  o.require(gauss.back() >= 0.9, "gaussian n=20 below 0.9");
  o.note("gaussian uniform:" + cells);
  return o;
}

Outcome criterion_solver() {
  Outcome o;
  int solved = 0, cert_fail = 0, enum_fail = 0;
  for (int n = 2; n <= 20; ++n) {
    for (const auto& game : eval_set(n, 1000)) {
      const auto eq = solve_zero_sum_lp(game.matrix);
      ++solved;
      if (!verify_equilibrium(game.matrix, eq.pair, 1e-8)) ++cert_fail;
      if (n <= 4 && std::abs(support_enumeration(game.matrix).value - eq.value) > 1e-8) ++enum_fail;
    }
  }
  o.require(cert_fail == 0, std::to_string(cert_fail) + " LP certificates failed");
  o.require(enum_fail == 0, std::to_string(enum_fail) + " support-enumeration disagreements");
  o.note(std::to_string(solved) + " games solved");
  return o;
}

Outcome criterion_lipschitz() {
  Outcome o;
  const auto log = check_residual_lipschitz(10000, 2024);
  o.require(log.passed(), std::to_string(log.violations) + " Lipschitz violations");
  o.note("10000 trials, max ratio " + fmt(log.max_ratio, 4));
  std::vector<double> eps;
  for (int e = 1; e <= 8; ++e) eps.push_back(std::pow(10.0, -e));
  const auto demo = selector_discontinuity_demo(eps);
  double min_jump = INFINITY;
  for (const auto& row : demo.rows) min_jump = std::min(min_jump, row.l1_jump);
  o.require(demo.passed(), "discontinuity demo failed");
  o.note("min l1 jump " + fmt(min_jump) + " over eps 1e-1..1e-8");
  return o;
}

GameRecord matching_pennies() {
  const auto base = eval_set(2, 1)[0];
  DenseMatrix<double> m(2, 2);
  m << 1, -1, -1, 1;
  return derived_game(base, PayoffMatrix(m), "pennies");
}

Outcome criterion_grpo() {
  Outcome o;
  const auto rep = grpo_cancellation_check(10000, 7);
  o.require(rep.passed() && rep.max_abs_coefficient <= 1e-12, "role-merged coefficient " + fmt(rep.max_abs_coefficient, 15));
  o.note("10000 draws, max |coef| " + fmt(rep.max_abs_coefficient, 1));

  const auto game = matching_pennies();
  const auto merged = toy_grpo_train(game, ToyPolicyConfig{}, GrpoMode::role_merged, 100, 1);
  bool unchanged = true;
  for (double x : merged.row_logits) unchanged = unchanged && x == 0.0;
  for (double x : merged.col_logits) unchanged = unchanged && x == 0.0;
  o.require(unchanged, "role-merged logits moved");

  const auto coop = toy_grpo_train(game, ToyPolicyConfig{}, GrpoMode::cooperative, 500, 1);
  int reached = -1;
  for (const auto& s : coop.steps)
    if (s.expected_exploit < 0.05) {
      reached = s.step + 1;
      break;
    }
  o.require(reached > 0, "cooperative never below 0.05");
  o.note("cooperative below 0.05 at step " + std::to_string(reached) + ", final " +
         fmt(coop.steps.back().expected_exploit, 5));
  return o;
}

Outcome criterion_padding() {
  Outcome o;
  const auto bases = eval_set(3, 100);
  int value_fail = 0, cert_fail = 0;
  std::string medians;
  for (int target : {8, 12, 15, 20}) {
    std::vector<double> normalized;
    for (const auto& base : bases) {
      const auto dom = dominated_pad(base, target);
      const double base_value = solve_zero_sum_lp(base.matrix).value;
      if (std::abs(solve_zero_sum_lp(dom.padded).value - base_value) > 1e-8) ++value_fail;
      if (!verify_equilibrium(dom.padded, dom.reference_pair, 1e-8)) ++cert_fail;
      const auto rnd = random_pad(base, target);
      normalized.push_back(exploitability(rnd.padded, rnd.reference_pair).normalized);
    }
    std::sort(normalized.begin(), normalized.end());
    const double median = 0.5 * (normalized[49] + normalized[50]);
    medians += " N=" + std::to_string(target) + ":" + fmt(median);
    o.require(median > 0.10, "random padding median " + fmt(median) + " at N=" + std::to_string(target));
  }
  o.require(value_fail == 0, std::to_string(value_fail) + " value changes under dominated padding");
  o.require(cert_fail == 0, std::to_string(cert_fail) + " failed certificates under dominated padding");
  o.note("dominated 400/400 certified; random-pad median" + medians);
  return o;
}

Outcome criterion_padding_signature() {
  Outcome o;
  PaddingExperimentOptions opt;
  opt.seed = kEvalSeed;
  opt.jobs = 4;
  const auto block = padding_cliff_experiment(*block_solver_agent(3), opt);
  const auto uniform = padding_cliff_experiment(*uniform_agent(), opt);
  for (const auto& c : block.cells) g_all_results.push_back(c.result);
  for (const auto& c : uniform.cells) g_all_results.push_back(c.result);
  std::string row;
  for (int n : opt.targets) {
    const double dom = block.find("dominated", n)->result.s_at_tau;
    const double rnd = block.find("random", n)->result.s_at_tau;
    const double dense = block.find("dense", n)->result.s_at_tau;
    const double u_rnd = uniform.find("random", n)->result.s_at_tau;
    const double u_dense = uniform.find("dense", n)->result.s_at_tau;
    o.require(dom >= 0.99, "dominated " + fmt(dom) + " at N=" + std::to_string(n));
    o.require(std::abs(rnd - u_rnd) <= 0.15, "random far from uniform at N=" + std::to_string(n));
    o.require(std::abs(dense - u_dense) <= 0.15, "dense far from uniform at N=" + std::to_string(n));
    row += " N=" + std::to_string(n) + " dom/rnd/dense " + fmt(dom, 2) + "/" + fmt(rnd, 2) + "/" + fmt(dense, 2);
  }
  o.note("block:3" + row);
  return o;
}

Outcome criterion_metrics() {
  Outcome o;
  // A stochastic agent so the two metrics can differ.
  const auto noisy = noisy_oracle_agent(0.1, 5);
  std::ostringstream log;
  std::vector<EvalResult> first;
  for (int n = 2; n <= 7; ++n) {
    const auto games = eval_set(n, 50);
    EvalOptions opt;
    const auto run = evaluate(*noisy, games, opt);
    g_all_results.push_back(run.result);
    first.push_back(run.result);
    write_responses(log, games, run);
  }
  std::istringstream in(log.str());
  const auto saved = read_responses(in);
  bool exact = true;
  for (std::size_t i = 0; i < first.size(); ++i) {
    const int n = static_cast<int>(i) + 2;
    const auto games = eval_set(n, 50);
    std::vector<std::vector<AgentResponse>> per_game;
    for (const auto& g : games) per_game.push_back(saved.at(g.id));
    const auto again = rescore(games, per_game, 0.10).result;
    exact = exact && eval_result_to_json(again).dump() == eval_result_to_json(first[i]).dump();
  }
  o.require(exact, "rescored results differ");

  int violations = 0;
  for (const auto& r : g_all_results) violations += r.s_at_tau < r.pass_at_1;
  o.require(violations == 0, std::to_string(violations) + " runs with s@0.10 < pass@1");

  const double se = binomial_se(0.5, 50);
  o.require(std::abs(se - 0.0707) < 5e-5, "binomial_se(0.5, 50) = " + fmt(se, 5));
  o.note(std::to_string(g_all_results.size()) + " runs with s >= pass; rescoring exact; se(0.5, 50) = " + fmt(se, 4));
  return o;
}

struct Criterion {
  int id;
  const char* title;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "oracle row", 10, criterion_oracle},
      {2, "uniform row", 60, criterion_uniform},
      {3, "maximin row", 60, criterion_maximin},
      {4, "far-OOD uniform", 60, criterion_far_ood},
      {5, "solver soundness", 120, criterion_solver},
      {6, "residual Lipschitz bound and selector jump", 30, criterion_lipschitz},
      {7, "role-merged cancellation and toy training", 60, criterion_grpo},
      {8, "padding construction", 120, criterion_padding},
      {9, "padding experiment signature", 120, criterion_padding_signature},
      {10, "metric algebra", 60, criterion_metrics},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > c.budget_s) o.require(false, "took " + fmt(secs, 1) + " s, budget " + fmt(c.budget_s, 0) + " s");
    failed += !o.pass;
    std::printf("%s criterion %d (%s) [%.2f s]: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.title, secs, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
