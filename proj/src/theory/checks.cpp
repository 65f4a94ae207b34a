#include "procnash/theory/checks.hpp"

#include <algorithm>
#include <cmath>

#include "procnash/core/json_io.hpp"
#include "procnash/gen/rng.hpp"
#include "procnash/solver/nash.hpp"

namespace procnash {

using nlohmann::json;

namespace {

MixedStrategy random_strategy(Index n, CounterRng& rng) {
  DenseVector<double> v = DenseVector<double>::Zero(n);
  const auto kind = rng.below(3);
  if (kind == 0) {
    v[static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)))] = 1.0;
    return MixedStrategy(std::move(v));
  }
  for (Index i = 0; i < n; ++i) {
    const bool drop = kind == 2 && rng.uniform01() < 0.4;
    v[i] = drop ? 0.0 : -std::log(1.0 - rng.uniform01());
  }
  if (!(v.sum() > 0.0)) v[0] = 1.0;
  return MixedStrategy(v / v.sum());
}

DenseMatrix<double> random_payoffs(Index n, CounterRng& rng) {
  DenseMatrix<double> a(n, n);
  const bool integer = rng.below(2) == 0;
  for (Index i = 0; i < a.size(); ++i) {
    a.data()[i] = integer ? static_cast<double>(rng.uniform_int(-9, 9)) : rng.uniform(-2.0, 2.0);
  }
  return a;
}

double l1(const MixedStrategy& a, const MixedStrategy& b) { return (a.probs() - b.probs()).cwiseAbs().sum(); }

}  // namespace

double residual(const PayoffMatrix& a, const StrategyPair& pair) {
  if (pair.row.size() != a.n() || pair.col.size() != a.n()) {
    throw ContractError("strategy pair dimensions do not match the game");
  }
  const auto r = response_payoffs(a.entries(), pair.row.probs(), pair.col.probs());
  return r.best_row - r.worst_col;
}

LipschitzTrialLog check_residual_lipschitz(int trials, std::uint64_t seed) {
  if (trials < 1) throw ContractError("need at least one trial");
  LipschitzTrialLog log;
  log.trials = trials;
  for (int t = 0; t < trials; ++t) {
    CounterRng rng(derive_seed(seed, {fnv1a64("lipschitz"), static_cast<std::uint64_t>(t)}));
    const Index n = 2 + static_cast<Index>(rng.below(9));
    const DenseMatrix<double> a = random_payoffs(n, rng);
    DenseMatrix<double> b = a;
    const auto mode = rng.below(10);
    if (mode >= 1 && mode <= 5) {
      const Index i = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)));
      const Index j = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)));
      double delta = rng.uniform(-1.0, 1.0) * std::pow(10.0, -static_cast<double>(rng.below(7)));
      if (delta == 0.0) delta = 1e-3;
      b(i, j) += delta;
      ++log.single_entry;
    } else if (mode > 5) {
      const double scale = std::pow(10.0, -static_cast<double>(rng.below(5)));
      for (Index k = 0; k < b.size(); ++k) b.data()[k] += scale * rng.uniform(-1.0, 1.0);
    }
    const StrategyPair pair{random_strategy(n, rng), random_strategy(n, rng)};
    const PayoffMatrix ma(a), mb(b);
    const double ea = residual(ma, pair);
    const double eb = residual(mb, pair);
    const double dist = max_entry_distance(ma, mb);
    if (dist == 0.0) continue;  // ratio 0/0; the difference is 0 by construction
    ++log.compared;
    const double diff = std::abs(ea - eb);
    log.max_ratio = std::max(log.max_ratio, diff / dist);
    if (diff > 2.0 * dist + log.slack) {
      if (!log.counterexample) log.counterexample = LipschitzCounterexample{ma, mb, pair, ea, eb, dist};
      ++log.violations;
    }
  }
  return log;
}

bool DiscontinuityReport::passed() const {
  return std::all_of(rows.begin(), rows.end(),
                     [](const DiscontinuityRow& r) { return r.l1_jump >= 1.0 && r.matrix_distance == r.eps; });
}

DiscontinuityReport selector_discontinuity_demo(const std::vector<double>& eps_values) {
  DenseMatrix<double> pennies(2, 2);
  pennies << 1, -1, -1, 1;
  const PayoffMatrix zero(DenseMatrix<double>::Zero(2, 2));
  DiscontinuityReport report{solve_zero_sum_lp(zero).pair, {}};
  for (const double eps : eps_values) {
    if (!(eps > 0.0)) throw ContractError("eps values must be positive");
    const PayoffMatrix a_eps((eps * pennies).eval());
    const StrategyPair t = solve_zero_sum_lp(a_eps).pair;
    report.rows.push_back(
        {eps, max_entry_distance(a_eps, zero), l1(t.row, report.at_zero.row) + l1(t.col, report.at_zero.col), t});
  }
  return report;
}

std::string to_string(GrpoMode m) { return m == GrpoMode::cooperative ? "cooperative" : "role_merged"; }

GrpoMode grpo_mode_from_string(const std::string& s) {
  if (s == "cooperative") return GrpoMode::cooperative;
  if (s == "role_merged" || s == "role-merged") return GrpoMode::role_merged;
  throw ContractError("unknown GRPO mode '" + s + "' (expected cooperative or role_merged)");
}

namespace {

struct Moments {
  double mean = 0.0;
  double sigma = 0.0;
};

// Role-merged sums interleave r_i with -r_i so the mean is exactly 0.
Moments moments(const std::vector<const std::vector<double>*>& groups, GrpoMode mode) {
  Moments m;
  double count = 0.0;
  if (mode == GrpoMode::role_merged) {
    double sum = 0.0, sq = 0.0;
    for (const auto* g : groups) {
      for (const double r : *g) {
        sum += r;
        sum += -r;
        sq += r * r;
        sq += r * r;
        count += 2.0;
      }
    }
    m.mean = sum / count;
    m.sigma = std::sqrt(sq / count);
    return m;
  }
  double sum = 0.0;
  for (const auto* g : groups) {
    for (const double r : *g) sum += r;
    count += static_cast<double>(g->size());
  }
  m.mean = sum / count;
  double sq = 0.0;
  for (const auto* g : groups) {
    for (const double r : *g) sq += (r - m.mean) * (r - m.mean);
  }
  m.sigma = std::sqrt(sq / count);
  return m;
}

GrpoGroup build_group(const std::vector<double>& rewards, GrpoMode mode, Moments m) {
  GrpoGroup g{rewards, mode, {}, {}, m.mean, m.sigma};
  const std::size_t size = rewards.size();
  if (mode == GrpoMode::cooperative) {
    for (const double r : rewards) g.advantages.push_back(m.sigma > 0.0 ? (r - m.mean) / m.sigma : 0.0);
    g.per_output_coefficient = g.advantages;
    return g;
  }
  g.advantages.resize(2 * size, 0.0);
  if (m.sigma > 0.0) {
    for (std::size_t i = 0; i < size; ++i) {
      g.advantages[i] = rewards[i] / m.sigma;
      g.advantages[size + i] = -rewards[i] / m.sigma;
    }
  }
  for (std::size_t i = 0; i < size; ++i) g.per_output_coefficient.push_back(g.advantages[i] + g.advantages[size + i]);
  return g;
}

}  // namespace

GrpoGroup grpo_advantages(const std::vector<double>& rewards, GrpoMode mode) {
  if (rewards.empty()) throw ContractError("GRPO group must be non-empty");
  return build_group(rewards, mode, moments({&rewards}, mode));
}

std::vector<GrpoGroup> grpo_advantages_batch(const std::vector<std::vector<double>>& groups, GrpoMode mode) {
  std::vector<const std::vector<double>*> refs;
  for (const auto& g : groups) {
    if (g.empty()) throw ContractError("GRPO group must be non-empty");
    refs.push_back(&g);
  }
  if (refs.empty()) throw ContractError("GRPO batch must be non-empty");
  const Moments m = moments(refs, mode);
  std::vector<GrpoGroup> out;
  for (const auto& g : groups) out.push_back(build_group(g, mode, m));
  return out;
}

CancellationReport grpo_cancellation_check(int trials, std::uint64_t seed) {
  if (trials < 1) throw ContractError("need at least one trial");
  CancellationReport report;
  report.trials = trials;
  for (int t = 0; t < trials; ++t) {
    CounterRng rng(derive_seed(seed, {fnv1a64("grpo-cancel"), static_cast<std::uint64_t>(t)}));
    const std::size_t size = 2 + static_cast<std::size_t>(rng.below(15));
    std::vector<double> rewards(size);
    const auto kind = rng.below(5);
    for (double& r : rewards) {
      switch (kind) {
        case 0:
          r = 0.0;
          break;
        case 1:
          r = static_cast<double>(rng.uniform_int(-9, 9));
          break;
        case 2:
          r = rng.uniform(-1.0, 1.0) * std::pow(10.0, static_cast<double>(rng.uniform_int(-8, 8)));
          break;
        default:
          r = rng.uniform(-1.0, 1.0);
      }
    }
    const GrpoGroup merged = grpo_advantages(rewards, GrpoMode::role_merged);
    double worst = 0.0;
    for (const double c : merged.per_output_coefficient) worst = std::max(worst, std::abs(c));
    report.max_abs_coefficient = std::max(report.max_abs_coefficient, worst);
    if (!(worst <= report.tolerance)) {
      if (report.counterexample.empty()) report.counterexample = rewards;
      ++report.violations;
    }
    const bool constant = std::all_of(rewards.begin(), rewards.end(), [&](double r) { return r == rewards.front(); });
    if (!constant) {
      ++report.nonconstant_draws;
      const GrpoGroup coop = grpo_advantages(rewards, GrpoMode::cooperative);
      const bool nonzero = std::any_of(coop.per_output_coefficient.begin(), coop.per_output_coefficient.end(),
                                       [](double c) { return c != 0.0; });
      report.cooperative_nonzero += nonzero;
    }
  }
  return report;
}

json lipschitz_to_json(const LipschitzTrialLog& log) {
  json j{{"trials", log.trials},       {"compared", log.compared},     {"single_entry", log.single_entry},
         {"max_ratio", log.max_ratio}, {"violations", log.violations}, {"slack", log.slack},
         {"passed", log.passed()}};
  if (log.counterexample) {
    const auto& c = *log.counterexample;
    j["counterexample"] = {{"a", matrix_to_json(c.a)},     {"b", matrix_to_json(c.b)},
                           {"pair", pair_to_json(c.pair)}, {"exploit_a", c.exploit_a},
                           {"exploit_b", c.exploit_b},     {"distance", c.distance}};
  }
  return j;
}

json discontinuity_to_json(const DiscontinuityReport& report) {
  json rows = json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"eps", r.eps},
                    {"matrix_distance", r.matrix_distance},
                    {"l1_jump", r.l1_jump},
                    {"selected", pair_to_json(r.selected)}});
  }
  return json{{"at_zero", pair_to_json(report.at_zero)}, {"rows", rows}, {"passed", report.passed()}};
}

json cancellation_to_json(const CancellationReport& report) {
  json j{{"trials", report.trials},
         {"max_abs_coefficient", report.max_abs_coefficient},
         {"violations", report.violations},
         {"tolerance", report.tolerance},
         {"nonconstant_draws", report.nonconstant_draws},
         {"cooperative_nonzero", report.cooperative_nonzero},
         {"passed", report.passed()}};
  if (!report.counterexample.empty()) j["counterexample"] = report.counterexample;
  return j;
}

}  // namespace procnash
