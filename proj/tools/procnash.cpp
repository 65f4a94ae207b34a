#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>

#include "cli_support.hpp"
#include "procnash/agents/agent.hpp"
#include "procnash/core/json_io.hpp"
#include "procnash/eval/audits.hpp"
#include "procnash/eval/harness.hpp"
#include "procnash/eval/padding_experiment.hpp"
#include "procnash/gen/gamegen.hpp"
#include "procnash/solver/nash.hpp"
#include "procnash/theory/checks.hpp"
#include "procnash/theory/toy_grpo.hpp"

using namespace procnash;
using namespace procnash::cli;
using nlohmann::json;

namespace {

// Writes to a file, or stdout for "" and "-".
class Output {
 public:
  explicit Output(const std::string& path) : path_(path) {
    if (to_file()) {
      file_.open(path);
      if (!file_) throw ConfigError("cannot write " + path);
    }
  }
  std::ostream& stream() { return to_file() ? static_cast<std::ostream&>(file_) : std::cout; }
  bool to_file() const { return !path_.empty() && path_ != "-"; }

 private:
  std::string path_;
  std::ofstream file_;
};

std::vector<GameRecord> load_games(const std::string& path) {
  if (path == "-") return read_game_records(std::cin);
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open games file " + path);
  return read_game_records(in);
}

std::map<int, std::vector<GameRecord>> by_size(const std::vector<GameRecord>& games) {
  std::map<int, std::vector<GameRecord>> out;
  for (const auto& g : games) out[static_cast<int>(g.matrix.n())].push_back(g);
  return out;
}

struct SetArgs {
  std::string sizes = "2..7";
  int count = 50;
  std::uint64_t seed = 0;
  std::string dist = "integer";
  double density = 0.2;
  bool no_normalize = false;
  std::string games;

  void add(CLI::App* sub, bool seed_required) {
    sub->add_option("--sizes", sizes, "sizes, e.g. 2..7 or 3,5,8")->capture_default_str();
    sub->add_option("--count", count, "games per size")->capture_default_str()->check(CLI::PositiveNumber);
    auto* s = sub->add_option("--seed", seed, "evaluation seed");
    if (seed_required) s->required();
    sub->add_option("--dist", dist, "integer, gaussian or sparse")->capture_default_str();
    sub->add_option("--density", density, "nonzero fraction for sparse games")->capture_default_str();
    sub->add_flag("--no-normalize", no_normalize, "keep raw payoffs");
    sub->add_option("--games", games, "read games from a JSONL file instead of generating them");
  }

  GameSpec spec() const {
    GameSpec s;
    s.distribution = distribution_from_string(dist);
    s.sparse_density = density;
    s.normalize = !no_normalize;
    return s;
  }

  // Generated or loaded, grouped by size.
  std::map<int, std::vector<GameRecord>> build() const {
    if (!games.empty()) return by_size(load_games(games));
    std::map<int, std::vector<GameRecord>> out;
    for (int n : parse_sizes(sizes)) out[n] = make_eval_set(n, count, spec(), seed);
    return out;
  }

  json to_json() const {
    return json{{"sizes", sizes}, {"count", count}, {"seed", seed}, {"dist", dist},
                {"density", density}, {"normalize", !no_normalize}, {"games", games}};
  }
};

void finish(RunManifest& m, const std::string& out, json config) {
  if (out.empty() || out == "-") return;
  m.set_config(std::move(config));
  m.add_output(out);
  m.write(out);
}

// --- gen -------------------------------------------------------------------

struct GenCmd {
  SetArgs set;
  std::string out;

  void add(CLI::App* sub) {
    set.add(sub, true);
    sub->add_option("--out", out, "JSONL output (stdout if omitted)");
  }

  int run(RunManifest& m) {
    if (!set.games.empty()) throw ConfigError("gen does not take --games");
    Output o(out);
    int total = 0;
    for (const auto& [n, games] : set.build())
      for (const auto& g : games) {
        write_jsonl(o.stream(), record_to_json(g));
        ++total;
      }
    std::cerr << "wrote " << total << " games\n";
    m.add_seed("eval_seed", set.seed);
    finish(m, out, set.to_json());
    return kOk;
  }
};

// --- pad -------------------------------------------------------------------

struct PadCmd {
  SetArgs set;
  CLI::Option* seeded_opt = nullptr;
  bool seeded = false;
  int target = 8;
  std::string kind = "dominated";
  bool shuffle = false;
  std::uint64_t salt = 0;
  std::string out;

  void add(CLI::App* sub) {
    set.sizes = "3";
    set.add(sub, false);
    seeded_opt = sub->get_option("--seed");
    sub->add_option("--target", target, "padded size N")->capture_default_str();
    sub->add_option("--kind", kind, "dominated or random")->capture_default_str();
    sub->add_flag("--shuffle", shuffle, "seeded placement of padded actions");
    sub->add_option("--salt", salt, "placement and fill salt")->capture_default_str();
    sub->add_option("--out", out, "JSONL output (stdout if omitted)");
  }

  int run(RunManifest& m) {
    if (kind != "dominated" && kind != "random") throw ConfigError("--kind must be dominated or random");
    seeded = seeded_opt->count() > 0;
    if (set.games.empty() && !seeded) throw ConfigError("--seed is required when pad generates its base games");
    PadOptions opt{shuffle, salt};
    Output o(out);
    bool certified = true;
    for (const auto& [n, games] : set.build())
      for (const auto& g : games) {
        const auto rec = kind == "dominated" ? dominated_pad(g, target, opt) : random_pad(g, target, opt);
        if (kind == "dominated" && !(rec.reference_exploit < 1e-8)) certified = false;
        write_jsonl(o.stream(), record_to_json(rec));
      }
    if (!set.games.empty()) m.add_input(set.games);
    m.add_seed("eval_seed", set.seed);
    json cfg = set.to_json();
    cfg.update(json{{"target", target}, {"kind", kind}, {"shuffle", shuffle}, {"salt", salt}});
    finish(m, out, cfg);
    if (!certified) {
      std::cerr << "dominated padding lost the base equilibrium on at least one game\n";
      return kVerificationFailure;
    }
    return kOk;
  }
};

// --- solve -----------------------------------------------------------------

struct SolveCmd {
  std::string games = "-";
  std::string method = "lp";
  std::string out;

  void add(CLI::App* sub) {
    sub->add_option("--games", games, "GameRecord JSONL, '-' for standard input")->capture_default_str();
    sub->add_option("--method", method, "lp, support or both (both skips the cross-check above 5 actions)")->capture_default_str();
    sub->add_option("--out", out, "JSONL output (stdout if omitted)");
  }

  int run(RunManifest& m) {
    if (method != "lp" && method != "support" && method != "both") throw ConfigError("--method must be lp, support or both");
    const auto all = load_games(games);
    if (games != "-") m.add_input(games);
    Output o(out);
    int failures = 0;
    // A padded file is solved as its padded games.
    for (const auto& g : all) {
      json line{{"game_id", g.id}, {"n", g.matrix.n()}};
      std::optional<Equilibrium> lp, se;
      if (method != "support") lp = solve_zero_sum_lp(g.matrix);
      // "both" cross-checks only where enumeration is defined.
      if (method == "support" || (method == "both" && g.matrix.n() <= kMaxEnumerationActions))
        se = support_enumeration(g.matrix);
      for (const auto* eq : {lp ? &*lp : nullptr, se ? &*se : nullptr}) {
        if (!eq) continue;
        const auto rep = exploitability(g.matrix, eq->pair);
        json e = pair_to_json(eq->pair);
        e["value"] = eq->value;
        e["exploit"] = rep.exploit;
        e["degenerate"] = eq->degenerate;
        e["verified"] = rep.exploit < 1e-8;
        if (!(rep.exploit < 1e-8)) ++failures;
        line[to_string(eq->method)] = e;
      }
      if (lp && se) {
        const bool agree = std::abs(lp->value - se->value) <= 1e-8;
        line["agree"] = agree;
        if (!agree) ++failures;
      }
      write_jsonl(o.stream(), line);
    }
    finish(m, out, json{{"games", games}, {"method", method}});
    if (failures) {
      std::cerr << failures << " certificate or cross-check failures\n";
      return kVerificationFailure;
    }
    return kOk;
  }
};

// --- eval ------------------------------------------------------------------

struct EvalCmd {
  SetArgs set;
  std::string agent = "uniform";
  int k = 4;
  double tau = 0.10;
  int jobs = 1;
  std::string out, responses, rescore_path;

  void add(CLI::App* sub) {
    set.add(sub, true);
    sub->add_option("--agent", agent, "uniform, maximin, oracle, noisy:<sigma>, block:<k> or remote:<config.json>")
        ->capture_default_str();
    sub->add_option("--k", k, "samples per game")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--tau", tau, "success threshold on normalized exploitability")->capture_default_str();
    sub->add_option("--jobs", jobs, "games evaluated concurrently")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--out", out, "results JSON (evalres/1)");
    sub->add_option("--responses", responses, "write every raw response to this JSONL file");
    sub->add_option("--rescore", rescore_path, "score a saved response log instead of querying the agent");
  }

  int run(RunManifest& m) {
    const auto sets = set.build();
    std::vector<EvalResult> results;
    std::unique_ptr<Agent> a;
    std::map<std::string, std::vector<AgentResponse>> saved;
    if (!rescore_path.empty()) {
      std::ifstream in(rescore_path);
      if (!in) throw ConfigError("cannot open response log " + rescore_path);
      saved = read_responses(in);
      m.add_input(rescore_path);
    } else {
      a = make_agent(agent, set.seed);
    }
    std::unique_ptr<Output> log;
    if (!responses.empty()) log = std::make_unique<Output>(responses);

    long samples = 0, exhausted = 0;
    for (const auto& [n, games] : sets) {
      EvalRun run;
      if (a) {
        run = evaluate(*a, games, EvalOptions{k, tau, jobs});
      } else {
        std::vector<std::vector<AgentResponse>> per_game;
        for (const auto& g : games) {
          const auto it = saved.find(g.id);
          if (it == saved.end()) throw ConfigError("response log has no entry for game " + g.id);
          per_game.push_back(it->second);
        }
        run = rescore(games, per_game, tau);
      }
      for (const auto& rs : run.responses)
        for (const auto& r : rs) {
          ++samples;
          exhausted += !r.transport_error.empty();
        }
      if (log) write_responses(log->stream(), games, run);
      results.push_back(run.result);
    }

    const std::string name = a ? a->name() : agent;
    const json file = eval_file_to_json(name, results);
    std::cout << render_report({file});
    if (!out.empty()) {
      Output o(out);
      o.stream() << file.dump(2) << '\n';
    }
    if (!set.games.empty()) m.add_input(set.games);
    if (!responses.empty()) m.add_output(responses);
    m.add_seed("eval_seed", set.seed);
    json cfg = set.to_json();
    cfg.update(json{{"agent", agent}, {"k", k}, {"tau", tau}, {"jobs", jobs}, {"rescore", rescore_path}});
    finish(m, out, cfg);

    if (exhausted > 0) {
      std::cerr << exhausted << " of " << samples << " samples exhausted their retries\n";
      if (exhausted == samples) return kTransportExhausted;
    }
    return kOk;
  }
};

// --- audit -----------------------------------------------------------------

struct AuditCmd {
  SetArgs set;
  std::string agent = "uniform";
  std::string kind = "both";
  int trials = 1;
  AffineRange range;
  int jobs = 1;
  bool with_trials = false;
  std::string out;

  void add(CLI::App* sub) {
    set.add(sub, true);
    sub->add_option("--agent", agent, "agent spec, as for eval")->capture_default_str();
    sub->add_option("--kind", kind, "permutation, affine or both")->capture_default_str();
    sub->add_option("--trials", trials, "transforms per game")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--c-lo", range.c_lo)->capture_default_str();
    sub->add_option("--c-hi", range.c_hi)->capture_default_str();
    sub->add_option("--d-lo", range.d_lo)->capture_default_str();
    sub->add_option("--d-hi", range.d_hi)->capture_default_str();
    sub->add_option("--jobs", jobs)->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_flag("--with-trials", with_trials, "include every trial in the output");
    sub->add_option("--out", out, "audit JSON");
  }

  int run(RunManifest& m) {
    if (kind != "permutation" && kind != "affine" && kind != "both") {
      throw ConfigError("--kind must be permutation, affine or both");
    }
    const auto a = make_agent(agent, set.seed);
    std::vector<GameRecord> games;
    for (auto& [n, g] : set.build()) games.insert(games.end(), g.begin(), g.end());
    json audits = json::array();
    if (kind != "affine") audits.push_back(audit_to_json(permutation_equivariance_audit(*a, games, trials, set.seed, jobs), with_trials));
    if (kind != "permutation") {
      audits.push_back(audit_to_json(affine_invariance_audit(*a, games, trials, set.seed, range, jobs), with_trials));
    }
    const json file{{"agent", a->name()}, {"audits", audits}};
    std::cout << render_report({file});
    if (!out.empty()) {
      Output o(out);
      o.stream() << file.dump(2) << '\n';
    }
    if (!set.games.empty()) m.add_input(set.games);
    m.add_seed("audit_seed", set.seed);
    json cfg = set.to_json();
    cfg.update(json{{"agent", agent}, {"kind", kind}, {"trials", trials}, {"c_lo", range.c_lo}, {"c_hi", range.c_hi},
                    {"d_lo", range.d_lo}, {"d_hi", range.d_hi}});
    finish(m, out, cfg);
    return kOk;
  }
};

// --- pad-exp ---------------------------------------------------------------

struct PadExpCmd {
  PaddingExperimentOptions opt;
  std::string agent = "uniform";
  std::string targets = "8,12,15,20";
  std::string dist = "integer";
  std::string out, csv;

  void add(CLI::App* sub) {
    sub->add_option("--agent", agent, "agent spec, as for eval")->capture_default_str();
    sub->add_option("--base-n", opt.base_n, "size of the base games")->capture_default_str();
    sub->add_option("--targets", targets, "padded sizes")->capture_default_str();
    sub->add_option("--count", opt.count, "games per cell")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--k", opt.k)->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--tau", opt.tau)->capture_default_str();
    sub->add_option("--seed", opt.seed, "evaluation seed")->required();
    sub->add_option("--dist", dist)->capture_default_str();
    sub->add_flag("--shuffle", opt.pad.shuffle, "seeded placement of padded actions");
    sub->add_option("--jobs", opt.jobs)->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--out", out, "padding table JSON");
    sub->add_option("--csv", csv, "plot-ready CSV");
  }

  int run(RunManifest& m) {
    opt.targets = parse_sizes(targets);
    opt.spec_template.distribution = distribution_from_string(dist);
    const auto a = make_agent(agent, opt.seed);
    const auto table = padding_cliff_experiment(*a, opt);
    const json j = padding_table_to_json(table);
    std::cout << render_report({j});
    if (!out.empty()) {
      Output o(out);
      o.stream() << j.dump(2) << '\n';
    }
    if (!csv.empty()) {
      Output o(csv);
      o.stream() << padding_plot_csv(table);
      m.add_output(csv);
    }
    m.add_seed("seed", opt.seed);
    finish(m, out,
           json{{"agent", agent}, {"base_n", opt.base_n}, {"targets", opt.targets}, {"count", opt.count}, {"k", opt.k},
                {"tau", opt.tau}, {"dist", dist}, {"shuffle", opt.pad.shuffle}});
    return kOk;
  }
};

// --- verify-theorems -------------------------------------------------------

struct VerifyCmd {
  int trials = 10000;
  std::uint64_t seed = 0;
  std::string out;

  void add(CLI::App* sub) {
    sub->add_option("--trials", trials, "random trials per property")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "seed for the random trials")->required();
    sub->add_option("--out", out, "JSON report");
  }

  int run(RunManifest& m) {
    const auto lip = check_residual_lipschitz(trials, seed);
    const auto disc = selector_discontinuity_demo({1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8});
    const auto cancel = grpo_cancellation_check(trials, seed);

    GameSpec spec;
    const auto base = make_eval_set(2, 1, spec, seed)[0];
    DenseMatrix<double> pennies(2, 2);
    pennies << 1, -1, -1, 1;
    const auto game = derived_game(base, PayoffMatrix(pennies), "pennies");
    const auto merged = toy_grpo_train(game, ToyPolicyConfig{}, GrpoMode::role_merged, 100, seed);
    const bool frozen = std::all_of(merged.row_logits.begin(), merged.row_logits.end(), [](double x) { return x == 0.0; }) &&
                        std::all_of(merged.col_logits.begin(), merged.col_logits.end(), [](double x) { return x == 0.0; });

    const auto line = [](bool ok, const std::string& what) {
      std::cout << (ok ? "PASS " : "FAIL ") << what << '\n';
    };
    line(lip.passed(), "residual is 2-Lipschitz (" + std::to_string(lip.trials) + " trials, max ratio " +
                           std::to_string(lip.max_ratio) + ")");
    line(disc.passed(), "LP selector jumps at the zero game");
    line(cancel.passed(), "role-merged advantages cancel (" + std::to_string(cancel.trials) + " draws)");
    line(frozen, "role-merged toy policy is stationary over 100 steps");
    if (!lip.passed()) std::cout << "  Lipschitz counterexample: " << lipschitz_to_json(lip)["counterexample"].dump() << '\n';
    if (!disc.passed()) std::cout << "  discontinuity rows: " << discontinuity_to_json(disc)["rows"].dump() << '\n';
    if (!cancel.passed()) std::cout << "  cancellation counterexample: " << json(cancel.counterexample).dump() << '\n';
    if (!frozen) std::cout << "  role-merged logits: " << json(merged.row_logits).dump() << '\n';

    if (!out.empty()) {
      Output o(out);
      o.stream() << json{{"lipschitz", lipschitz_to_json(lip)},
                         {"discontinuity", discontinuity_to_json(disc)},
                         {"cancellation", cancellation_to_json(cancel)},
                         {"role_merged_stationary", frozen}}
                        .dump(2)
                 << '\n';
    }
    m.add_seed("seed", seed);
    finish(m, out, json{{"trials", trials}});
    return lip.passed() && disc.passed() && cancel.passed() && frozen ? kOk : kVerificationFailure;
  }
};

// --- train-toy -------------------------------------------------------------

struct TrainToyCmd {
  ToyPolicyConfig config;
  std::string game = "pennies";
  std::string games_file;
  std::uint64_t seed = 0;
  std::string mode = "both";
  int steps = 500;
  int window = 50;
  bool batch_norm = false;
  std::string out;

  void add(CLI::App* sub) {
    sub->add_option("--game", game, "pennies, or a size for a generated game (e.g. 3)")->capture_default_str();
    sub->add_option("--games", games_file, "take the first game of this JSONL file");
    sub->add_option("--seed", seed, "game and sampling seed")->required();
    sub->add_option("--mode", mode, "cooperative, role_merged or both")->capture_default_str();
    sub->add_option("--steps", steps)->capture_default_str();
    sub->add_option("--lr", config.learning_rate)->capture_default_str();
    sub->add_option("--group-size", config.group_size)->capture_default_str();
    sub->add_option("--groups", config.groups_per_step, "groups per step")->capture_default_str();
    sub->add_flag("--batch-norm", batch_norm, "normalize advantages over the whole batch");
    sub->add_option("--kl", config.kl_coef, "pull toward the uniform start")->capture_default_str();
    sub->add_option("--grid", config.grid, "grid points per simplex edge")->capture_default_str();
    sub->add_option("--window", window, "window width for the summary")->capture_default_str();
    sub->add_option("--out", out, "JSONL trace");
  }

  GameRecord target() const {
    if (!games_file.empty()) {
      const auto games = load_games(games_file);
      if (games.empty()) throw ConfigError(games_file + " holds no games");
      return games.front();
    }
    GameSpec spec;
    if (game == "pennies") {
      const auto base = make_eval_set(2, 1, spec, seed)[0];
      DenseMatrix<double> m(2, 2);
      m << 1, -1, -1, 1;
      return derived_game(base, PayoffMatrix(m), "pennies");
    }
    const auto sizes = parse_sizes(game);
    return make_eval_set(sizes.front(), 1, spec, seed)[0];
  }

  int run(RunManifest& m) {
    config.normalization = batch_norm ? GroupNormalization::batch : GroupNormalization::group;
    std::vector<GrpoMode> modes;
    if (mode == "both") {
      modes = {GrpoMode::cooperative, GrpoMode::role_merged};
    } else {
      modes = {grpo_mode_from_string(mode)};
    }
    const auto g = target();
    std::unique_ptr<Output> o;
    if (!out.empty()) o = std::make_unique<Output>(out);
    for (auto md : modes) {
      const auto trace = toy_grpo_train(g, config, md, steps, seed);
      std::cout << to_string(md) << ": expected exploitability " << trace.initial_expected_exploit;
      for (double w : window_means(trace, window)) std::cout << " -> " << w;
      std::cout << (trace.diverged ? " (diverged)" : "") << '\n';
      if (o) {
        for (const auto& s : trace.steps) {
          json j = toy_step_to_json(s);
          j["mode"] = to_string(md);
          o->stream() << j.dump() << '\n';
        }
      }
    }
    if (!games_file.empty()) m.add_input(games_file);
    m.add_seed("seed", seed);
    finish(m, out,
           json{{"game", g.id}, {"mode", mode}, {"steps", steps}, {"lr", config.learning_rate},
                {"group_size", config.group_size}, {"groups", config.groups_per_step}, {"batch_norm", batch_norm},
                {"kl", config.kl_coef}, {"grid", config.grid}});
    return kOk;
  }
};

// --- report ----------------------------------------------------------------

struct ReportCmd {
  std::vector<std::string> inputs;
  std::string out;

  void add(CLI::App* sub) {
    sub->add_option("inputs", inputs, "results, padding or audit JSON files")->required();
    sub->add_option("--out", out, "markdown output (stdout if omitted)");
  }

  int run(RunManifest& m) {
    std::vector<json> docs;
    for (const auto& path : inputs) {
      std::ifstream in(path);
      if (!in) throw ConfigError("cannot open " + path);
      const json j = json::parse(in, nullptr, false);
      if (j.is_discarded()) throw ConfigError(path + " is not JSON");
      docs.push_back(j);
      m.add_input(path);
    }
    Output o(out);
    o.stream() << render_report(docs);
    finish(m, out, json{{"inputs", inputs}});
    return kOk;
  }
};

std::optional<std::string> find_config(const std::vector<std::string>& args) {
  for (std::size_t i = 2; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return std::nullopt;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  CLI::App app{"Zero-sum matrix game generation, solving and agent evaluation"};
  app.set_version_flag("--version", PROCNASH_VERSION);
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  GenCmd gen;
  PadCmd pad;
  SolveCmd solve;
  EvalCmd eval;
  AuditCmd audit;
  PadExpCmd pad_exp;
  VerifyCmd verify;
  TrainToyCmd train;
  ReportCmd report;

  std::map<CLI::App*, std::function<int(RunManifest&)>> runners;
  const auto reg = [&](const char* name, const char* help, auto& cmd) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", "key=value file mirroring the flags; flags win");
    cmd.add(sub);
    runners[sub] = [&cmd](RunManifest& m) { return cmd.run(m); };
  };
  reg("gen", "generate evaluation games", gen);
  reg("pad", "pad games to a larger size", pad);
  reg("solve", "solve games exactly", solve);
  reg("eval", "evaluate an agent", eval);
  reg("audit", "permutation and affine invariance audits", audit);
  reg("pad-exp", "padding cliff experiment", pad_exp);
  reg("verify-theorems", "numerical checks of the analytical properties", verify);
  reg("train-toy", "toy GRPO training on a simplex grid", train);
  reg("report", "render results as markdown tables", report);

  try {
    if (const auto cfg = find_config(args)) {
      CLI::App* sub = app.get_subcommand_no_throw(args[1]);
      if (sub == nullptr) throw ConfigError("--config must follow a subcommand");
      args = merge_config_args(*sub, args, read_config_file(*cfg));
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }

  std::vector<char*> cargs;
  for (auto& a : args) cargs.push_back(a.data());
  try {
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  for (auto& [sub, run] : runners) {
    if (!sub->parsed()) continue;
    RunManifest manifest(sub->get_name(), args);
    try {
      return run(manifest);
    } catch (const ConfigError& e) {
      std::cerr << "config error: " << e.what() << '\n';
      return kConfigError;
    } catch (const ContractError& e) {
      std::cerr << "invalid input: " << e.what() << '\n';
      return kConfigError;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kRuntimeError;
    }
  }
  return kConfigError;
}
