#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "procnash/agents/agent.hpp"
#include "procnash/agents/parse.hpp"
#include "procnash/eval/audits.hpp"
#include "procnash/eval/harness.hpp"
#include "procnash/eval/padding_experiment.hpp"
#include "procnash/gen/gamegen.hpp"
#include "procnash/solver/nash.hpp"
#include "support/oracles.hpp"

using namespace procnash;

namespace {

std::vector<GameRecord> games(int n, int count, std::uint64_t seed = 99) {
  GameSpec spec;
  return make_eval_set(n, count, spec, seed);
}

AgentResponse reply(const std::string& text, int n) { return parse_response(text, n); }

// Emits a fixed list of texts for every game, in order.
class ScriptedAgent : public Agent {
 public:
  explicit ScriptedAgent(std::vector<std::string> texts) : texts_(std::move(texts)) {}
  std::string name() const override { return "scripted"; }
  bool deterministic() const override { return false; }
  std::vector<AgentResponse> propose(const GameRecord& game, int k) const override {
    std::vector<AgentResponse> out;
    for (int s = 0; s < k; ++s)
      out.push_back(parse_response(texts_[static_cast<std::size_t>(s) % texts_.size()], static_cast<int>(game.matrix.n())));
    return out;
  }

 private:
  std::vector<std::string> texts_;
};

// Reads raw entry magnitudes: pure row 0 when the top-left payoff exceeds 0.5,
// otherwise pure last row. Not invariant to positive affine maps.
class ThresholdAgent : public Agent {
 public:
  std::string name() const override { return "threshold"; }
  std::vector<AgentResponse> propose(const GameRecord& game, int k) const override {
    const Index n = game.matrix.n();
    const Index row = game.matrix(0, 0) > 0.5 ? 0 : n - 1;
    const StrategyPair pr{MixedStrategy::pure(n, row), MixedStrategy::uniform(n)};
    return std::vector<AgentResponse>(static_cast<std::size_t>(k), parse_response(serialize_pair(pr), static_cast<int>(n)));
  }
};

// Throws for every other game.
class FlakyAgent : public Agent {
 public:
  std::string name() const override { return "flaky"; }
  std::vector<AgentResponse> propose(const GameRecord& game, int k) const override {
    if (game.id.back() % 2 == 0) throw std::runtime_error("boom");
    return oracle_agent()->propose(game, k);
  }
};

}  // namespace

TEST_CASE("best-of-k success versus pass@1") {
  // Pennies with the column uniform: row (a, 1-a) leaves exploit |1 - 2a|
  // over 2 * range = 4, so the samples score 0.85, 0.925, 0.5 and invalid.
  const auto base = games(2, 1)[0];
  const auto rec = derived_game(base, oracle::from_mat({{1, -1}, {-1, 1}}), "pennies");
  const std::vector<AgentResponse> rs{reply(R"({"row":[0.2,0.8],"col":[0.5,0.5]})", 2),
                                      reply(R"({"row":[0.35,0.65],"col":[0.5,0.5]})", 2),
                                      reply(R"({"row":[1,0],"col":[1,0]})", 2), reply("nonsense", 2)};
  const auto g = score_game(rec, rs, 0.10);
  CHECK(g.samples[0].reward == Catch::Approx(0.85).margin(1e-12));
  CHECK(g.samples[1].reward == Catch::Approx(0.925).margin(1e-12));
  CHECK(g.samples[2].reward == 0.5);
  CHECK_FALSE(g.samples[3].valid);
  CHECK(g.samples[3].reward == 0.0);
  CHECK(g.samples[3].normalized == 1.0);
  CHECK(g.success);
  CHECK(g.best_sample_index == 1);
  CHECK(g.first_reward == g.samples[0].reward);
  CHECK_FALSE(g.first_success);
}

TEST_CASE("success threshold is strict") {
  const auto rec = derived_game(games(2, 1)[0], oracle::from_mat({{1, -1}, {-1, 1}}), "pennies");
  const auto r = reply(R"({"row":[1,0],"col":[0.5,0.5]})", 2);
  const auto score = score_response(rec, r);
  CHECK(score.normalized == 0.25);
  CHECK(score_game(rec, {r}, 0.25).success == false);
  CHECK(score_game(rec, {r}, 0.2500001).success == true);
}

TEST_CASE("ties pick the lowest index and all-invalid games fail") {
  const auto rec = games(3, 1)[0];
  const std::string eq = serialize_pair(solve_zero_sum_lp(rec.matrix).pair);
  const auto g = score_game(rec, {reply("x", 3), reply(eq, 3), reply(eq, 3)}, 0.1);
  CHECK(g.best_sample_index == 1);
  CHECK(g.success);
  CHECK_FALSE(g.first_success);

  const auto none = score_game(rec, {reply("x", 3), reply("{}", 3)}, 0.1);
  CHECK(none.best_sample_index == -1);
  CHECK_FALSE(none.success);
  CHECK(none.best_reward == 0.0);
  CHECK(none.best_normalized == 1.0);
}

TEST_CASE("binomial standard error") {
  CHECK(binomial_se(0.5, 50) == Catch::Approx(0.0707).margin(5e-5));
  CHECK(binomial_se(0.5, 30) == Catch::Approx(0.0913).margin(5e-5));
  CHECK(binomial_se(0.0, 50) == 0.0);
  CHECK(binomial_se(1.0, 50) == 0.0);
  CHECK_THROWS_AS(binomial_se(0.5, 0), ContractError);
  CHECK_THROWS_AS(binomial_se(1.5, 10), ContractError);
}

TEST_CASE("oracle agent is perfect") {
  for (int n = 2; n <= 7; ++n) {
    const auto run = evaluate(*oracle_agent(), games(n, 50));
    CHECK(run.result.s_at_tau == 1.0);
    CHECK(run.result.pass_at_1 == 1.0);
    CHECK(run.result.valid_rate == 1.0);
    CHECK(run.result.mean_best_reward == 1.0);
    CHECK(run.result.se_s == 0.0);
    CHECK(run.result.n == n);
    CHECK(run.result.count == 50);
  }
}

TEST_CASE("metric algebra on stochastic and deterministic agents") {
  EvalOptions opt;
  opt.k = 4;
  for (int n : {2, 4, 6}) {
    const auto set = games(n, 60, 5);
    const auto noisy = evaluate(*noisy_oracle_agent(0.15, 2), set, opt).result;
    CHECK(noisy.s_at_tau >= noisy.pass_at_1);
    for (const char* spec : {"uniform", "maximin", "oracle", "block:2"}) {
      const auto r = evaluate(*make_agent(spec), set, opt).result;
      CHECK(r.s_at_tau == r.pass_at_1);
      CHECK(r.se_s == binomial_se(r.s_at_tau, 60));
    }
  }
}

TEST_CASE("results do not depend on the job count") {
  const auto set = games(5, 40, 8);
  EvalOptions one;
  one.k = 3;
  EvalOptions many = one;
  many.jobs = 7;
  const auto agent = noisy_oracle_agent(0.1, 1);
  const auto a = evaluate(*agent, set, one);
  const auto b = evaluate(*agent, set, many);
  CHECK(eval_result_to_json(a.result).dump() == eval_result_to_json(b.result).dump());
  for (std::size_t g = 0; g < set.size(); ++g)
    for (std::size_t s = 0; s < 3; ++s) CHECK(a.responses[g][s].raw_text == b.responses[g][s].raw_text);
}

TEST_CASE("agent exceptions become invalid samples") {
  const auto set = games(3, 20);
  EvalOptions opt;
  opt.k = 2;
  opt.jobs = 3;
  const auto run = evaluate(FlakyAgent(), set, opt);
  int failed = 0;
  for (std::size_t g = 0; g < set.size(); ++g) {
    REQUIRE(run.responses[g].size() == 2);
    if (set[g].id.back() % 2 == 0) {
      ++failed;
      CHECK_FALSE(run.games[g].success);
      CHECK_FALSE(run.responses[g][0].valid());
    } else {
      CHECK(run.games[g].success);
    }
  }
  CHECK(run.result.s_at_tau == Catch::Approx(1.0 - failed / 20.0));
}

TEST_CASE("rescoring persisted responses is bit-exact") {
  const auto set = games(4, 30, 3);
  EvalOptions opt;
  opt.k = 4;
  const auto run = evaluate(ScriptedAgent({R"({"row":[0.3,0.3,0.2,0.2],"col":[0.25,0.25,0.25,0.25]})", "bad",
                                           R"({"row":[1,0,0,0],"col":[0,0,0,1]})"}),
                            set, opt);
  std::stringstream log;
  write_responses(log, set, run);
  const auto loaded = read_responses(log);
  std::vector<std::vector<AgentResponse>> ordered;
  for (const auto& g : set) ordered.push_back(loaded.at(g.id));
  const auto again = rescore(set, ordered, opt.tau);
  CHECK(eval_result_to_json(again.result).dump() == eval_result_to_json(run.result).dump());
  for (std::size_t g = 0; g < set.size(); ++g)
    for (std::size_t s = 0; s < 4; ++s) CHECK(again.games[g].samples[s].reward == run.games[g].samples[s].reward);
  CHECK(run.result.valid_rate == 0.75);

  const auto j = nlohmann::json::parse(eval_result_to_json(run.result).dump());
  CHECK(eval_result_to_json(eval_result_from_json(j)).dump() == j.dump());

  const auto file = eval_file_to_json("scripted", {run.result, again.result});
  CHECK(file["schema"] == kEvalResultSchema);
  const auto back = eval_file_from_json(nlohmann::json::parse(file.dump()));
  CHECK(back.agent == "scripted");
  REQUIRE(back.results.size() == 2);
  CHECK(back.results[1].s_at_tau == run.result.s_at_tau);
  CHECK_THROWS_AS(eval_file_from_json(nlohmann::json{{"schema", "evalres/0"}}), ContractError);
}

TEST_CASE("degenerate evaluation inputs") {
  CHECK(aggregate({}, 2, 4, 0.1).count == 0);
  const auto rec = games(2, 1)[0];
  CHECK_THROWS_AS(evaluate(*oracle_agent(), {rec}, EvalOptions{0, 0.1, 1}), ContractError);
}

TEST_CASE("audits: oracle and uniform are invariant") {
  std::vector<GameRecord> set;
  for (int n = 2; n <= 6; ++n)
    for (const auto& g : games(n, 20, 17)) set.push_back(g);
  for (const char* spec : {"oracle", "uniform"}) {
    const auto agent = make_agent(spec);
    const auto perm = permutation_equivariance_audit(*agent, set, 3, 1);
    CHECK(perm.kind == "permutation");
    CHECK(perm.count == 300);
    CHECK(perm.mean == 0.0);
    CHECK(perm.max == 0.0);
    const auto aff = affine_invariance_audit(*agent, set, 3, 1);
    CHECK(aff.max <= 1e-12);
    CHECK(aff.per_size.size() == 5);
    CHECK(aff.per_size.front().n == 2);
  }
}

TEST_CASE("audits detect agents that are not invariant") {
  std::vector<GameRecord> set;
  for (int n = 3; n <= 5; ++n)
    for (const auto& g : games(n, 30, 4)) set.push_back(g);
  const auto noisy = noisy_oracle_agent(0.1, 9);
  CHECK(permutation_equivariance_audit(*noisy, set, 2, 1).mean > 0.0);
  CHECK(affine_invariance_audit(*noisy, set, 2, 1).mean > 0.0);

  const auto thr = affine_invariance_audit(ThresholdAgent(), set, 4, 3);
  CHECK(thr.max > 0.0);
  const auto j = audit_to_json(thr);
  CHECK(j["trials"].size() == thr.trials.size());
  CHECK(j["trials"][0]["transform"].contains("c"));
}

TEST_CASE("audit excludes invalid responses") {
  const auto set = games(3, 10);
  const auto stats = permutation_equivariance_audit(ScriptedAgent({"nope"}), set, 2, 1);
  CHECK(stats.count == 0);
  CHECK(stats.excluded == 20);
}

TEST_CASE("padding experiment") {
  PaddingExperimentOptions opt;
  opt.count = 20;
  opt.k = 1;
  opt.targets = {8, 12};

  const auto oracle_table = padding_cliff_experiment(*oracle_agent(), opt);
  CHECK(oracle_table.cells.size() == 1 + 3 * 2);
  for (const auto& cell : oracle_table.cells) CHECK(cell.result.s_at_tau == 1.0);
  REQUIRE(oracle_table.find("random", 12) != nullptr);
  CHECK(oracle_table.find("random", 13) == nullptr);

  // Solving only the original block is exact under dominated padding and
  // poor elsewhere.
  const auto block = padding_cliff_experiment(*block_solver_agent(3), opt);
  CHECK(block.find("base", 3)->result.s_at_tau == 1.0);
  for (int n : opt.targets) {
    CHECK(block.find("dominated", n)->result.s_at_tau == 1.0);
    CHECK(block.find("random", n)->result.s_at_tau <= 0.3);
    CHECK(block.find("dense", n)->result.s_at_tau <= 0.3);
  }

  const auto uni = padding_cliff_experiment(*uniform_agent(), opt);
  CHECK(uni.find("dense", 12)->result.s_at_tau <= 0.15);

  const auto csv = padding_plot_csv(block);
  CHECK(csv.rfind("condition,n,s_at_tau,se_s,pass_at_1,valid_rate\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 8);
  CHECK(padding_table_to_json(block)["results"].size() == 7);
}
