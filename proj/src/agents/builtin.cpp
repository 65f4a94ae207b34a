#include <chrono>

#include "procnash/agents/agent.hpp"
#include "procnash/agents/parse.hpp"
#include "procnash/core/json_io.hpp"
#include "procnash/solver/nash.hpp"

namespace procnash {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

// Built-in agents speak the same text protocol as remote models so the parser
// sits on every path.
AgentResponse respond(const std::string& text, int n, Clock::time_point started) {
  AgentResponse r = parse_response(text, n);
  r.latency = Clock::now() - started;
  return r;
}

std::vector<AgentResponse> repeat(AgentResponse r, int k) { return std::vector<AgentResponse>(static_cast<std::size_t>(k), r); }

class PairAgent : public Agent {
 public:
  using Strategy = StrategyPair (*)(const PayoffMatrix&);

  PairAgent(std::string name, Strategy strategy) : name_(std::move(name)), strategy_(strategy) {}

  std::string name() const override { return name_; }

  std::vector<AgentResponse> propose(const GameRecord& game, int k) const override {
    const auto started = Clock::now();
    const int n = static_cast<int>(game.matrix.n());
    return repeat(respond(serialize_pair(strategy_(game.matrix)), n, started), k);
  }

 private:
  std::string name_;
  Strategy strategy_;
};

StrategyPair uniform_of(const PayoffMatrix& a) { return uniform_pair(a.n()); }
StrategyPair oracle_of(const PayoffMatrix& a) { return solve_zero_sum_lp(a).pair; }

class NoisyOracleAgent : public Agent {
 public:
  NoisyOracleAgent(double sigma, std::uint64_t seed) : sigma_(sigma), seed_(seed) {
    if (!(sigma >= 0.0)) throw ContractError("noise scale must be nonnegative");
  }

  std::string name() const override { return "noisy:" + json(sigma_).dump(); }
  bool deterministic() const override { return sigma_ == 0.0; }

  std::vector<AgentResponse> propose(const GameRecord& game, int k) const override {
    const auto started = Clock::now();
    const StrategyPair eq = solve_zero_sum_lp(game.matrix).pair;
    const int n = static_cast<int>(game.matrix.n());
    std::vector<AgentResponse> out;
    for (int s = 0; s < k; ++s) {
      CounterRng rng(derive_seed(seed_, {fnv1a64(game.id), static_cast<std::uint64_t>(s)}));
      DenseVector<double> row = eq.row.probs();
      DenseVector<double> col = eq.col.probs();
      if (sigma_ > 0.0) {
        for (Index i = 0; i < n; ++i) row[i] += sigma_ * rng.normal();
        for (Index i = 0; i < n; ++i) col[i] += sigma_ * rng.normal();
      }
      out.push_back(respond(serialize_weights(row, col), n, started));
    }
    return out;
  }

 private:
  double sigma_;
  std::uint64_t seed_;
};

class BlockSolverAgent : public Agent {
 public:
  explicit BlockSolverAgent(int block) : block_(block) {
    if (block < 2) throw ContractError("block size must be at least 2");
  }

  std::string name() const override { return "block:" + std::to_string(block_); }

  std::vector<AgentResponse> propose(const GameRecord& game, int k) const override {
    const auto started = Clock::now();
    const Index n = game.matrix.n();
    const Index b = std::min<Index>(block_, n);
    const PayoffMatrix sub(game.matrix.entries().topLeftCorner(b, b));
    const StrategyPair eq = solve_zero_sum_lp(sub).pair;
    DenseVector<double> row = DenseVector<double>::Zero(n);
    DenseVector<double> col = DenseVector<double>::Zero(n);
    row.head(b) = eq.row.probs();
    col.head(b) = eq.col.probs();
    return repeat(respond(serialize_weights(row, col), static_cast<int>(n), started), k);
  }

 private:
  int block_;
};

}  // namespace

std::string to_string(ParseError e) {
  switch (e) {
    case ParseError::malformed:
      return "malformed";
    case ParseError::missing_field:
      return "missing_field";
    case ParseError::length_mismatch:
      return "length_mismatch";
    case ParseError::degenerate_weights:
      return "degenerate_weights";
  }
  return "malformed";
}

ParseError parse_error_from_string(const std::string& s) {
  for (auto e : {ParseError::malformed, ParseError::missing_field, ParseError::length_mismatch,
                 ParseError::degenerate_weights}) {
    if (to_string(e) == s) return e;
  }
  throw ContractError("unknown parse error tag '" + s + "'");
}

json response_to_json(const AgentResponse& r) {
  json j{{"raw_text", r.raw_text},
         {"valid", r.valid()},
         {"parse_error", r.parse_error ? json(to_string(*r.parse_error)) : json(nullptr)},
         {"latency_ms", std::chrono::duration<double, std::milli>(r.latency).count()},
         {"attempts", r.attempts}};
  if (r.parsed) j["pair"] = pair_to_json(*r.parsed);
  if (!r.transport_error.empty()) j["transport_error"] = r.transport_error;
  return j;
}

AgentResponse response_from_json(const json& j) {
  AgentResponse r;
  r.raw_text = j.at("raw_text").get<std::string>();
  if (j.contains("pair")) r.parsed = pair_from_json(j.at("pair"));
  if (j.contains("parse_error") && !j.at("parse_error").is_null()) {
    r.parse_error = parse_error_from_string(j.at("parse_error").get<std::string>());
  }
  r.latency = std::chrono::duration<double, std::milli>(j.value("latency_ms", 0.0));
  r.transport_error = j.value("transport_error", std::string{});
  r.attempts = j.value("attempts", 1);
  return r;
}

std::unique_ptr<Agent> uniform_agent() { return std::make_unique<PairAgent>("uniform", &uniform_of); }
std::unique_ptr<Agent> maximin_agent() { return std::make_unique<PairAgent>("maximin", &maximin_pure); }
std::unique_ptr<Agent> oracle_agent() { return std::make_unique<PairAgent>("oracle", &oracle_of); }

std::unique_ptr<Agent> noisy_oracle_agent(double sigma, std::uint64_t seed) {
  return std::make_unique<NoisyOracleAgent>(sigma, seed);
}

std::unique_ptr<Agent> block_solver_agent(int block) { return std::make_unique<BlockSolverAgent>(block); }

}  // namespace procnash
