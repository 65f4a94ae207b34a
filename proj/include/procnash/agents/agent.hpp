#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "procnash/core.hpp"
#include "procnash/gen/gamegen.hpp"

namespace procnash {

enum class ParseError { malformed, missing_field, length_mismatch, degenerate_weights };

std::string to_string(ParseError e);
ParseError parse_error_from_string(const std::string& s);

struct AgentResponse {
  std::string raw_text;
  std::optional<StrategyPair> parsed;
  std::optional<ParseError> parse_error;
  std::chrono::duration<double> latency{0};
  std::string transport_error;  // last transport failure when retries ran out
  int attempts = 1;

  bool valid() const { return parsed.has_value(); }
};

// Persisted form; `parsed` is kept for inspection but rescoring re-parses raw_text.
nlohmann::json response_to_json(const AgentResponse& r);
AgentResponse response_from_json(const nlohmann::json& j);

class Agent {
 public:
  virtual ~Agent() = default;

  virtual std::string name() const = 0;

  // k responses for one game. Must be safe to call concurrently for distinct
  // games; failures are reported inside the responses, never thrown.
  virtual std::vector<AgentResponse> propose(const GameRecord& game, int k) const = 0;

  // True when propose(game, k) returns k copies of a single response that
  // depends only on the game.
  virtual bool deterministic() const { return true; }
};

std::unique_ptr<Agent> uniform_agent();
std::unique_ptr<Agent> maximin_agent();
std::unique_ptr<Agent> oracle_agent();
// LP pair plus i.i.d. N(0, sigma^2) noise per component, re-projected through
// the parser. Noise for sample s of a game is keyed on (seed, game id, s).
std::unique_ptr<Agent> noisy_oracle_agent(double sigma, std::uint64_t seed = 0);
// Solves the top-left block x block subgame by LP and zero-extends.
std::unique_ptr<Agent> block_solver_agent(int block);

// "uniform", "maximin", "oracle", "noisy:<sigma>", "block:<k>" or
// "remote:<config.json>".
std::unique_ptr<Agent> make_agent(const std::string& spec, std::uint64_t seed = 0);

}  // namespace procnash
