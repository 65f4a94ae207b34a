#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "procnash/agents/agent.hpp"

namespace procnash {

struct SampleScore {
  bool valid = false;
  double normalized = 1.0;  // invalid samples score as fully exploitable
  double reward = 0.0;
};

struct GameResult {
  std::string game_id;
  std::vector<SampleScore> samples;
  double best_reward = 0.0;      // max over valid samples, 0 if none
  double best_normalized = 1.0;
  double first_reward = 0.0;     // sample 0, 0 if invalid
  int best_sample_index = -1;    // lowest index among ties, -1 if none valid
  bool success = false;          // best normalized exploitability < tau
  bool first_success = false;
};

struct EvalResult {
  int n = 0;
  int count = 0;
  int k = 0;
  double tau = 0.10;
  double s_at_tau = 0.0;
  double pass_at_1 = 0.0;
  double valid_rate = 0.0;  // per sample
  double mean_best_reward = 0.0;
  double se_s = 0.0;
  double se_pass = 0.0;
};

struct EvalOptions {
  int k = 4;
  double tau = 0.10;
  int jobs = 1;
};

struct EvalRun {
  EvalResult result;
  std::vector<GameResult> games;
  std::vector<std::vector<AgentResponse>> responses;  // parallel to games
};

// sqrt(p (1 - p) / n_games).
double binomial_se(double p, int n_games);

SampleScore score_response(const GameRecord& game, const AgentResponse& response);

// Success is strict: normalized exploitability < tau, i.e. reward > 1 - tau.
GameResult score_game(const GameRecord& game, const std::vector<AgentResponse>& responses, double tau);

// Reduction in game order.
EvalResult aggregate(const std::vector<GameResult>& games, int n, int k, double tau);

// k samples per game; agent failures become invalid samples. Output is
// independent of options.jobs.
EvalRun evaluate(const Agent& agent, const std::vector<GameRecord>& games, const EvalOptions& options = {});

// Scores persisted responses again from their raw text.
EvalRun rescore(const std::vector<GameRecord>& games, const std::vector<std::vector<AgentResponse>>& responses,
                double tau);

// Response log: one JSONL line per sample with game_id, n and sample_index.
void write_responses(std::ostream& out, const std::vector<GameRecord>& games, const EvalRun& run);
std::map<std::string, std::vector<AgentResponse>> read_responses(std::istream& in);

// Results schema "evalres/1".
inline constexpr const char* kEvalResultSchema = "evalres/1";

nlohmann::json eval_result_to_json(const EvalResult& r);
EvalResult eval_result_from_json(const nlohmann::json& j);

// Whole results file: {"schema", "agent", "results": [per-size entries]}.
struct EvalFile {
  std::string agent;
  std::vector<EvalResult> results;
};

nlohmann::json eval_file_to_json(const std::string& agent, const std::vector<EvalResult>& results);
EvalFile eval_file_from_json(const nlohmann::json& j);

}  // namespace procnash
