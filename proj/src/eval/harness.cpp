#include "procnash/eval/harness.hpp"

#include <cmath>
#include <istream>
#include <ostream>

#include "procnash/agents/parse.hpp"
#include "procnash/eval/parallel.hpp"

namespace procnash {

using nlohmann::json;

namespace {

int common_size(const std::vector<GameRecord>& games) {
  if (games.empty()) throw ContractError("evaluation needs at least one game");
  const int n = static_cast<int>(games.front().matrix.n());
  for (const auto& g : games) {
    if (g.matrix.n() != n) throw ContractError("all games in one evaluation must share n");
  }
  return n;
}

std::vector<AgentResponse> safe_propose(const Agent& agent, const GameRecord& game, int k) {
  std::vector<AgentResponse> out;
  try {
    out = agent.propose(game, k);
  } catch (const std::exception& e) {
    out.clear();
    AgentResponse r;
    r.parse_error = ParseError::malformed;
    r.transport_error = std::string("agent failure: ") + e.what();
    out.assign(static_cast<std::size_t>(k), r);
  }
  if (out.size() > static_cast<std::size_t>(k)) out.resize(static_cast<std::size_t>(k));
  while (out.size() < static_cast<std::size_t>(k)) {
    AgentResponse r;
    r.parse_error = ParseError::malformed;
    r.transport_error = "agent returned too few samples";
    out.push_back(r);
  }
  return out;
}

}  // namespace

double binomial_se(double p, int n_games) {
  if (!(p >= 0.0 && p <= 1.0) || n_games < 1) throw ContractError("binomial_se needs p in [0,1] and n >= 1");
  return std::sqrt(p * (1.0 - p) / n_games);
}

SampleScore score_response(const GameRecord& game, const AgentResponse& response) {
  if (!response.parsed) return {};
  const auto rep = exploitability(game.matrix, *response.parsed);
  return {true, rep.normalized, rep.reward};
}

GameResult score_game(const GameRecord& game, const std::vector<AgentResponse>& responses, double tau) {
  GameResult g;
  g.game_id = game.id;
  for (const auto& r : responses) g.samples.push_back(score_response(game, r));
  for (std::size_t s = 0; s < g.samples.size(); ++s) {
    const auto& sc = g.samples[s];
    if (sc.valid && (g.best_sample_index < 0 || sc.normalized < g.best_normalized)) {
      g.best_reward = sc.reward;
      g.best_normalized = sc.normalized;
      g.best_sample_index = static_cast<int>(s);
    }
  }
  if (!g.samples.empty() && g.samples.front().valid) {
    g.first_reward = g.samples.front().reward;
    g.first_success = g.samples.front().normalized < tau;
  }
  g.success = g.best_sample_index >= 0 && g.best_normalized < tau;
  return g;
}

EvalResult aggregate(const std::vector<GameResult>& games, int n, int k, double tau) {
  EvalResult r;
  r.n = n;
  r.count = static_cast<int>(games.size());
  r.k = k;
  r.tau = tau;
  if (games.empty()) return r;
  long successes = 0, first = 0, valid = 0, samples = 0;
  double best_sum = 0.0;
  for (const auto& g : games) {
    successes += g.success;
    first += g.first_success;
    best_sum += g.best_reward;
    for (const auto& s : g.samples) {
      valid += s.valid;
      ++samples;
    }
  }
  const double count = static_cast<double>(games.size());
  r.s_at_tau = static_cast<double>(successes) / count;
  r.pass_at_1 = static_cast<double>(first) / count;
  r.valid_rate = samples ? static_cast<double>(valid) / static_cast<double>(samples) : 0.0;
  r.mean_best_reward = best_sum / count;
  r.se_s = binomial_se(r.s_at_tau, r.count);
  r.se_pass = binomial_se(r.pass_at_1, r.count);
  return r;
}

EvalRun evaluate(const Agent& agent, const std::vector<GameRecord>& games, const EvalOptions& options) {
  if (options.k < 1) throw ContractError("k must be at least 1");
  const int n = common_size(games);
  EvalRun run;
  run.games.resize(games.size());
  run.responses.resize(games.size());
  parallel_for(games.size(), options.jobs, [&](std::size_t i) {
    run.responses[i] = safe_propose(agent, games[i], options.k);
    run.games[i] = score_game(games[i], run.responses[i], options.tau);
  });
  run.result = aggregate(run.games, n, options.k, options.tau);
  return run;
}

EvalRun rescore(const std::vector<GameRecord>& games, const std::vector<std::vector<AgentResponse>>& responses,
                double tau) {
  if (games.size() != responses.size()) throw ContractError("rescore needs one response list per game");
  const int n = common_size(games);
  EvalRun run;
  int k = 0;
  for (std::size_t i = 0; i < games.size(); ++i) {
    std::vector<AgentResponse> again;
    for (const auto& r : responses[i]) {
      AgentResponse p = parse_response(r.raw_text, n);
      p.latency = r.latency;
      p.transport_error = r.transport_error;
      p.attempts = r.attempts;
      again.push_back(std::move(p));
    }
    k = std::max(k, static_cast<int>(again.size()));
    run.games.push_back(score_game(games[i], again, tau));
    run.responses.push_back(std::move(again));
  }
  run.result = aggregate(run.games, n, k, tau);
  return run;
}

void write_responses(std::ostream& out, const std::vector<GameRecord>& games, const EvalRun& run) {
  for (std::size_t i = 0; i < run.responses.size(); ++i) {
    for (std::size_t s = 0; s < run.responses[i].size(); ++s) {
      json line = response_to_json(run.responses[i][s]);
      line["game_id"] = games[i].id;
      line["n"] = games[i].matrix.n();
      line["sample_index"] = s;
      out << line.dump() << '\n';
    }
  }
}

std::map<std::string, std::vector<AgentResponse>> read_responses(std::istream& in) {
  std::map<std::string, std::vector<AgentResponse>> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) throw ContractError("response log line is not JSON");
    try {
      auto& list = out[j.at("game_id").get<std::string>()];
      const auto index = j.at("sample_index").get<std::size_t>();
      if (list.size() <= index) list.resize(index + 1);
      list[index] = response_from_json(j);
    } catch (const json::exception& e) {
      throw ContractError(std::string("response log: ") + e.what());
    }
  }
  return out;
}

json eval_result_to_json(const EvalResult& r) {
  return json{{"n", r.n},
              {"count", r.count},
              {"k", r.k},
              {"tau", r.tau},
              {"s_at_tau", r.s_at_tau},
              {"pass_at_1", r.pass_at_1},
              {"valid_rate", r.valid_rate},
              {"mean_best_reward", r.mean_best_reward},
              {"se_s", r.se_s},
              {"se_pass", r.se_pass}};
}

EvalResult eval_result_from_json(const json& j) {
  EvalResult r;
  try {
    r.n = j.at("n").get<int>();
    r.count = j.at("count").get<int>();
    r.k = j.value("k", 0);
    r.tau = j.value("tau", 0.10);
    r.s_at_tau = j.at("s_at_tau").get<double>();
    r.pass_at_1 = j.value("pass_at_1", 0.0);
    r.valid_rate = j.value("valid_rate", 0.0);
    r.mean_best_reward = j.value("mean_best_reward", 0.0);
    r.se_s = j.value("se_s", 0.0);
    r.se_pass = j.value("se_pass", 0.0);
  } catch (const json::exception& e) {
    throw ContractError(std::string("evalres/1 entry: ") + e.what());
  }
  return r;
}

json eval_file_to_json(const std::string& agent, const std::vector<EvalResult>& results) {
  json entries = json::array();
  for (const auto& r : results) entries.push_back(eval_result_to_json(r));
  return json{{"schema", kEvalResultSchema}, {"agent", agent}, {"results", entries}};
}

EvalFile eval_file_from_json(const json& j) {
  if (!j.is_object() || j.value("schema", "") != kEvalResultSchema) {
    throw ContractError(std::string("expected a results file with schema ") + kEvalResultSchema);
  }
  EvalFile f;
  f.agent = j.value("agent", "");
  if (!j.contains("results") || !j["results"].is_array()) throw ContractError("results file has no results array");
  for (const auto& e : j["results"]) f.results.push_back(eval_result_from_json(e));
  return f;
}

}  // namespace procnash
