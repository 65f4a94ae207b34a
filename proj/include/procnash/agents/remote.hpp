#pragma once

#include <cstddef>
#include <fstream>
#include <memory>
#include <mutex>
#include <semaphore>
#include <string>

#include "procnash/agents/agent.hpp"
#include "procnash/agents/prompt.hpp"

namespace procnash {

struct RemoteModelConfig {
  std::string endpoint;  // full URL of the chat-completions route
  std::string model;
  double temperature = 0.7;
  int k = 4;  // samples per game when the caller does not choose
  int max_tokens = 1024;
  double timeout_s = 60.0;
  int retries = 3;  // extra attempts after the first
  double backoff_s = 0.5;  // doubled after each failed attempt
  std::string auth_env = "PROCNASH_API_KEY";  // bearer token source; unset means no header
  int max_in_flight = 4;
  std::string audit_log;  // JSONL path; empty disables auditing
  std::size_t filler_chars = 0;
  std::string template_file;  // optional prompt template text

  void validate() const;
};

RemoteModelConfig remote_config_from_json(const nlohmann::json& j);
nlohmann::json remote_config_to_json(const RemoteModelConfig& c);
RemoteModelConfig load_remote_config(const std::string& path);

// Chat-completion client: one HTTP request per sample, retried with
// exponential backoff; exhausted retries become invalid samples. Reentrant;
// concurrent requests are capped at max_in_flight.
class RemoteModelAgent : public Agent {
 public:
  RemoteModelAgent(RemoteModelConfig config, PromptTemplate tmpl);
  ~RemoteModelAgent() override;

  std::string name() const override { return "remote:" + config_.model; }
  bool deterministic() const override { return false; }
  std::vector<AgentResponse> propose(const GameRecord& game, int k) const override;

  const RemoteModelConfig& config() const { return config_; }

 private:
  AgentResponse sample(const GameRecord& game, const std::string& prompt, int index) const;
  void audit(const GameRecord& game, int index, const std::string& prompt, const AgentResponse& r) const;

  RemoteModelConfig config_;
  PromptTemplate template_;
  std::string base_url_;
  std::string path_;
  std::unique_ptr<std::counting_semaphore<>> in_flight_;
  mutable std::mutex audit_mutex_;
  mutable std::ofstream audit_out_;
};

}  // namespace procnash
