#include "procnash/agents/remote.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <regex>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "procnash/agents/parse.hpp"

namespace procnash {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string completion_text(const std::string& body) {
  const json j = json::parse(body, nullptr, false);
  if (j.is_discarded()) return body;
  try {
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception&) {
    return body;
  }
}

}  // namespace

void RemoteModelConfig::validate() const {
  if (endpoint.empty()) throw ContractError("remote config: endpoint is required");
  if (model.empty()) throw ContractError("remote config: model is required");
  if (!(temperature >= 0.0)) throw ContractError("remote config: temperature must be >= 0");
  if (k < 1) throw ContractError("remote config: k must be >= 1");
  if (max_tokens < 1) throw ContractError("remote config: max_tokens must be >= 1");
  if (!(timeout_s > 0.0)) throw ContractError("remote config: timeout must be positive");
  if (retries < 0) throw ContractError("remote config: retries must be >= 0");
  if (max_in_flight < 1) throw ContractError("remote config: max_in_flight must be >= 1");
}

RemoteModelConfig remote_config_from_json(const json& j) {
  RemoteModelConfig c;
  try {
    c.endpoint = j.at("endpoint").get<std::string>();
    c.model = j.at("model").get<std::string>();
    c.temperature = j.value("temperature", c.temperature);
    c.k = j.value("k", c.k);
    c.max_tokens = j.value("max_tokens", c.max_tokens);
    c.timeout_s = j.value("timeout_s", c.timeout_s);
    c.retries = j.value("retries", c.retries);
    c.backoff_s = j.value("backoff_s", c.backoff_s);
    c.auth_env = j.value("auth_env", c.auth_env);
    c.max_in_flight = j.value("max_in_flight", c.max_in_flight);
    c.audit_log = j.value("audit_log", c.audit_log);
    c.filler_chars = j.value("filler_chars", c.filler_chars);
    c.template_file = j.value("template_file", c.template_file);
  } catch (const json::exception& e) {
    throw ContractError(std::string("remote config: ") + e.what());
  }
  c.validate();
  return c;
}

json remote_config_to_json(const RemoteModelConfig& c) {
  return json{{"endpoint", c.endpoint},       {"model", c.model},           {"temperature", c.temperature},
              {"k", c.k},                     {"max_tokens", c.max_tokens}, {"timeout_s", c.timeout_s},
              {"retries", c.retries},         {"backoff_s", c.backoff_s},   {"auth_env", c.auth_env},
              {"max_in_flight", c.max_in_flight}, {"audit_log", c.audit_log}, {"filler_chars", c.filler_chars},
              {"template_file", c.template_file}};
}

RemoteModelConfig load_remote_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ContractError("cannot open remote config " + path);
  const json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ContractError("remote config " + path + " is not valid JSON");
  return remote_config_from_json(j);
}

RemoteModelAgent::RemoteModelAgent(RemoteModelConfig config, PromptTemplate tmpl)
    : config_(std::move(config)), template_(std::move(tmpl)) {
  config_.validate();
  template_.validate();
  static const std::regex url(R"(^(https?)://([^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(config_.endpoint, m, url)) {
    throw ContractError("remote config: endpoint must be an http(s) URL");
  }
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (m[1] == "https") throw ContractError("remote config: this build has no TLS support");
#endif
  base_url_ = m[1].str() + "://" + m[2].str();
  path_ = m[3].matched ? m[3].str() : "/";
  in_flight_ = std::make_unique<std::counting_semaphore<>>(config_.max_in_flight);
  if (!config_.audit_log.empty()) {
    audit_out_.open(config_.audit_log, std::ios::app);
    if (!audit_out_) throw ContractError("cannot open audit log " + config_.audit_log);
  }
}

RemoteModelAgent::~RemoteModelAgent() = default;

std::vector<AgentResponse> RemoteModelAgent::propose(const GameRecord& game, int k) const {
  const std::string prompt = build_prompt(game, template_, config_.filler_chars);
  std::vector<AgentResponse> out;
  out.reserve(static_cast<std::size_t>(k));
  for (int s = 0; s < k; ++s) {
    out.push_back(sample(game, prompt, s));
    audit(game, s, prompt, out.back());
  }
  return out;
}

AgentResponse RemoteModelAgent::sample(const GameRecord& game, const std::string& prompt, int) const {
  const int n = static_cast<int>(game.matrix.n());
  const json body{{"model", config_.model},
                  {"messages", json::array({json{{"role", "user"}, {"content", prompt}}})},
                  {"temperature", config_.temperature},
                  {"n", 1},
                  {"max_tokens", config_.max_tokens}};
  const std::string payload = body.dump();

  httplib::Headers headers;
  if (const char* token = std::getenv(config_.auth_env.c_str()); token && *token) {
    headers.emplace("Authorization", std::string("Bearer ") + token);
  }

  const auto started = Clock::now();
  std::string last_error;
  double backoff = config_.backoff_s;
  for (int attempt = 1; attempt <= config_.retries + 1; ++attempt) {
    httplib::Client client(base_url_);
    const auto timeout = std::chrono::duration<double>(config_.timeout_s);
    client.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    client.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    client.set_write_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));

    httplib::Result res;
    {
      in_flight_->acquire();
      res = client.Post(path_, headers, payload, "application/json");
      in_flight_->release();
    }
    if (res && res->status >= 200 && res->status < 300) {
      AgentResponse r = parse_response(completion_text(res->body), n);
      r.latency = Clock::now() - started;
      r.attempts = attempt;
      return r;
    }
    last_error = res ? "HTTP " + std::to_string(res->status) : httplib::to_string(res.error());
    if (attempt <= config_.retries && backoff > 0.0) {
      std::this_thread::sleep_for(std::chrono::duration<double>(backoff));
      backoff *= 2.0;
    }
  }
  AgentResponse r;
  r.parse_error = ParseError::malformed;
  r.transport_error = last_error;
  r.attempts = config_.retries + 1;
  r.latency = Clock::now() - started;
  return r;
}

void RemoteModelAgent::audit(const GameRecord& game, int index, const std::string& prompt,
                             const AgentResponse& r) const {
  if (config_.audit_log.empty()) return;
  json line = response_to_json(r);
  line["game_id"] = game.id;
  line["sample_index"] = index;
  line["prompt_hash"] = hex64(fnv1a64(prompt));
  line["model"] = config_.model;
  const std::lock_guard lock(audit_mutex_);
  audit_out_ << line.dump() << '\n';
  audit_out_.flush();
}

}  // namespace procnash
