#include <catch_amalgamated.hpp>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include "procnash/agents/agent.hpp"
#include "procnash/agents/parse.hpp"
#include "procnash/agents/prompt.hpp"
#include "procnash/agents/remote.hpp"
#include "procnash/eval/harness.hpp"
#include "procnash/gen/gamegen.hpp"
#include "procnash/solver/nash.hpp"
#include "support/oracles.hpp"

#include <httplib.h>

using namespace procnash;

namespace {

std::vector<GameRecord> games(int n, int count, std::uint64_t seed = 99) {
  GameSpec spec;
  return make_eval_set(n, count, spec, seed);
}

std::string completion(const std::string& content) {
  return nlohmann::json{{"choices", nlohmann::json::array({{{"message", {{"role", "assistant"}, {"content", content}}}}})}}
      .dump();
}

// Local chat-completions stand-in. The handler decides each reply.
class MockServer {
 public:
  using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

  explicit MockServer(Handler h) {
    server_.Post("/v1/chat/completions", [this, h](const httplib::Request& req, httplib::Response& res) {
      const int now = ++active_;
      {
        std::lock_guard lock(mu_);
        peak_ = std::max(peak_, now);
        requests_.push_back(req.body);
        auth_.push_back(req.get_header_value("Authorization"));
      }
      h(req, res);
      --active_;
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~MockServer() {
    server_.stop();
    thread_.join();
  }

  std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions"; }

  int peak() const {
    std::lock_guard lock(mu_);
    return peak_;
  }
  std::vector<std::string> requests() const {
    std::lock_guard lock(mu_);
    return requests_;
  }
  std::vector<std::string> auth() const {
    std::lock_guard lock(mu_);
    return auth_;
  }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> active_{0};
  mutable std::mutex mu_;
  int peak_ = 0;
  std::vector<std::string> requests_;
  std::vector<std::string> auth_;
};

RemoteModelConfig config_for(const MockServer& s) {
  RemoteModelConfig c;
  c.endpoint = s.endpoint();
  c.model = "mock-model";
  c.timeout_s = 5;
  c.retries = 2;
  c.backoff_s = 0.0;
  c.auth_env = "PROCNASH_TEST_TOKEN";
  return c;
}

}  // namespace

TEST_CASE("parse_response accepts the canonical object") {
  const auto r = parse_response(R"({"row":[0.5,0.5],"col":[1,0]})", 2);
  REQUIRE(r.valid());
  CHECK(r.parsed->row.to_vector() == std::vector<double>{0.5, 0.5});
  CHECK(r.parsed->col.to_vector() == std::vector<double>{1, 0});
  CHECK_FALSE(r.parse_error.has_value());
}

TEST_CASE("parse_response tolerates surrounding prose and projects weights") {
  const auto r = parse_response(R"(Sure! {"row":[2,2],"col":[1,0]})", 2);
  REQUIRE(r.valid());
  CHECK(r.parsed->row.to_vector() == std::vector<double>{0.5, 0.5});

  const auto fenced = parse_response("Answer:\n```json\n{\"row\": [-1, 3], \"col\": [0.25, 0.75]}\n```\n", 2);
  REQUIRE(fenced.valid());
  CHECK(fenced.parsed->row.to_vector() == std::vector<double>{0, 1});

  // Nested braces in a preamble object and strings with braces.
  const auto nested = parse_response(R"({"note":"a } b", "meta":{"x":1}} then {"row":[1,0],"col":[0,1]})", 2);
  REQUIRE(nested.valid());
  CHECK(nested.parsed->col.to_vector() == std::vector<double>{0, 1});

  const auto first_wins = parse_response(R"({"row":[1,0],"col":[1,0]} {"row":[0,1],"col":[0,1]})", 2);
  CHECK(first_wins.parsed->row.to_vector() == std::vector<double>{1, 0});
}

TEST_CASE("parse_response failure categories") {
  CHECK(parse_response("no json here", 2).parse_error == ParseError::malformed);
  CHECK(parse_response("", 2).parse_error == ParseError::malformed);
  CHECK(parse_response(R"({"row":[1,0]})", 2).parse_error == ParseError::missing_field);
  CHECK(parse_response(R"({"row":[1,0,0],"col":[1,0]})", 2).parse_error == ParseError::length_mismatch);
  CHECK(parse_response(R"({"row":[0,0],"col":[1,0]})", 2).parse_error == ParseError::degenerate_weights);
  CHECK(parse_response(R"({"row":[-1,-1],"col":[1,0]})", 2).parse_error == ParseError::degenerate_weights);
  CHECK(parse_response(R"({"row":"half","col":[1,0]})", 2).parse_error == ParseError::malformed);
  CHECK(parse_response(R"({"row":[1,"x"],"col":[1,0]})", 2).parse_error == ParseError::malformed);
  CHECK(parse_response(R"({"row":[1,0],"col":[1,0])", 2).parse_error == ParseError::malformed);

  const auto bad = parse_response("garbage", 3);
  CHECK(bad.raw_text == "garbage");
  CHECK_FALSE(bad.valid());

  for (auto e : {ParseError::malformed, ParseError::missing_field, ParseError::length_mismatch,
                 ParseError::degenerate_weights})
    CHECK(parse_error_from_string(to_string(e)) == e);
  CHECK_THROWS_AS(parse_error_from_string("nope"), ContractError);
}

TEST_CASE("serialize then parse is exact") {
  oracle::Gen g(21);
  for (int t = 0; t < 2000; ++t) {
    const int n = g.integer(2, 12);
    const StrategyPair pr{oracle::strategy(g.simplex(n)), oracle::strategy(g.simplex(n))};
    const auto back = parse_response(serialize_pair(pr), n);
    REQUIRE(back.valid());
    CHECK(*back.parsed == pr);
  }
}

TEST_CASE("prompt renders the matrix losslessly") {
  GameSpec spec;
  spec.distribution = Distribution::gaussian;
  for (int n : {2, 5, 9}) {
    for (const auto& game : make_eval_set(n, 34, spec, 5)) {
      const auto prompt = build_prompt(game, PromptTemplate::standard());
      CHECK(extract_matrix(prompt, n).entries() == game.matrix.entries());
      CHECK(prompt.find("{{") == std::string::npos);
    }
  }
  CHECK(render_matrix(oracle::from_mat({{1, -0.5}, {0, 2}})) == "[[1, -0.5],\n [0, 2]]");
  CHECK(render_number(0.1) == "0.1");
}

TEST_CASE("filler changes length but not the matrix") {
  const auto game = games(4, 1)[0];
  const auto tmpl = PromptTemplate::standard();
  const auto plain = build_prompt(game, tmpl, 0);
  const auto padded = build_prompt(game, tmpl, 4000);
  CHECK(padded.size() - plain.size() == 4000);
  CHECK(extract_matrix(padded, 4) == extract_matrix(plain, 4));
  CHECK(render_matrix(game.matrix) == render_matrix(extract_matrix(padded, 4)));
  CHECK(filler_block(0).empty());
  CHECK(filler_block(1000).size() == 1000);

  const std::size_t target = plain.size() + 777;
  const auto chars = filler_for_length(game, tmpl, target);
  CHECK(build_prompt(game, tmpl, chars).size() >= target);
  CHECK(build_prompt(game, tmpl, chars - 1).size() < target);

  // A coarse "tokenizer": whitespace-separated words.
  const LengthMeasure words = [](const std::string& s) {
    std::size_t count = 0;
    bool in_word = false;
    for (char c : s) {
      const bool space = std::isspace(static_cast<unsigned char>(c)) != 0;
      if (!space && !in_word) ++count;
      in_word = !space;
    }
    return count;
  };
  const auto wchars = filler_for_length(game, tmpl, words(plain) + 200, words);
  CHECK(words(build_prompt(game, tmpl, wchars)) >= words(plain) + 200);
  CHECK(filler_for_length(game, tmpl, 10) == 0);
}

TEST_CASE("prompt template validation") {
  CHECK_THROWS_AS(PromptTemplate{"no placeholder"}.validate(), ContractError);
  CHECK_THROWS_AS(PromptTemplate{"{{matrix}} {{matrix}}"}.validate(), ContractError);
  const auto game = games(2, 1)[0];
  CHECK(build_prompt(game, PromptTemplate{"n={{n}} {{matrix}}"}) == "n=2 " + render_matrix(game.matrix));
}

TEST_CASE("built-in agents") {
  const auto set = games(4, 20);
  const auto uniform = uniform_agent();
  const auto maximin = maximin_agent();
  const auto oracle_a = oracle_agent();
  for (const auto& game : set) {
    const auto u = uniform->propose(game, 3);
    REQUIRE(u.size() == 3);
    CHECK(u[0].parsed->row == uniform_pair(4).row);
    CHECK(u[2].raw_text == u[0].raw_text);

    const auto m = maximin->propose(game, 1);
    CHECK(*m[0].parsed == maximin_pure(game.matrix));

    const auto o = oracle_a->propose(game, 2);
    CHECK(*o[0].parsed == solve_zero_sum_lp(game.matrix).pair);
    CHECK(exploitability(game.matrix, *o[1].parsed).reward == 1.0);
  }
  CHECK(uniform->deterministic());
  CHECK(uniform->name() == "uniform");
}

TEST_CASE("noisy oracle") {
  const auto set = games(5, 30);
  const auto exact = oracle_agent();
  const auto zero = noisy_oracle_agent(0.0, 3);
  CHECK(zero->deterministic());
  const auto noisy = noisy_oracle_agent(0.2, 3);
  CHECK_FALSE(noisy->deterministic());
  for (const auto& game : set) {
    CHECK(*zero->propose(game, 1)[0].parsed == *exact->propose(game, 1)[0].parsed);
    const auto a = noisy->propose(game, 4);
    const auto b = noisy->propose(game, 4);
    for (int s = 0; s < 4; ++s) CHECK(a[static_cast<std::size_t>(s)].raw_text == b[static_cast<std::size_t>(s)].raw_text);
    CHECK(a[0].raw_text != a[1].raw_text);
  }
  CHECK(noisy_oracle_agent(0.2, 4)->propose(set[0], 1)[0].raw_text != noisy->propose(set[0], 1)[0].raw_text);
  CHECK_THROWS_AS(noisy_oracle_agent(-1.0), ContractError);
}

TEST_CASE("noise degrades success monotonically") {
  EvalOptions opt;
  opt.k = 1;
  double prev = 2.0;
  for (double sigma : {0.0, 0.05, 0.1, 0.2, 0.4}) {
    double total = 0;
    for (int n : {3, 5}) total += evaluate(*noisy_oracle_agent(sigma, 11), games(n, 200, 7), opt).result.s_at_tau;
    CHECK(total <= prev);
    prev = total;
  }
  CHECK(prev < 2.0);
}

TEST_CASE("block solver zero-extends the top-left equilibrium") {
  const auto set = games(6, 10);
  const auto agent = block_solver_agent(3);
  for (const auto& game : set) {
    const auto r = agent->propose(game, 1)[0];
    REQUIRE(r.valid());
    for (int i = 3; i < 6; ++i) {
      CHECK((*r.parsed).row[i] == 0.0);
      CHECK((*r.parsed).col[i] == 0.0);
    }
  }
  CHECK_THROWS_AS(block_solver_agent(1), ContractError);
}

TEST_CASE("make_agent specs") {
  CHECK(make_agent("uniform")->name() == "uniform");
  CHECK(make_agent("oracle")->name() == "oracle");
  CHECK(make_agent("maximin")->name() == "maximin");
  CHECK(make_agent("noisy:0.1")->name().rfind("noisy:", 0) == 0);
  CHECK(make_agent("block:3")->name() == "block:3");
  CHECK_THROWS_AS(make_agent("nope"), ContractError);
  CHECK_THROWS_AS(make_agent("noisy:abc"), ContractError);
  CHECK_THROWS_AS(make_agent("block:"), ContractError);
  CHECK_THROWS_AS(make_agent("remote:/nonexistent/config.json"), ContractError);
}

TEST_CASE("remote config parsing") {
  const auto c = remote_config_from_json(nlohmann::json{{"endpoint", "http://x/y"}, {"model", "m"}, {"k", 2}});
  CHECK(c.k == 2);
  CHECK(c.retries == 3);
  CHECK(remote_config_from_json(remote_config_to_json(c)).endpoint == "http://x/y");
  CHECK_THROWS_AS(remote_config_from_json(nlohmann::json{{"model", "m"}}), ContractError);
  CHECK_THROWS_AS(remote_config_from_json(nlohmann::json{{"endpoint", "http://x"}, {"model", "m"}, {"k", 0}}),
                  ContractError);
  RemoteModelConfig bad;
  bad.endpoint = "ftp://x";
  bad.model = "m";
  CHECK_THROWS_AS(RemoteModelAgent(bad, PromptTemplate::standard()), ContractError);
}

TEST_CASE("remote agent against a fixed valid reply") {
  MockServer server([](const httplib::Request&, httplib::Response& res) {
    res.set_content(completion(R"(Here you go: {"row":[0.5,0.5],"col":[0.5,0.5]})"), "application/json");
  });
  ::setenv("PROCNASH_TEST_TOKEN", "secret-token", 1);
  const auto log = std::filesystem::temp_directory_path() / "procnash_audit_test.jsonl";
  std::filesystem::remove(log);
  auto cfg = config_for(server);
  cfg.audit_log = log.string();
  cfg.temperature = 0.3;
  const RemoteModelAgent agent(cfg, PromptTemplate::standard());
  CHECK_FALSE(agent.deterministic());

  const auto game = games(2, 1)[0];
  const auto out = agent.propose(game, 4);
  REQUIRE(out.size() == 4);
  for (const auto& r : out) {
    REQUIRE(r.valid());
    CHECK(r.parsed->row.to_vector() == std::vector<double>{0.5, 0.5});
    CHECK(r.attempts == 1);
  }

  const auto reqs = server.requests();
  REQUIRE(reqs.size() == 4);
  const auto body = nlohmann::json::parse(reqs[0]);
  CHECK(body["model"] == "mock-model");
  CHECK(body["temperature"] == 0.3);
  CHECK(body["n"] == 1);
  CHECK(extract_matrix(body["messages"][0]["content"].get<std::string>(), 2).entries() == game.matrix.entries());
  for (const auto& a : server.auth()) CHECK(a == "Bearer secret-token");

  std::ifstream in(log);
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j["game_id"] == game.id);
    CHECK(j["sample_index"] == lines);
    CHECK(j["valid"] == true);
    ++lines;
  }
  CHECK(lines == 4);
  ::unsetenv("PROCNASH_TEST_TOKEN");
}

TEST_CASE("remote agent with garbage replies scores zero") {
  MockServer server([](const httplib::Request&, httplib::Response& res) {
    res.set_content(completion("I think the row player should bluff."), "application/json");
  });
  const RemoteModelAgent agent(config_for(server), PromptTemplate::standard());
  EvalOptions opt;
  opt.k = 2;
  const auto run = evaluate(agent, games(3, 5), opt);
  CHECK(run.result.valid_rate == 0.0);
  CHECK(run.result.s_at_tau == 0.0);
  CHECK(run.responses[0][0].parse_error == ParseError::malformed);
  CHECK(server.auth()[0].empty());
}

TEST_CASE("remote agent with alternating replies") {
  std::atomic<int> calls{0};
  MockServer server([&calls](const httplib::Request& req, httplib::Response& res) {
    const auto body = nlohmann::json::parse(req.body);
    const int n = static_cast<int>(extract_matrix(body["messages"][0]["content"].get<std::string>(), 3).n());
    const bool good = (calls++ % 2) == 0;
    res.set_content(completion(good ? serialize_pair(StrategyPair::uniform(n)) : "nope"), "application/json");
  });
  const RemoteModelAgent agent(config_for(server), PromptTemplate::standard());
  EvalOptions opt;
  opt.k = 4;
  const auto run = evaluate(agent, games(3, 5), opt);
  CHECK(run.result.valid_rate == 0.5);
}

TEST_CASE("remote agent retries server errors then gives up") {
  MockServer server([](const httplib::Request&, httplib::Response& res) {
    res.status = 500;
    res.set_content("overloaded", "text/plain");
  });
  const RemoteModelAgent agent(config_for(server), PromptTemplate::standard());
  const auto out = agent.propose(games(2, 1)[0], 1);
  REQUIRE(out.size() == 1);
  CHECK_FALSE(out[0].valid());
  CHECK(out[0].attempts == 3);
  CHECK(out[0].transport_error == "HTTP 500");
  CHECK(server.requests().size() == 3);
}

TEST_CASE("remote agent recovers after a transient failure") {
  std::atomic<int> calls{0};
  MockServer server([&calls](const httplib::Request&, httplib::Response& res) {
    if (calls++ == 0) {
      res.status = 503;
      return;
    }
    res.set_content(completion(R"({"row":[1,0],"col":[0,1]})"), "application/json");
  });
  const RemoteModelAgent agent(config_for(server), PromptTemplate::standard());
  const auto out = agent.propose(games(2, 1)[0], 1);
  REQUIRE(out[0].valid());
  CHECK(out[0].attempts == 2);
}

TEST_CASE("remote agent caps concurrent requests") {
  MockServer server([](const httplib::Request&, httplib::Response& res) {
    std::this_thread::sleep_for(std::chrono::milliseconds(30));
    res.set_content(completion(R"({"row":[1,0,0],"col":[1,0,0]})"), "application/json");
  });
  auto cfg = config_for(server);
  cfg.max_in_flight = 2;
  const RemoteModelAgent agent(cfg, PromptTemplate::standard());
  EvalOptions opt;
  opt.k = 2;
  opt.jobs = 6;
  const auto run = evaluate(agent, games(3, 12), opt);
  CHECK(run.result.valid_rate == 1.0);
  CHECK(server.peak() <= 2);
  CHECK(server.peak() >= 1);
}

TEST_CASE("remote agent reports unreachable endpoints") {
  RemoteModelConfig cfg;
  cfg.endpoint = "http://127.0.0.1:1/v1/chat/completions";
  cfg.model = "m";
  cfg.retries = 1;
  cfg.backoff_s = 0.0;
  cfg.timeout_s = 1;
  const RemoteModelAgent agent(cfg, PromptTemplate::standard());
  const auto out = agent.propose(games(2, 1)[0], 1);
  CHECK_FALSE(out[0].valid());
  CHECK_FALSE(out[0].transport_error.empty());
  CHECK(out[0].attempts == 2);
}

TEST_CASE("response JSON round trip") {
  auto r = parse_response(R"({"row":[1,0],"col":[0,1]})", 2);
  r.attempts = 2;
  const auto back = response_from_json(nlohmann::json::parse(response_to_json(r).dump()));
  CHECK(back.raw_text == r.raw_text);
  CHECK(back.valid());
  CHECK(back.attempts == 2);
  const auto bad = response_from_json(response_to_json(parse_response("x", 2)));
  CHECK(bad.parse_error == ParseError::malformed);
}
