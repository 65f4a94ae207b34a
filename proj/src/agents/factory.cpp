#include <charconv>
#include <fstream>
#include <sstream>

#include "procnash/agents/agent.hpp"
#include "procnash/agents/remote.hpp"

namespace procnash {

namespace {

template <class T>
T number_after(const std::string& spec, std::size_t colon) {
  const std::string tail = spec.substr(colon + 1);
  T value{};
  const auto res = std::from_chars(tail.data(), tail.data() + tail.size(), value);
  if (tail.empty() || res.ec != std::errc() || res.ptr != tail.data() + tail.size()) {
    throw ContractError("bad agent spec '" + spec + "'");
  }
  return value;
}

}  // namespace

std::unique_ptr<Agent> make_agent(const std::string& spec, std::uint64_t seed) {
  if (spec == "uniform") return uniform_agent();
  if (spec == "maximin") return maximin_agent();
  if (spec == "oracle") return oracle_agent();
  const auto colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  if (colon != std::string::npos) {
    if (head == "noisy") return noisy_oracle_agent(number_after<double>(spec, colon), seed);
    if (head == "block") return block_solver_agent(number_after<int>(spec, colon));
    if (head == "remote") {
      RemoteModelConfig config = load_remote_config(spec.substr(colon + 1));
      PromptTemplate tmpl = PromptTemplate::standard();
      if (!config.template_file.empty()) {
        std::ifstream in(config.template_file);
        if (!in) throw ContractError("cannot open prompt template " + config.template_file);
        std::stringstream ss;
        ss << in.rdbuf();
        tmpl.text = ss.str();
      }
      return std::make_unique<RemoteModelAgent>(std::move(config), std::move(tmpl));
    }
  }
  throw ContractError("unknown agent '" + spec + "' (expected uniform, maximin, oracle, noisy:<sigma>, block:<k> or "
                      "remote:<config.json>)");
}

}  // namespace procnash
