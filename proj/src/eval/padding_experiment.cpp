#include "procnash/eval/padding_experiment.hpp"

#include <sstream>

#include "procnash/eval/parallel.hpp"
#include "procnash/solver/nash.hpp"

namespace procnash {

using nlohmann::json;

const PaddingCell* PaddingTable::find(const std::string& condition, int n) const {
  for (const auto& c : cells) {
    if (c.condition == condition && c.n == n) return &c;
  }
  return nullptr;
}

PaddingTable padding_cliff_experiment(const Agent& agent, const PaddingExperimentOptions& options) {
  for (const int t : options.targets) {
    if (t <= options.base_n || t > kMaxLpActions) {
      throw ContractError("padding targets must lie in (base_n, " + std::to_string(kMaxLpActions) + "]");
    }
  }
  const EvalOptions eval{options.k, options.tau, options.jobs};
  const auto bases = make_eval_set(options.base_n, options.count, options.spec_template, options.seed);

  PaddingTable table;
  table.agent = agent.name();
  table.targets = options.targets;
  table.cells.push_back({"base", options.base_n, evaluate(agent, bases, eval).result});

  for (const int target : options.targets) {
    const auto dense = make_eval_set(target, options.count, options.spec_template, options.seed);
    std::vector<GameRecord> dominated(bases.size(), bases.front());
    std::vector<GameRecord> random(bases.size(), bases.front());
    parallel_for(bases.size(), options.jobs, [&](std::size_t i) {
      dominated[i] = dominated_pad(bases[i], target, options.pad).as_game();
      random[i] = random_pad(bases[i], target, options.pad).as_game();
    });
    table.cells.push_back({"dense", target, evaluate(agent, dense, eval).result});
    table.cells.push_back({"dominated", target, evaluate(agent, dominated, eval).result});
    table.cells.push_back({"random", target, evaluate(agent, random, eval).result});
  }
  return table;
}

std::string padding_plot_csv(const PaddingTable& table) {
  std::ostringstream out;
  out << "condition,n,s_at_tau,se_s,pass_at_1,valid_rate\n";
  for (const auto& c : table.cells) {
    out << c.condition << ',' << c.n << ',' << c.result.s_at_tau << ',' << c.result.se_s << ','
        << c.result.pass_at_1 << ',' << c.result.valid_rate << '\n';
  }
  return out.str();
}

json padding_table_to_json(const PaddingTable& table) {
  json cells = json::array();
  for (const auto& c : table.cells) {
    json r = eval_result_to_json(c.result);
    r["condition"] = c.condition;
    cells.push_back(std::move(r));
  }
  return json{{"agent", table.agent}, {"targets", table.targets}, {"results", cells}};
}

}  // namespace procnash
