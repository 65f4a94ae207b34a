#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "procnash/eval/harness.hpp"

namespace procnash {

struct PaddingExperimentOptions {
  int base_n = 3;
  std::vector<int> targets{8, 12, 15, 20};
  int count = 50;
  int k = 4;
  double tau = 0.10;
  std::uint64_t seed = 99;
  GameSpec spec_template;  // distribution of bases, dense games and random fill
  PadOptions pad;
  int jobs = 1;
};

struct PaddingCell {
  std::string condition;  // "base", "dense", "dominated" or "random"
  int n = 0;
  EvalResult result;
};

struct PaddingTable {
  std::string agent;
  std::vector<int> targets;
  std::vector<PaddingCell> cells;  // base first, then per target: dense, dominated, random

  const PaddingCell* find(const std::string& condition, int n) const;
};

// For each target N: dense N x N games, the base games under dominated
// padding, and the same bases under random padding.
PaddingTable padding_cliff_experiment(const Agent& agent, const PaddingExperimentOptions& options);

// condition,n,s_at_tau,se_s,pass_at_1,valid_rate
std::string padding_plot_csv(const PaddingTable& table);

nlohmann::json padding_table_to_json(const PaddingTable& table);

}  // namespace procnash
