#pragma once

#include <string>
#include <string_view>

#include "procnash/agents/agent.hpp"

namespace procnash {

// Canonical output object {"row":[...],"col":[...]} with round-trip numbers.
std::string serialize_pair(const StrategyPair& pair);
std::string serialize_weights(const DenseVector<double>& row, const DenseVector<double>& col);

// Finds the first JSON object in `text` carrying both "row" and "col",
// checks lengths against n and projects both onto the simplex. Never throws.
AgentResponse parse_response(std::string_view text, int n);

}  // namespace procnash
