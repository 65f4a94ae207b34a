#pragma once

#include <nlohmann/json.hpp>

#include "procnash/core/payoff_matrix.hpp"
#include "procnash/core/strategy.hpp"

namespace procnash {

// Matrix literal: {"n": int, "entries": [[...], ...], "meta": {...}}.
nlohmann::json matrix_to_json(const PayoffMatrix& game);
PayoffMatrix matrix_from_json(const nlohmann::json& j);

nlohmann::json meta_to_json(const MatrixMeta& meta);
MatrixMeta meta_from_json(const nlohmann::json& j);

// Strategy pair: {"row": [...], "col": [...]}.
nlohmann::json pair_to_json(const StrategyPair& pair);
StrategyPair pair_from_json(const nlohmann::json& j);

nlohmann::json vector_to_json(const DenseVector<double>& v);

}  // namespace procnash
