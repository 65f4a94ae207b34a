#include "procnash/core/json_io.hpp"

namespace procnash {

using nlohmann::json;

json meta_to_json(const MatrixMeta& meta) {
  json j = json::object();
  if (meta.seed) j["seed"] = *meta.seed;
  if (!meta.distribution.empty()) j["distribution"] = meta.distribution;
  j["normalized"] = meta.normalized;
  if (meta.perturbed) j["perturbed"] = true;
  if (meta.density) j["density"] = *meta.density;
  return j;
}

MatrixMeta meta_from_json(const json& j) {
  MatrixMeta meta;
  if (!j.is_object()) return meta;
  if (j.contains("seed")) meta.seed = j.at("seed").get<std::uint64_t>();
  meta.distribution = j.value("distribution", std::string{});
  meta.normalized = j.value("normalized", false);
  meta.perturbed = j.value("perturbed", false);
  if (j.contains("density")) meta.density = j.at("density").get<double>();
  return meta;
}

json matrix_to_json(const PayoffMatrix& game) {
  json rows = json::array();
  for (Index i = 0; i < game.n(); ++i) {
    json row = json::array();
    for (Index j = 0; j < game.n(); ++j) row.push_back(game(i, j));
    rows.push_back(std::move(row));
  }
  return json{{"n", game.n()}, {"entries", std::move(rows)}, {"meta", meta_to_json(game.meta())}};
}

PayoffMatrix matrix_from_json(const json& j) {
  try {
    const auto& rows = j.at("entries");
    const auto n = static_cast<Index>(rows.size());
    if (j.contains("n") && j.at("n").get<Index>() != n) throw ContractError("matrix literal: n does not match entries");
    DenseMatrix<double> m(n, n);
    for (Index i = 0; i < n; ++i) {
      const auto& row = rows.at(static_cast<std::size_t>(i));
      if (static_cast<Index>(row.size()) != n) throw ContractError("matrix literal: ragged rows");
      for (Index k = 0; k < n; ++k) m(i, k) = row.at(static_cast<std::size_t>(k)).get<double>();
    }
    return PayoffMatrix(std::move(m), meta_from_json(j.value("meta", json::object())));
  } catch (const json::exception& e) {
    throw ContractError(std::string("matrix literal: ") + e.what());
  }
}

json vector_to_json(const DenseVector<double>& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json pair_to_json(const StrategyPair& pair) {
  return json{{"row", vector_to_json(pair.row.probs())}, {"col", vector_to_json(pair.col.probs())}};
}

StrategyPair pair_from_json(const json& j) {
  try {
    auto read = [](const json& arr) {
      DenseVector<double> v(static_cast<Index>(arr.size()));
      for (std::size_t i = 0; i < arr.size(); ++i) v[static_cast<Index>(i)] = arr[i].get<double>();
      return MixedStrategy(std::move(v));
    };
    return {read(j.at("row")), read(j.at("col"))};
  } catch (const json::exception& e) {
    throw ContractError(std::string("strategy pair: ") + e.what());
  }
}

}  // namespace procnash
