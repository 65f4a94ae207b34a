#include "procnash/agents/parse.hpp"

#include <cmath>
#include <optional>
#include <vector>

#include "procnash/agents/prompt.hpp"

namespace procnash {

using nlohmann::json;

namespace {

// End (one past) of the balanced {...} starting at `start`, honoring JSON
// string escapes; npos when unbalanced.
std::size_t object_end(std::string_view text, std::size_t start) {
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = start; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) return i + 1;
    }
  }
  return std::string_view::npos;
}

std::optional<std::vector<double>> numbers(const json& v) {
  if (!v.is_array()) return std::nullopt;
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& x : v) {
    if (!x.is_number()) return std::nullopt;
    const double d = x.get<double>();
    if (!std::isfinite(d)) return std::nullopt;
    out.push_back(d);
  }
  return out;
}

std::string weights_array(const DenseVector<double>& v) {
  std::string s = "[";
  for (Index i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += render_number(v[i]);
  }
  return s + "]";
}

}  // namespace

std::string serialize_weights(const DenseVector<double>& row, const DenseVector<double>& col) {
  return "{\"row\":" + weights_array(row) + ",\"col\":" + weights_array(col) + "}";
}

std::string serialize_pair(const StrategyPair& pair) { return serialize_weights(pair.row.probs(), pair.col.probs()); }

AgentResponse parse_response(std::string_view text, int n) {
  AgentResponse out;
  out.raw_text = std::string(text);

  std::optional<json> found;
  bool partial = false;
  for (std::size_t pos = text.find('{'); pos != std::string_view::npos; pos = text.find('{', pos + 1)) {
    const std::size_t end = object_end(text, pos);
    if (end == std::string_view::npos) continue;
    json obj = json::parse(text.substr(pos, end - pos), nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) continue;
    const bool has_row = obj.contains("row");
    const bool has_col = obj.contains("col");
    if (has_row && has_col) {
      found = std::move(obj);
      break;
    }
    partial = partial || has_row || has_col;
  }

  if (!found) {
    out.parse_error = partial ? ParseError::missing_field : ParseError::malformed;
    return out;
  }
  const auto row = numbers((*found)["row"]);
  const auto col = numbers((*found)["col"]);
  if (!row || !col) {
    out.parse_error = ParseError::malformed;
    return out;
  }
  if (row->size() != static_cast<std::size_t>(n) || col->size() != static_cast<std::size_t>(n)) {
    out.parse_error = ParseError::length_mismatch;
    return out;
  }
  auto p = project_to_simplex(std::span<const double>(*row));
  auto q = project_to_simplex(std::span<const double>(*col));
  if (!p || !q) {
    out.parse_error = ParseError::degenerate_weights;
    return out;
  }
  out.parsed = StrategyPair{std::move(*p), std::move(*q)};
  return out;
}

}  // namespace procnash
