#include "procnash/agents/prompt.hpp"

#include <charconv>
#include <nlohmann/json.hpp>

namespace procnash {

namespace {

constexpr std::string_view kNote =
    "System note: this session is recorded for routine quality review. Scheduled maintenance will not "
    "affect this conversation. No reply to this note is needed. ";

void replace_all(std::string& s, std::string_view key, const std::string& value) {
  for (std::size_t pos = s.find(key); pos != std::string::npos; pos = s.find(key, pos + value.size())) {
    s.replace(pos, key.size(), value);
  }
}

}  // namespace

PromptTemplate PromptTemplate::standard() {
  return {
      "You are analyzing a two-player zero-sum matrix game with {{n}} actions per player.\n"
      "{{filler}}\n"
      "The row player picks a row, the column player picks a column, and the entry is what the column "
      "player pays the row player.\n\n"
      "Payoff matrix (rows are the row player's actions):\n"
      "{{matrix}}\n\n"
      "Give a Nash equilibrium as a single JSON object {\"row\": [...], \"col\": [...]}, each list holding "
      "{{n}} nonnegative weights that sum to 1."};
}

void PromptTemplate::validate() const {
  const auto first = text.find("{{matrix}}");
  if (first == std::string::npos || text.find("{{matrix}}", first + 1) != std::string::npos) {
    throw ContractError("prompt template must contain {{matrix}} exactly once");
  }
}

std::string render_number(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string render_matrix(const PayoffMatrix& m) {
  std::string out = "[";
  for (Index i = 0; i < m.n(); ++i) {
    if (i) out += ",\n ";
    out += "[";
    for (Index j = 0; j < m.n(); ++j) {
      if (j) out += ", ";
      out += render_number(m(i, j));
    }
    out += "]";
  }
  return out + "]";
}

std::string filler_block(std::size_t chars) {
  std::string out;
  out.reserve(chars);
  while (out.size() < chars) out.append(kNote.substr(0, std::min(kNote.size(), chars - out.size())));
  return out;
}

std::string build_prompt(const GameRecord& game, const PromptTemplate& tmpl, std::size_t filler_chars) {
  tmpl.validate();
  std::string out = tmpl.text;
  replace_all(out, "{{filler}}", filler_block(filler_chars));
  replace_all(out, "{{n}}", std::to_string(game.matrix.n()));
  replace_all(out, "{{matrix}}", render_matrix(game.matrix));
  return out;
}

PayoffMatrix extract_matrix(std::string_view prompt, int n) {
  const auto start = prompt.find("[[");
  if (start == std::string_view::npos) throw ContractError("no matrix literal in prompt");
  int depth = 0;
  std::size_t end = start;
  for (; end < prompt.size(); ++end) {
    if (prompt[end] == '[') ++depth;
    if (prompt[end] == ']' && --depth == 0) break;
  }
  if (end == prompt.size()) throw ContractError("unterminated matrix literal in prompt");
  const auto rows = nlohmann::json::parse(prompt.substr(start, end + 1 - start), nullptr, false);
  if (rows.is_discarded() || !rows.is_array() || rows.size() != static_cast<std::size_t>(n)) {
    throw ContractError("matrix literal has the wrong shape");
  }
  DenseMatrix<double> e(n, n);
  for (int i = 0; i < n; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || row.size() != static_cast<std::size_t>(n)) {
      throw ContractError("matrix literal has the wrong shape");
    }
    for (int j = 0; j < n; ++j) e(i, j) = row[static_cast<std::size_t>(j)].get<double>();
  }
  return PayoffMatrix(std::move(e));
}

std::size_t filler_for_length(const GameRecord& game, const PromptTemplate& tmpl, std::size_t target,
                              const LengthMeasure& measure) {
  const auto size_of = [&](std::size_t chars) {
    const std::string p = build_prompt(game, tmpl, chars);
    return measure ? measure(p) : p.size();
  };
  if (size_of(0) >= target) return 0;
  std::size_t hi = 1;
  while (size_of(hi) < target) {
    if (hi > (std::size_t{1} << 26)) throw ContractError("filler search did not reach the target length");
    hi *= 2;
  }
  std::size_t lo = hi / 2;  // size_of(lo) < target (or lo == 0)
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    (size_of(mid) >= target ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace procnash
