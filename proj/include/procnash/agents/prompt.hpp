#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>

#include "procnash/core.hpp"
#include "procnash/gen/gamegen.hpp"

namespace procnash {

// Template text with {{n}}, {{matrix}} and {{filler}} placeholders. The
// default wording is this toolkit's own; pass a custom text to change it.
struct PromptTemplate {
  std::string text;

  static PromptTemplate standard();
  void validate() const;  // requires {{matrix}} exactly once
};

// Shortest decimal that parses back to the same double.
std::string render_number(double x);

// One JSON array per row, rows on separate lines, wrapped in an outer array.
std::string render_matrix(const PayoffMatrix& m);

// Inert system-note text of exactly `chars` characters.
std::string filler_block(std::size_t chars);

std::string build_prompt(const GameRecord& game, const PromptTemplate& tmpl, std::size_t filler_chars = 0);

// Recovers the rendered matrix from a prompt; throws ContractError if absent.
PayoffMatrix extract_matrix(std::string_view prompt, int n);

// Smallest filler size whose prompt reaches `target` under a user-supplied
// length measure (a tokenizer, typically). Character count by default.
using LengthMeasure = std::function<std::size_t(const std::string&)>;
std::size_t filler_for_length(const GameRecord& game, const PromptTemplate& tmpl, std::size_t target,
                              const LengthMeasure& measure = {});

}  // namespace procnash
