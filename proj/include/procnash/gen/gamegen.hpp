#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "procnash/core.hpp"
#include "procnash/gen/rng.hpp"

namespace procnash {

enum class Distribution { integer, gaussian, sparse };

std::string to_string(Distribution d);
Distribution distribution_from_string(const std::string& s);

struct GameSpec {
  int n = 2;
  Distribution distribution = Distribution::integer;
  std::uint64_t seed = 0;
  bool normalize = true;
  double sparse_density = 0.2;  // sparse only

  bool operator==(const GameSpec&) const = default;
};

struct GameRecord {
  GameSpec spec;
  PayoffMatrix matrix;  // post-normalization
  PayoffMatrix raw;     // pre-normalization
  std::string id;
};

enum class PadKind { dominated, random };

std::string to_string(PadKind k);

struct PaddedGameRecord {
  GameRecord base;
  PayoffMatrix padded;
  PadKind kind = PadKind::dominated;
  std::vector<Index> row_map;  // base action i sits at padded row row_map[i]
  std::vector<Index> col_map;
  StrategyPair reference_pair;  // base equilibrium zero-extended into the padded game
  // Oracle certificate; populated for dominated padding.
  double reference_exploit = 0.0;
  double base_value = 0.0;
  double padded_value = 0.0;
  std::string id;

  // View as a plain N x N game record for agents and the harness.
  GameRecord as_game() const;
};

struct PadOptions {
  bool shuffle = false;  // seeded placement of padded actions
  std::uint64_t salt = 0;
};

// Draws one game. Integer entries are uniform on {-9, ..., 9}; gaussian entries
// are standard normal; sparse entries are zero with probability 1 - density
// and otherwise uniform on {-9, ..., 9} \ {0}. The generator key is
// derive_seed(spec.seed, {n, distribution}).
GameRecord sample_game(const GameSpec& spec);

// Appends target_n - k actions that iterated dominance removes: new rows sit
// below min(base) by u, new columns sit above max(base) by u on original rows,
// u uniform on {1, ..., 5} per entry. Re-verified by the LP oracle.
PaddedGameRecord dominated_pad(const GameRecord& base, int target_n, const PadOptions& options = {});

// Keeps the base block in the top-left corner and fills everything else with
// fresh draws from the base distribution, in the base's normalized units.
PaddedGameRecord random_pad(const GameRecord& base, int target_n, const PadOptions& options = {});

// Game i uses seed derive_seed(eval_seed, {n, i}).
std::uint64_t eval_child_seed(std::uint64_t eval_seed, int n, int index);
std::vector<GameRecord> make_eval_set(int n, int count, const GameSpec& spec_template, std::uint64_t eval_seed);

// Stable content hash ("g" + 16 hex digits).
std::string content_id(std::string_view prefix, const GameSpec& spec, const PayoffMatrix& m);

// A record for a transformed copy of a game (audits); id derives from the
// parent id, the tag and the new content.
GameRecord derived_game(const GameRecord& parent, PayoffMatrix matrix, std::string_view tag);

// JSONL schema "gamerec/1".
inline constexpr const char* kGameRecordSchema = "gamerec/1";

nlohmann::json spec_to_json(const GameSpec& spec);
GameSpec spec_from_json(const nlohmann::json& j);
nlohmann::json record_to_json(const GameRecord& rec);
nlohmann::json record_to_json(const PaddedGameRecord& rec);
GameRecord game_record_from_json(const nlohmann::json& j);
PaddedGameRecord padded_record_from_json(const nlohmann::json& j);
bool is_padded_record(const nlohmann::json& j);

// Reads gamerec/1 lines; padded lines come back as their as_game() view.
std::vector<GameRecord> read_game_records(std::istream& in);
void write_jsonl(std::ostream& out, const nlohmann::json& line);

}  // namespace procnash
