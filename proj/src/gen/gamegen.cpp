#include "procnash/gen/gamegen.hpp"

#include <bit>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <string>

#include "procnash/core/json_io.hpp"
#include "procnash/solver/nash.hpp"

namespace procnash {

using nlohmann::json;

namespace {

constexpr std::uint64_t kTagDominated = fnv1a64("pad:dominated");
constexpr std::uint64_t kTagRandom = fnv1a64("pad:random");
constexpr std::uint64_t kTagShuffle = fnv1a64("pad:shuffle");

std::uint64_t distribution_tag(Distribution d) { return static_cast<std::uint64_t>(d) + 1; }

// One raw entry from the distribution; the integer paths are exact.
double draw_entry(CounterRng& rng, Distribution d, double density) {
  switch (d) {
    case Distribution::integer:
      return static_cast<double>(rng.uniform_int(-9, 9));
    case Distribution::gaussian:
      return rng.normal();
    case Distribution::sparse: {
      if (!(rng.uniform01() < density)) return 0.0;
      const auto k = rng.uniform_int(0, 17);  // 18 nonzero values
      return static_cast<double>(k < 9 ? k - 9 : k - 8);
    }
  }
  return 0.0;
}

MatrixMeta raw_meta(const GameSpec& spec) {
  MatrixMeta meta;
  meta.seed = spec.seed;
  meta.distribution = to_string(spec.distribution);
  if (spec.distribution == Distribution::sparse) meta.density = spec.sparse_density;
  return meta;
}

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::uint64_t hash_matrix(const PayoffMatrix& m, std::uint64_t h) {
  for (Index i = 0; i < m.n(); ++i) {
    for (Index j = 0; j < m.n(); ++j) {
      const auto bits = std::bit_cast<std::uint64_t>(m(i, j));
      h = fnv1a64(std::string_view(reinterpret_cast<const char*>(&bits), sizeof bits), h);
    }
  }
  return h;
}

// Scale that maps the base game's raw units onto its stored matrix.
double base_scale(const GameRecord& base) {
  if (!base.spec.normalize) return 1.0;
  return normalization_step(base.raw).scale;
}

// order[slot] is the final position of logical action `slot`; logical
// actions 0..k-1 are the base actions.
std::vector<Index> placement(int target_n, bool shuffle, CounterRng& rng) {
  std::vector<Index> order(static_cast<std::size_t>(target_n));
  std::iota(order.begin(), order.end(), Index{0});
  if (shuffle) {
    for (std::size_t i = order.size() - 1; i > 0; --i) {
      std::swap(order[i], order[static_cast<std::size_t>(rng.below(i + 1))]);
    }
  }
  return order;
}

void check_pad_target(const GameRecord& base, int target_n) {
  if (target_n <= base.spec.n) throw ContractError("padding target must exceed the base size");
  if (target_n > kMaxLpActions) throw ContractError("padding target exceeds the supported size");
}

// Logical -> final placement of a logical matrix and a base pair.
void place(const DenseMatrix<double>& logical, const std::vector<Index>& rows, const std::vector<Index>& cols,
           DenseMatrix<double>& out) {
  out.resize(logical.rows(), logical.cols());
  for (Index i = 0; i < logical.rows(); ++i) {
    for (Index j = 0; j < logical.cols(); ++j) {
      out(rows[static_cast<std::size_t>(i)], cols[static_cast<std::size_t>(j)]) = logical(i, j);
    }
  }
}

MixedStrategy embed(const MixedStrategy& s, const std::vector<Index>& map, Index target_n) {
  DenseVector<double> v = DenseVector<double>::Zero(target_n);
  for (Index i = 0; i < s.size(); ++i) v[map[static_cast<std::size_t>(i)]] = s[i];
  return MixedStrategy(std::move(v));
}

std::string padded_id(const PaddedGameRecord& rec) {
  std::uint64_t h = fnv1a64("padrec/1|");
  h = fnv1a64(to_string(rec.kind), h);
  h = fnv1a64("|" + rec.base.id + "|", h);
  h = hash_matrix(rec.padded, h);
  for (const Index v : rec.row_map) h = fnv1a64(std::to_string(v) + ",", h);
  for (const Index v : rec.col_map) h = fnv1a64(std::to_string(v) + ";", h);
  return "p" + hex64(h);
}

}  // namespace

std::string to_string(Distribution d) {
  switch (d) {
    case Distribution::integer:
      return "integer";
    case Distribution::gaussian:
      return "gaussian";
    case Distribution::sparse:
      return "sparse";
  }
  return "integer";
}

Distribution distribution_from_string(const std::string& s) {
  if (s == "integer") return Distribution::integer;
  if (s == "gaussian") return Distribution::gaussian;
  if (s == "sparse") return Distribution::sparse;
  throw ContractError("unknown distribution '" + s + "' (expected integer, gaussian or sparse)");
}

std::string to_string(PadKind k) { return k == PadKind::dominated ? "dominated" : "random"; }

std::string content_id(std::string_view prefix, const GameSpec& spec, const PayoffMatrix& m) {
  std::uint64_t h = fnv1a64(prefix);
  h = fnv1a64("|" + to_string(spec.distribution) + "|" + std::to_string(spec.n) + "|" + std::to_string(spec.seed) +
                  "|" + (spec.normalize ? "1" : "0") + "|",
              h);
  if (spec.distribution == Distribution::sparse) {
    const auto bits = std::bit_cast<std::uint64_t>(spec.sparse_density);
    h = fnv1a64(hex64(bits), h);
  }
  return "g" + hex64(hash_matrix(m, h));
}

GameRecord sample_game(const GameSpec& spec) {
  if (spec.n < 2) throw ContractError("game size must be at least 2");
  if (spec.distribution == Distribution::sparse && !(spec.sparse_density > 0.0 && spec.sparse_density <= 1.0)) {
    throw ContractError("sparse density must lie in (0, 1]");
  }
  CounterRng rng(derive_seed(spec.seed, {static_cast<std::uint64_t>(spec.n), distribution_tag(spec.distribution)}));
  DenseMatrix<double> entries(spec.n, spec.n);
  for (Index i = 0; i < spec.n; ++i) {
    for (Index j = 0; j < spec.n; ++j) entries(i, j) = draw_entry(rng, spec.distribution, spec.sparse_density);
  }
  PayoffMatrix raw(std::move(entries), raw_meta(spec));
  PayoffMatrix matrix = spec.normalize ? normalize_payoffs(raw) : raw;
  std::string id = content_id("gamerec/1", spec, raw);
  return GameRecord{spec, std::move(matrix), std::move(raw), std::move(id)};
}

PaddedGameRecord dominated_pad(const GameRecord& base, int target_n, const PadOptions& options) {
  check_pad_target(base, target_n);
  const Index k = base.matrix.n();
  const Index big = target_n;
  CounterRng rng(derive_seed(base.spec.seed, {kTagDominated, static_cast<std::uint64_t>(target_n), options.salt}));

  const double lo = base.matrix.min();
  const double hi = base.matrix.max();
  DenseMatrix<double> logical(big, big);
  logical.topLeftCorner(k, k) = base.matrix.entries();
  for (Index i = 0; i < k; ++i) {
    for (Index j = k; j < big; ++j) logical(i, j) = hi + static_cast<double>(rng.uniform_int(1, 5));
  }
  for (Index i = k; i < big; ++i) {
    for (Index j = 0; j < big; ++j) logical(i, j) = lo - static_cast<double>(rng.uniform_int(1, 5));
  }

  CounterRng shuffle_rng(derive_seed(base.spec.seed, {kTagShuffle, static_cast<std::uint64_t>(target_n), options.salt}));
  const auto rows = placement(target_n, options.shuffle, shuffle_rng);
  const auto cols = placement(target_n, options.shuffle, shuffle_rng);
  DenseMatrix<double> placed;
  place(logical, rows, cols, placed);

  MatrixMeta meta = base.matrix.meta();
  meta.normalized = false;
  PaddedGameRecord rec{base, PayoffMatrix(std::move(placed), meta), PadKind::dominated, {}, {}, uniform_pair(big), 0.0, 0.0, 0.0, {}};
  rec.row_map.assign(rows.begin(), rows.begin() + k);
  rec.col_map.assign(cols.begin(), cols.begin() + k);

  const Equilibrium base_eq = solve_zero_sum_lp(base.matrix);
  rec.reference_pair = {embed(base_eq.pair.row, rec.row_map, big), embed(base_eq.pair.col, rec.col_map, big)};

  const Equilibrium padded_eq = solve_zero_sum_lp(rec.padded);
  rec.base_value = base_eq.value;
  rec.padded_value = padded_eq.value;
  rec.reference_exploit = exploitability(rec.padded, rec.reference_pair).exploit;
  if (!(rec.reference_exploit < tol::kCertificate) ||
      !(std::abs(rec.padded_value - rec.base_value) <= tol::kCertificate)) {
    throw ConstructionError("dominated padding of " + base.id + " to " + std::to_string(target_n) +
                            " failed oracle verification");
  }
  rec.id = padded_id(rec);
  return rec;
}

PaddedGameRecord random_pad(const GameRecord& base, int target_n, const PadOptions& options) {
  check_pad_target(base, target_n);
  const Index k = base.matrix.n();
  const Index big = target_n;
  CounterRng rng(derive_seed(base.spec.seed, {kTagRandom, static_cast<std::uint64_t>(target_n), options.salt}));
  const double scale = base_scale(base);

  DenseMatrix<double> logical(big, big);
  for (Index i = 0; i < big; ++i) {
    for (Index j = 0; j < big; ++j) {
      if (i < k && j < k) {
        logical(i, j) = base.matrix(i, j);
      } else {
        logical(i, j) = scale * draw_entry(rng, base.spec.distribution, base.spec.sparse_density);
      }
    }
  }
  CounterRng shuffle_rng(derive_seed(base.spec.seed, {kTagShuffle, static_cast<std::uint64_t>(target_n), options.salt}));
  const auto rows = placement(target_n, options.shuffle, shuffle_rng);
  const auto cols = placement(target_n, options.shuffle, shuffle_rng);
  DenseMatrix<double> placed;
  place(logical, rows, cols, placed);

  MatrixMeta meta = base.matrix.meta();
  meta.normalized = false;
  PaddedGameRecord rec{base, PayoffMatrix(std::move(placed), meta), PadKind::random, {}, {}, uniform_pair(big), 0.0, 0.0, 0.0, {}};
  rec.row_map.assign(rows.begin(), rows.begin() + k);
  rec.col_map.assign(cols.begin(), cols.begin() + k);

  const Equilibrium base_eq = solve_zero_sum_lp(base.matrix);
  rec.reference_pair = {embed(base_eq.pair.row, rec.row_map, big), embed(base_eq.pair.col, rec.col_map, big)};
  rec.base_value = base_eq.value;
  if (!rec.padded.is_constant()) {
    rec.padded_value = solve_zero_sum_lp(rec.padded).value;
    rec.reference_exploit = exploitability(rec.padded, rec.reference_pair).exploit;
  }
  rec.id = padded_id(rec);
  return rec;
}

GameRecord PaddedGameRecord::as_game() const {
  GameSpec spec = base.spec;
  spec.n = static_cast<int>(padded.n());
  return GameRecord{spec, padded, padded, id};
}

std::uint64_t eval_child_seed(std::uint64_t eval_seed, int n, int index) {
  return derive_seed(eval_seed, {static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(index)});
}

std::vector<GameRecord> make_eval_set(int n, int count, const GameSpec& spec_template, std::uint64_t eval_seed) {
  if (count < 1) throw ContractError("evaluation set needs at least one game");
  std::vector<GameRecord> games;
  games.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    GameSpec spec = spec_template;
    spec.n = n;
    spec.seed = eval_child_seed(eval_seed, n, i);
    games.push_back(sample_game(spec));
  }
  return games;
}

GameRecord derived_game(const GameRecord& parent, PayoffMatrix matrix, std::string_view tag) {
  std::uint64_t h = fnv1a64("derived/1|" + parent.id + "|");
  h = fnv1a64(tag, h);
  h = hash_matrix(matrix, h);
  GameSpec spec = parent.spec;
  spec.n = static_cast<int>(matrix.n());
  return GameRecord{spec, matrix, matrix, "d" + hex64(h)};
}

json spec_to_json(const GameSpec& spec) {
  json j{{"n", spec.n},
         {"distribution", to_string(spec.distribution)},
         {"seed", spec.seed},
         {"normalize", spec.normalize}};
  if (spec.distribution == Distribution::sparse) j["sparse_density"] = spec.sparse_density;
  return j;
}

GameSpec spec_from_json(const json& j) {
  GameSpec spec;
  spec.n = j.at("n").get<int>();
  spec.distribution = distribution_from_string(j.value("distribution", std::string("integer")));
  spec.seed = j.value("seed", std::uint64_t{0});
  spec.normalize = j.value("normalize", true);
  spec.sparse_density = j.value("sparse_density", 0.2);
  return spec;
}

json record_to_json(const GameRecord& rec) {
  return json{{"schema", kGameRecordSchema},
              {"id", rec.id},
              {"spec", spec_to_json(rec.spec)},
              {"matrix", matrix_to_json(rec.matrix)},
              {"raw", matrix_to_json(rec.raw)}};
}

json record_to_json(const PaddedGameRecord& rec) {
  json j{{"schema", kGameRecordSchema},
         {"id", rec.id},
         {"kind", to_string(rec.kind)},
         {"base", record_to_json(rec.base)},
         {"padded", matrix_to_json(rec.padded)},
         {"row_map", rec.row_map},
         {"col_map", rec.col_map},
         {"reference_pair", pair_to_json(rec.reference_pair)}};
  j["certificate"] = json{{"reference_exploit", rec.reference_exploit},
                          {"base_value", rec.base_value},
                          {"padded_value", rec.padded_value},
                          {"verified", rec.kind == PadKind::dominated}};
  return j;
}

bool is_padded_record(const json& j) { return j.contains("padded"); }

GameRecord game_record_from_json(const json& j) {
  if (j.value("schema", std::string{}) != kGameRecordSchema) {
    throw ContractError("expected a gamerec/1 record");
  }
  if (is_padded_record(j)) return padded_record_from_json(j).as_game();
  try {
    return GameRecord{spec_from_json(j.at("spec")), matrix_from_json(j.at("matrix")), matrix_from_json(j.at("raw")),
                      j.at("id").get<std::string>()};
  } catch (const json::exception& e) {
    throw ContractError(std::string("gamerec/1: ") + e.what());
  }
}

PaddedGameRecord padded_record_from_json(const json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    PaddedGameRecord rec{game_record_from_json(j.at("base")),
                         matrix_from_json(j.at("padded")),
                         kind == "dominated" ? PadKind::dominated : PadKind::random,
                         j.at("row_map").get<std::vector<Index>>(),
                         j.at("col_map").get<std::vector<Index>>(),
                         pair_from_json(j.at("reference_pair")),
                         0.0,
                         0.0,
                         0.0,
                         {}};
    const auto& cert = j.value("certificate", json::object());
    rec.reference_exploit = cert.value("reference_exploit", 0.0);
    rec.base_value = cert.value("base_value", 0.0);
    rec.padded_value = cert.value("padded_value", 0.0);
    rec.id = j.at("id").get<std::string>();
    return rec;
  } catch (const json::exception& e) {
    throw ContractError(std::string("gamerec/1 padded: ") + e.what());
  }
}

std::vector<GameRecord> read_game_records(std::istream& in) {
  std::vector<GameRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(game_record_from_json(json::parse(line)));
  }
  return out;
}

void write_jsonl(std::ostream& out, const json& line) { out << line.dump() << '\n'; }

}  // namespace procnash
