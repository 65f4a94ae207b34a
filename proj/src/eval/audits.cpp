#include "procnash/eval/audits.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "procnash/eval/harness.hpp"
#include "procnash/eval/parallel.hpp"

namespace procnash {

using nlohmann::json;

namespace {

constexpr std::uint64_t kTagPermutation = fnv1a64("audit:permutation");
constexpr std::uint64_t kTagAffine = fnv1a64("audit:affine");

Permutation random_permutation(Index n, CounterRng& rng) {
  std::vector<Index> image(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) image[static_cast<std::size_t>(i)] = i;
  for (std::size_t i = image.size() - 1; i > 0; --i) {
    std::swap(image[i], image[static_cast<std::size_t>(rng.below(i + 1))]);
  }
  return Permutation(std::move(image));
}

std::optional<double> first_reward(const Agent& agent, const GameRecord& game) {
  std::vector<AgentResponse> r;
  try {
    r = agent.propose(game, 1);
  } catch (const std::exception&) {
    return std::nullopt;
  }
  if (r.empty() || !r.front().valid()) return std::nullopt;
  return score_response(game, r.front()).reward;
}

using Transform = std::function<std::pair<GameRecord, json>(const GameRecord&, CounterRng&)>;

AuditStats run_audit(std::string kind, std::uint64_t tag, const Agent& agent, const std::vector<GameRecord>& games,
                     int trials_per_game, std::uint64_t seed, int jobs, const Transform& transform) {
  if (trials_per_game < 1) throw ContractError("audit needs at least one trial per game");
  AuditStats stats;
  stats.kind = std::move(kind);
  stats.trials.resize(games.size() * static_cast<std::size_t>(trials_per_game));
  parallel_for(games.size(), jobs, [&](std::size_t g) {
    const GameRecord& game = games[g];
    const auto base = first_reward(agent, game);
    for (int t = 0; t < trials_per_game; ++t) {
      CounterRng rng(derive_seed(seed, {tag, fnv1a64(game.id), static_cast<std::uint64_t>(t)}));
      auto [moved, description] = transform(game, rng);
      AuditTrial& trial = stats.trials[g * static_cast<std::size_t>(trials_per_game) + static_cast<std::size_t>(t)];
      trial.game_id = game.id;
      trial.n = static_cast<int>(game.matrix.n());
      trial.trial = t;
      trial.transform = std::move(description);
      const auto other = first_reward(agent, moved);
      trial.excluded = !base || !other;
      if (!trial.excluded) {
        trial.reward_base = *base;
        trial.reward_transformed = *other;
        trial.diff = std::abs(*base - *other);
      }
    }
  });

  std::map<int, AuditSizeStats> by_size;
  double total = 0.0;
  for (const auto& t : stats.trials) {
    auto& s = by_size[t.n];
    s.n = t.n;
    if (t.excluded) {
      ++s.excluded;
      ++stats.excluded;
      continue;
    }
    ++s.count;
    s.mean += t.diff;
    s.max = std::max(s.max, t.diff);
    ++stats.count;
    total += t.diff;
    stats.max = std::max(stats.max, t.diff);
  }
  for (auto& [n, s] : by_size) {
    if (s.count) s.mean /= s.count;
    stats.per_size.push_back(s);
  }
  if (stats.count) stats.mean = total / stats.count;
  return stats;
}

}  // namespace

AuditStats permutation_equivariance_audit(const Agent& agent, const std::vector<GameRecord>& games,
                                          int trials_per_game, std::uint64_t seed, int jobs) {
  return run_audit("permutation", kTagPermutation, agent, games, trials_per_game, seed, jobs,
                   [](const GameRecord& game, CounterRng& rng) {
                     const Permutation rows = random_permutation(game.matrix.n(), rng);
                     const Permutation cols = random_permutation(game.matrix.n(), rng);
                     json d{{"sigma_row", rows.image()}, {"sigma_col", cols.image()}};
                     return std::pair{derived_game(game, apply_permutation(game.matrix, rows, cols), d.dump()), d};
                   });
}

AuditStats affine_invariance_audit(const Agent& agent, const std::vector<GameRecord>& games, int trials_per_game,
                                   std::uint64_t seed, const AffineRange& range, int jobs) {
  if (!(range.c_lo > 0.0) || range.c_hi < range.c_lo || range.d_hi < range.d_lo) {
    throw ContractError("affine audit needs 0 < c_lo <= c_hi and d_lo <= d_hi");
  }
  return run_audit("affine", kTagAffine, agent, games, trials_per_game, seed, jobs,
                   [range](const GameRecord& game, CounterRng& rng) {
                     const double c = rng.uniform(range.c_lo, range.c_hi);
                     const double d = rng.uniform(range.d_lo, range.d_hi);
                     json desc{{"c", c}, {"d", d}};
                     return std::pair{derived_game(game, apply_affine(game.matrix, c, d), desc.dump()), desc};
                   });
}

json audit_to_json(const AuditStats& stats, bool include_trials) {
  json per_size = json::array();
  for (const auto& s : stats.per_size) {
    per_size.push_back({{"n", s.n}, {"count", s.count}, {"excluded", s.excluded}, {"mean", s.mean}, {"max", s.max}});
  }
  json j{{"kind", stats.kind},     {"count", stats.count}, {"excluded", stats.excluded},
         {"mean", stats.mean},     {"max", stats.max},     {"per_size", per_size}};
  if (include_trials) {
    json trials = json::array();
    for (const auto& t : stats.trials) {
      trials.push_back({{"game_id", t.game_id},
                        {"n", t.n},
                        {"trial", t.trial},
                        {"transform", t.transform},
                        {"excluded", t.excluded},
                        {"reward_base", t.reward_base},
                        {"reward_transformed", t.reward_transformed},
                        {"diff", t.diff}});
    }
    j["trials"] = std::move(trials);
  }
  return j;
}

}  // namespace procnash
