#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "procnash/agents/agent.hpp"

namespace procnash {

struct AuditTrial {
  std::string game_id;
  int n = 0;
  int trial = 0;
  nlohmann::json transform;  // permutations or (c, d)
  bool excluded = false;     // an invalid response on either side
  double reward_base = 0.0;
  double reward_transformed = 0.0;
  double diff = 0.0;
};

struct AuditSizeStats {
  int n = 0;
  int count = 0;  // included trials
  int excluded = 0;
  double mean = 0.0;
  double max = 0.0;
};

struct AuditStats {
  std::string kind;
  int count = 0;
  int excluded = 0;
  double mean = 0.0;
  double max = 0.0;
  std::vector<AuditSizeStats> per_size;  // ascending n
  std::vector<AuditTrial> trials;
};

struct AffineRange {
  double c_lo = 0.5;
  double c_hi = 2.0;
  double d_lo = -1.0;
  double d_hi = 1.0;
};

// |reward(A, agent(A)) - reward(sigma A, agent(sigma A))| over random row and
// column permutations; first sample only. Compares rewards, not strategies.
AuditStats permutation_equivariance_audit(const Agent& agent, const std::vector<GameRecord>& games,
                                          int trials_per_game, std::uint64_t seed, int jobs = 1);

// Same statistic for A -> cA + d with c, d drawn uniformly from `range`.
AuditStats affine_invariance_audit(const Agent& agent, const std::vector<GameRecord>& games, int trials_per_game,
                                   std::uint64_t seed, const AffineRange& range = {}, int jobs = 1);

nlohmann::json audit_to_json(const AuditStats& stats, bool include_trials = true);

}  // namespace procnash
