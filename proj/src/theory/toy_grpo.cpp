#include "procnash/theory/toy_grpo.hpp"

#include <algorithm>
#include <cmath>

namespace procnash {

using nlohmann::json;

namespace {

void compositions(int n, int total, std::vector<int>& prefix, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(prefix.size()) == n - 1) {
    prefix.push_back(total);
    out.push_back(prefix);
    prefix.pop_back();
    return;
  }
  for (int c = 0; c <= total; ++c) {
    prefix.push_back(c);
    compositions(n, total - c, prefix, out);
    prefix.pop_back();
  }
}

DenseVector<double> softmax(const DenseVector<double>& logits) {
  const DenseVector<double> e = (logits.array() - logits.maxCoeff()).exp().matrix();
  return e / e.sum();
}

Index sample_index(const DenseVector<double>& probs, CounterRng& rng) {
  const double u = rng.uniform01();
  double acc = 0.0;
  for (Index i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return i;
  }
  return probs.size() - 1;
}

// Gradient of KL(pi || ref) with respect to the logits of pi.
DenseVector<double> kl_gradient(const DenseVector<double>& pi, const DenseVector<double>& ref) {
  const DenseVector<double> log_ratio = (pi.array().log() - ref.array().log()).matrix();
  const double kl = pi.dot(log_ratio);
  return (pi.array() * (log_ratio.array() - kl)).matrix();
}

}  // namespace

std::vector<std::vector<double>> simplex_grid(int n, int m) {
  if (n < 1 || m < 2) throw ContractError("simplex grid needs n >= 1 and m >= 2");
  std::vector<std::vector<int>> raw;
  std::vector<int> prefix;
  compositions(n, m - 1, prefix, raw);
  std::vector<std::vector<double>> out;
  out.reserve(raw.size());
  for (const auto& c : raw) {
    std::vector<double> p;
    for (const int x : c) p.push_back(static_cast<double>(x) / static_cast<double>(m - 1));
    out.push_back(std::move(p));
  }
  return out;
}

ToyTrace toy_grpo_train(const GameRecord& game, const ToyPolicyConfig& config, GrpoMode mode, int steps,
                        std::uint64_t seed) {
  if (config.group_size < 1 || config.groups_per_step < 1 || steps < 0) {
    throw ContractError("toy trainer needs group_size >= 1, groups_per_step >= 1 and steps >= 0");
  }
  const PayoffMatrix& a = game.matrix;
  const int n = static_cast<int>(a.n());
  const auto grid = simplex_grid(n, config.grid);
  const Index points = static_cast<Index>(grid.size());

  std::vector<MixedStrategy> strategies;
  for (const auto& p : grid) strategies.emplace_back(DenseVector<double>(Eigen::Map<const DenseVector<double>>(p.data(), n)));

  // Scores of every grid pair; the policy never leaves the grid.
  DenseMatrix<double> normalized(points, points);
  DenseMatrix<double> row_payoff(points, points);
  for (Index i = 0; i < points; ++i) {
    for (Index j = 0; j < points; ++j) {
      const auto rep = exploitability(a, StrategyPair{strategies[static_cast<std::size_t>(i)],
                                                      strategies[static_cast<std::size_t>(j)]});
      normalized(i, j) = rep.normalized;
      row_payoff(i, j) = rep.value;
    }
  }

  DenseVector<double> row_logits = DenseVector<double>::Zero(points);
  DenseVector<double> col_logits = DenseVector<double>::Zero(points);
  const DenseVector<double> reference = softmax(row_logits);

  ToyTrace trace;
  trace.mode = mode;
  trace.config = config;
  trace.initial_expected_exploit = reference.dot(normalized * reference);

  for (int step = 0; step < steps; ++step) {
    CounterRng rng(derive_seed(seed, {fnv1a64("toy-grpo"), static_cast<std::uint64_t>(step)}));
    const DenseVector<double> pr = softmax(row_logits);
    const DenseVector<double> pc = softmax(col_logits);

    std::vector<std::vector<double>> rewards(static_cast<std::size_t>(config.groups_per_step));
    std::vector<std::vector<std::pair<Index, Index>>> picks(rewards.size());
    double exploit_sum = 0.0, reward_sum = 0.0;
    for (std::size_t g = 0; g < rewards.size(); ++g) {
      for (int s = 0; s < config.group_size; ++s) {
        const Index i = sample_index(pr, rng);
        const Index j = sample_index(pc, rng);
        picks[g].emplace_back(i, j);
        const double r = mode == GrpoMode::cooperative ? 1.0 - normalized(i, j) : row_payoff(i, j);
        rewards[g].push_back(r);
        exploit_sum += normalized(i, j);
        reward_sum += r;
      }
    }

    std::vector<GrpoGroup> groups;
    if (config.normalization == GroupNormalization::batch) {
      groups = grpo_advantages_batch(rewards, mode);
    } else {
      for (const auto& r : rewards) groups.push_back(grpo_advantages(r, mode));
    }

    // Each sampled pair is one output y = (row point, col point), so
    // grad log pi(y) = (e_i - pi_row, e_j - pi_col).
    DenseVector<double> grad_row = DenseVector<double>::Zero(points);
    DenseVector<double> grad_col = DenseVector<double>::Zero(points);
    const double samples = static_cast<double>(config.group_size * config.groups_per_step);
    for (std::size_t g = 0; g < groups.size(); ++g) {
      for (std::size_t s = 0; s < picks[g].size(); ++s) {
        const double coef = groups[g].per_output_coefficient[s] / samples;
        const auto [i, j] = picks[g][s];
        grad_row -= coef * pr;
        grad_row[i] += coef;
        grad_col -= coef * pc;
        grad_col[j] += coef;
      }
    }

    row_logits += config.learning_rate * grad_row;
    col_logits += config.learning_rate * grad_col;
    if (config.kl_coef != 0.0) {
      row_logits -= config.learning_rate * config.kl_coef * kl_gradient(pr, reference);
      col_logits -= config.learning_rate * config.kl_coef * kl_gradient(pc, reference);
    }

    const DenseVector<double> nr = softmax(row_logits);
    const DenseVector<double> nc = softmax(col_logits);
    trace.steps.push_back({step, reward_sum / samples, exploit_sum / samples, nr.dot(normalized * nc),
                           std::sqrt(grad_row.squaredNorm() + grad_col.squaredNorm())});
    if (!row_logits.allFinite() || !col_logits.allFinite()) {
      trace.diverged = true;
      break;
    }
  }
  trace.row_logits.assign(row_logits.data(), row_logits.data() + row_logits.size());
  trace.col_logits.assign(col_logits.data(), col_logits.data() + col_logits.size());
  return trace;
}

std::vector<double> window_means(const ToyTrace& trace, int width) {
  if (width < 1) throw ContractError("window width must be positive");
  std::vector<double> out;
  const auto w = static_cast<std::size_t>(width);
  for (std::size_t start = 0; start + w <= trace.steps.size(); start += w) {
    double sum = 0.0;
    for (std::size_t i = start; i < start + w; ++i) sum += trace.steps[i].expected_exploit;
    out.push_back(sum / static_cast<double>(width));
  }
  return out;
}

json toy_step_to_json(const ToyStep& s) {
  return json{{"step", s.step},
              {"mean_reward", s.mean_reward},
              {"sampled_exploit", s.sampled_exploit},
              {"expected_exploit", s.expected_exploit},
              {"grad_norm", s.grad_norm}};
}

}  // namespace procnash
