#pragma once

#include <numeric>
#include <vector>

#include "procnash/core/payoff_matrix.hpp"
#include "procnash/core/strategy.hpp"

namespace procnash {

// Bijective index map on {0, ..., n-1}; image(i) = sigma(i).
class Permutation {
 public:
  explicit Permutation(std::vector<Index> image) : image_(std::move(image)) {
    std::vector<bool> seen(image_.size(), false);
    for (const Index v : image_) {
      if (v < 0 || static_cast<std::size_t>(v) >= image_.size() || seen[static_cast<std::size_t>(v)]) {
        throw ContractError("index map is not a permutation");
      }
      seen[static_cast<std::size_t>(v)] = true;
    }
  }

  static Permutation identity(Index n) {
    std::vector<Index> image(static_cast<std::size_t>(n));
    std::iota(image.begin(), image.end(), Index{0});
    return Permutation(std::move(image));
  }

  Index size() const { return static_cast<Index>(image_.size()); }
  Index operator()(Index i) const { return image_[static_cast<std::size_t>(i)]; }
  const std::vector<Index>& image() const { return image_; }

  Permutation inverse() const {
    std::vector<Index> inv(image_.size());
    for (std::size_t i = 0; i < image_.size(); ++i) inv[static_cast<std::size_t>(image_[i])] = static_cast<Index>(i);
    return Permutation(std::move(inv));
  }

 private:
  std::vector<Index> image_;
};

// result(i, j) = A(sigma_row(i), sigma_col(j)).
template <class Scalar>
BasicPayoffMatrix<Scalar> apply_permutation(const BasicPayoffMatrix<Scalar>& game, const Permutation& sigma_row,
                                            const Permutation& sigma_col) {
  if (sigma_row.size() != game.n() || sigma_col.size() != game.n()) {
    throw ContractError("permutation length does not match the game");
  }
  DenseMatrix<Scalar> out(game.n(), game.n());
  for (Index i = 0; i < game.n(); ++i) {
    for (Index j = 0; j < game.n(); ++j) out(i, j) = game(sigma_row(i), sigma_col(j));
  }
  return BasicPayoffMatrix<Scalar>(std::move(out), game.meta());
}

// result_i = s_{sigma(i)}; pairs with apply_permutation so that the permuted
// strategy plays the same actions in the permuted game.
template <class Scalar>
BasicMixedStrategy<Scalar> apply_permutation(const BasicMixedStrategy<Scalar>& s, const Permutation& sigma) {
  if (sigma.size() != s.size()) throw ContractError("permutation length does not match the strategy");
  DenseVector<Scalar> out(s.size());
  for (Index i = 0; i < s.size(); ++i) out[i] = s[sigma(i)];
  return BasicMixedStrategy<Scalar>(std::move(out));
}

template <class Scalar>
BasicStrategyPair<Scalar> apply_permutation(const BasicStrategyPair<Scalar>& pair, const Permutation& sigma_row,
                                            const Permutation& sigma_col) {
  return {apply_permutation(pair.row, sigma_row), apply_permutation(pair.col, sigma_col)};
}

// result = scale * A + shift, scale > 0.
template <class Scalar>
BasicPayoffMatrix<Scalar> apply_affine(const BasicPayoffMatrix<Scalar>& game, Scalar scale, Scalar shift) {
  if (!(scale > Scalar(0))) throw ContractError("affine scale must be positive");
  MatrixMeta meta = game.meta();
  meta.normalized = meta.normalized && scale == Scalar(1) && shift == Scalar(0);
  return BasicPayoffMatrix<Scalar>((scale * game.entries().array() + shift).matrix(), std::move(meta));
}

template <class Scalar>
struct NormalizationStep {
  Scalar scale;    // multiplier applied after the optional bump
  bool perturbed;  // entry (0, 0) was bumped by +1
};

// The range normalization A <- 2A / (max A - min A); a constant matrix first
// gets +1 at entry (0, 0).
template <class Scalar>
NormalizationStep<Scalar> normalization_step(const BasicPayoffMatrix<Scalar>& game) {
  if (game.is_constant()) return {Scalar(2), true};  // bumped range is exactly 1
  return {Scalar(2) / game.range(), false};
}

template <class Scalar>
BasicPayoffMatrix<Scalar> normalize_payoffs(const BasicPayoffMatrix<Scalar>& game) {
  const auto step = normalization_step(game);
  DenseMatrix<Scalar> entries = game.entries();
  if (step.perturbed) entries(0, 0) += Scalar(1);
  entries *= step.scale;
  MatrixMeta meta = game.meta();
  meta.normalized = true;
  meta.perturbed = meta.perturbed || step.perturbed;
  return BasicPayoffMatrix<Scalar>(std::move(entries), std::move(meta));
}

}  // namespace procnash
