#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "procnash/core/payoff_matrix.hpp"
#include "procnash/core/tolerances.hpp"

namespace procnash {

// A probability vector on the simplex: nonnegative, sums to 1 within 1e-9.
template <class Scalar>
class BasicMixedStrategy {
 public:
  using vector_type = DenseVector<Scalar>;

  explicit BasicMixedStrategy(vector_type probs) : probs_(std::move(probs)) {
    if (probs_.size() < 1) throw ContractError("strategy must be non-empty");
    for (Index i = 0; i < probs_.size(); ++i) {
      if (!std::isfinite(static_cast<double>(probs_[i])) || probs_[i] < Scalar(0)) {
        throw ContractError("strategy components must be finite and nonnegative");
      }
    }
    if (std::abs(static_cast<double>(probs_.sum()) - 1.0) > tol::kSimplexSum) {
      throw ContractError("strategy components must sum to 1");
    }
  }

  static BasicMixedStrategy uniform(Index n) {
    return BasicMixedStrategy(vector_type::Constant(n, Scalar(1) / Scalar(n)));
  }

  static BasicMixedStrategy pure(Index n, Index action) {
    if (action < 0 || action >= n) throw ContractError("pure action out of range");
    vector_type v = vector_type::Zero(n);
    v[action] = Scalar(1);
    return BasicMixedStrategy(std::move(v));
  }

  Index size() const { return probs_.size(); }
  const vector_type& probs() const { return probs_; }
  Scalar operator[](Index i) const { return probs_[i]; }

  std::vector<Scalar> to_vector() const { return {probs_.data(), probs_.data() + probs_.size()}; }

  bool operator==(const BasicMixedStrategy& other) const {
    return probs_.size() == other.probs_.size() && probs_ == other.probs_;
  }

 private:
  vector_type probs_;
};

template <class Scalar>
struct BasicStrategyPair {
  BasicMixedStrategy<Scalar> row;
  BasicMixedStrategy<Scalar> col;

  bool operator==(const BasicStrategyPair&) const = default;

  static BasicStrategyPair uniform(Index n) {
    return {BasicMixedStrategy<Scalar>::uniform(n), BasicMixedStrategy<Scalar>::uniform(n)};
  }
};

using MixedStrategy = BasicMixedStrategy<double>;
using StrategyPair = BasicStrategyPair<double>;

// Clamp negatives to zero then rescale to unit mass. A vector that already
// lies on the simplex (mass within arithmetic slack of 1) is returned as is,
// so projection is idempotent bit-for-bit. Non-finite input or post-clamp
// mass <= 1e-12 has no projection.
template <class Scalar>
std::optional<BasicMixedStrategy<Scalar>> project_to_simplex(std::span<const Scalar> weights) {
  if (weights.empty()) return std::nullopt;
  DenseVector<Scalar> v(static_cast<Index>(weights.size()));
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!std::isfinite(static_cast<double>(weights[i]))) return std::nullopt;
    v[static_cast<Index>(i)] = weights[i] < Scalar(0) ? Scalar(0) : weights[i];
  }
  const Scalar mass = v.sum();
  if (!(mass > Scalar(tol::kDegenerateMass))) return std::nullopt;
  if (std::abs(static_cast<double>(mass) - 1.0) > tol::kArithmetic) v /= mass;
  return BasicMixedStrategy<Scalar>(std::move(v));
}

template <class Derived>
auto project_to_simplex(const Eigen::MatrixBase<Derived>& weights) {
  using Scalar = typename Derived::Scalar;
  DenseVector<Scalar> copy = weights;
  return project_to_simplex(std::span<const Scalar>(copy.data(), static_cast<std::size_t>(copy.size())));
}

}  // namespace procnash
