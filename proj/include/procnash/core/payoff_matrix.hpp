#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>

#include "procnash/core/errors.hpp"

namespace procnash {

template <class Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <class Scalar>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Index = Eigen::Index;

// Provenance carried alongside a payoff matrix.
struct MatrixMeta {
  std::optional<std::uint64_t> seed;
  std::string distribution;  // empty when unknown
  bool normalized = false;
  bool perturbed = false;  // constant-matrix bump was applied before scaling
  std::optional<double> density;

  bool operator==(const MatrixMeta&) const = default;
};

// Square zero-sum payoff matrix; entry (i, j) is paid by the column player to
// the row player when row i meets column j.
//
// Invariants: n >= 2, all entries finite, and a matrix flagged as normalized
// has a strictly positive payoff range.
template <class Scalar>
class BasicPayoffMatrix {
 public:
  using scalar_type = Scalar;
  using matrix_type = DenseMatrix<Scalar>;

  explicit BasicPayoffMatrix(matrix_type entries, MatrixMeta meta = {})
      : entries_(std::move(entries)), meta_(std::move(meta)) {
    validate();
  }

  template <class Derived>
  static BasicPayoffMatrix from_expression(const Eigen::MatrixBase<Derived>& expr,
                                           MatrixMeta meta = {}) {
    return BasicPayoffMatrix(matrix_type(expr), std::move(meta));
  }

  Index n() const { return entries_.rows(); }
  const matrix_type& entries() const { return entries_; }
  const MatrixMeta& meta() const { return meta_; }

  Scalar operator()(Index i, Index j) const { return entries_(i, j); }

  Scalar max() const { return entries_.maxCoeff(); }
  Scalar min() const { return entries_.minCoeff(); }
  Scalar range() const { return max() - min(); }
  bool is_constant() const { return !(range() > Scalar(0)); }

  BasicPayoffMatrix with_meta(MatrixMeta meta) const { return BasicPayoffMatrix(entries_, std::move(meta)); }

  bool operator==(const BasicPayoffMatrix& other) const {
    return entries_.rows() == other.entries_.rows() && entries_.cols() == other.entries_.cols() &&
           entries_ == other.entries_ && meta_ == other.meta_;
  }

 private:
  void validate() const {
    if (entries_.rows() != entries_.cols()) {
      throw ContractError("payoff matrix must be square");
    }
    if (entries_.rows() < 2) {
      throw ContractError("payoff matrix needs at least 2 actions per side");
    }
    for (Index i = 0; i < entries_.size(); ++i) {
      if (!std::isfinite(static_cast<double>(entries_.data()[i]))) {
        throw ContractError("payoff matrix entries must be finite");
      }
    }
    if (meta_.normalized && is_constant()) {
      throw ContractError("a normalized payoff matrix must have positive range");
    }
  }

  matrix_type entries_;
  MatrixMeta meta_;
};

using PayoffMatrix = BasicPayoffMatrix<double>;

// Max-entry norm ||A - B||_inf = max_ij |A_ij - B_ij|.
template <class DerivedA, class DerivedB>
auto max_entry_distance(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

template <class Scalar>
Scalar max_entry_distance(const BasicPayoffMatrix<Scalar>& a, const BasicPayoffMatrix<Scalar>& b) {
  if (a.n() != b.n()) throw ContractError("matrix sizes differ");
  return max_entry_distance(a.entries(), b.entries());
}

}  // namespace procnash
