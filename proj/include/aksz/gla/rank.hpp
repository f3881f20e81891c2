#pragma once

// Rank kernels over Q.
//
//   rank()           sparse fraction-free elimination (the production path)
//   rank_parallel()  dense Bareiss elimination with OpenMP row updates
//   rank_reference() textbook dense rational Gauss-Jordan, serial; kept as the
//                    test oracle for the other two
//
// All three compute the dimension of the column span.

#include <map>
#include <optional>
#include <vector>

#include "aksz/gla/matrix.hpp"

namespace aksz::gla {

/// Incremental echelon basis of a subspace of Q^n with integer (primitive)
/// rows. Reduction is fraction-free; when two rows compete for a pivot column
/// the one with the smaller total bit size is kept as the pivot.
class Echelon {
 public:
  using IntRow = std::vector<std::pair<int, Integer>>;

  /// Returns true iff v was independent of the vectors inserted so far.
  bool insert(const SparseVector& v);
  int rank() const { return static_cast<int>(pivots_.size()); }

  /// True iff v lies in the current span (does not modify the basis).
  bool contains(const SparseVector& v) const;

 private:
  IntRow reduce(IntRow row);
  std::map<int, IntRow> pivots_;
};

int rank(const SparseMatrix& m);
int rank_parallel(const SparseMatrix& m);
int rank_reference(const SparseMatrix& m);

/// Basis of the null space {x : m x = 0}, from the reduced row echelon form.
std::vector<SparseVector> kernel_basis(const SparseMatrix& m);

/// Inverse of a square matrix; nullopt when singular.
std::optional<SparseMatrix> inverse(const SparseMatrix& m);

}  // namespace aksz::gla
