#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "aksz/rational.hpp"

namespace aksz::gla {

/// Structured basis label. Compared lexicographically on `parts`, which gives
/// every basis a reproducible canonical order; `text` is for display only.
struct BasisLabel {
  std::vector<std::int64_t> parts;
  std::string text;

  auto operator<=>(const BasisLabel& o) const { return parts <=> o.parts; }
  bool operator==(const BasisLabel& o) const { return parts == o.parts; }
};

/// Sparse vector: strictly increasing indices, no stored zeros.
using SparseVector = std::vector<std::pair<int, Rational>>;

/// Column-major sparse matrix over Q. Column j is the image of source basis
/// vector j, so a differential C^k -> C^{k+1} has dim C^{k+1} rows.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(int rows, int cols);

  static SparseMatrix identity(int n);
  static SparseMatrix from_dense(const std::vector<std::vector<Rational>>& rows);

  int rows() const { return rows_; }
  int cols() const { return static_cast<int>(cols_.size()); }
  const SparseVector& column(int j) const { return cols_[static_cast<std::size_t>(j)]; }

  /// Replaces column j; drops zero entries and sorts.
  void set_column(int j, SparseVector v);
  void add(int row, int col, const Rational& value);
  Rational at(int row, int col) const;

  bool is_zero() const;
  std::size_t nonzeros() const;

  SparseMatrix transpose() const;
  SparseMatrix operator*(const SparseMatrix& rhs) const;
  SparseMatrix operator+(const SparseMatrix& rhs) const;
  SparseMatrix operator-() const;
  bool operator==(const SparseMatrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

  /// Applies the matrix to a sparse vector of length cols().
  SparseVector apply(const SparseVector& v) const;

  /// [this | rhs]; row counts must agree.
  SparseMatrix hconcat(const SparseMatrix& rhs) const;
  /// Keeps the given columns, in order.
  SparseMatrix select_columns(const std::vector<int>& cols) const;
  /// Matrix whose columns are the given vectors.
  static SparseMatrix from_columns(int rows, const std::vector<SparseVector>& cols);

  std::vector<std::vector<Rational>> to_dense() const;

 private:
  int rows_ = 0;
  std::vector<SparseVector> cols_;
};

/// Scales a vector to integer entries and divides out the content.
std::vector<std::pair<int, Integer>> primitive_integer_vector(const SparseVector& v);

}  // namespace aksz::gla
