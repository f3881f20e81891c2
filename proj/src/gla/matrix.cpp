#include "aksz/gla/matrix.hpp"

#include <algorithm>
#include <map>

#include "aksz/errors.hpp"

namespace aksz::gla {

namespace {

void canonicalize(SparseVector& v) {
  std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  SparseVector out;
  out.reserve(v.size());
  for (auto& [i, c] : v) {
    if (!out.empty() && out.back().first == i) {
      out.back().second += c;
      if (is_zero(out.back().second)) out.pop_back();
    } else if (!is_zero(c)) {
      out.emplace_back(i, std::move(c));
    }
  }
  v = std::move(out);
}

}  // namespace

SparseMatrix::SparseMatrix(int rows, int cols) : rows_(rows), cols_(static_cast<std::size_t>(cols)) {
  if (rows < 0 || cols < 0) throw StructuralError("negative matrix dimension");
}

SparseMatrix SparseMatrix::identity(int n) {
  SparseMatrix m(n, n);
  for (int i = 0; i < n; ++i) m.cols_[static_cast<std::size_t>(i)].emplace_back(i, Rational(1));
  return m;
}

SparseMatrix SparseMatrix::from_dense(const std::vector<std::vector<Rational>>& rows) {
  int r = static_cast<int>(rows.size());
  int c = r == 0 ? 0 : static_cast<int>(rows.front().size());
  SparseMatrix m(r, c);
  for (int i = 0; i < r; ++i) {
    if (static_cast<int>(rows[static_cast<std::size_t>(i)].size()) != c) throw StructuralError("ragged dense matrix");
    for (int j = 0; j < c; ++j) {
      const Rational& v = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      if (!aksz::is_zero(v)) m.cols_[static_cast<std::size_t>(j)].emplace_back(i, v);
    }
  }
  return m;
}

void SparseMatrix::set_column(int j, SparseVector v) {
  canonicalize(v);
  if (!v.empty() && (v.front().first < 0 || v.back().first >= rows_))
    throw StructuralError("column entry outside matrix rows");
  cols_.at(static_cast<std::size_t>(j)) = std::move(v);
}

void SparseMatrix::add(int row, int col, const Rational& value) {
  if (row < 0 || row >= rows_ || col < 0 || col >= cols()) throw StructuralError("matrix index out of range");
  auto& c = cols_[static_cast<std::size_t>(col)];
  auto it = std::lower_bound(c.begin(), c.end(), row, [](const auto& e, int r) { return e.first < r; });
  if (it != c.end() && it->first == row) {
    it->second += value;
    if (aksz::is_zero(it->second)) c.erase(it);
  } else if (!aksz::is_zero(value)) {
    c.insert(it, {row, value});
  }
}

Rational SparseMatrix::at(int row, int col) const {
  const auto& c = cols_.at(static_cast<std::size_t>(col));
  auto it = std::lower_bound(c.begin(), c.end(), row, [](const auto& e, int r) { return e.first < r; });
  if (it != c.end() && it->first == row) return it->second;
  return 0;
}

bool SparseMatrix::is_zero() const {
  return std::all_of(cols_.begin(), cols_.end(), [](const auto& c) { return c.empty(); });
}

std::size_t SparseMatrix::nonzeros() const {
  std::size_t n = 0;
  for (const auto& c : cols_) n += c.size();
  return n;
}

SparseMatrix SparseMatrix::transpose() const {
  SparseMatrix t(cols(), rows_);
  for (int j = 0; j < cols(); ++j)
    for (const auto& [i, v] : cols_[static_cast<std::size_t>(j)]) t.cols_[static_cast<std::size_t>(i)].emplace_back(j, v);
  return t;
}

SparseVector SparseMatrix::apply(const SparseVector& v) const {
  std::map<int, Rational> acc;
  for (const auto& [j, x] : v) {
    if (j < 0 || j >= cols()) throw StructuralError("vector index outside matrix columns");
    for (const auto& [i, a] : cols_[static_cast<std::size_t>(j)]) acc[i] += a * x;
  }
  SparseVector out;
  for (auto& [i, c] : acc)
    if (!aksz::is_zero(c)) out.emplace_back(i, std::move(c));
  return out;
}

SparseMatrix SparseMatrix::operator*(const SparseMatrix& rhs) const {
  if (cols() != rhs.rows()) throw StructuralError("matrix product dimension mismatch");
  SparseMatrix out(rows_, rhs.cols());
  for (int j = 0; j < rhs.cols(); ++j) out.cols_[static_cast<std::size_t>(j)] = apply(rhs.column(j));
  return out;
}

SparseMatrix SparseMatrix::operator+(const SparseMatrix& rhs) const {
  if (rows_ != rhs.rows_ || cols() != rhs.cols()) throw StructuralError("matrix sum dimension mismatch");
  SparseMatrix out(rows_, cols());
  for (int j = 0; j < cols(); ++j) {
    SparseVector v = cols_[static_cast<std::size_t>(j)];
    v.insert(v.end(), rhs.cols_[static_cast<std::size_t>(j)].begin(), rhs.cols_[static_cast<std::size_t>(j)].end());
    canonicalize(v);
    out.cols_[static_cast<std::size_t>(j)] = std::move(v);
  }
  return out;
}

SparseMatrix SparseMatrix::operator-() const {
  SparseMatrix out = *this;
  for (auto& c : out.cols_)
    for (auto& e : c) e.second = -e.second;
  return out;
}

SparseMatrix SparseMatrix::hconcat(const SparseMatrix& rhs) const {
  if (rows_ != rhs.rows_) throw StructuralError("hconcat row mismatch");
  SparseMatrix out = *this;
  out.cols_.insert(out.cols_.end(), rhs.cols_.begin(), rhs.cols_.end());
  return out;
}

SparseMatrix SparseMatrix::select_columns(const std::vector<int>& cols) const {
  SparseMatrix out(rows_, static_cast<int>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) out.cols_[k] = cols_.at(static_cast<std::size_t>(cols[k]));
  return out;
}

SparseMatrix SparseMatrix::from_columns(int rows, const std::vector<SparseVector>& cols) {
  SparseMatrix out(rows, static_cast<int>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) out.set_column(static_cast<int>(k), cols[k]);
  return out;
}

std::vector<std::vector<Rational>> SparseMatrix::to_dense() const {
  std::vector<std::vector<Rational>> d(static_cast<std::size_t>(rows_), std::vector<Rational>(cols_.size(), Rational(0)));
  for (std::size_t j = 0; j < cols_.size(); ++j)
    for (const auto& [i, v] : cols_[j]) d[static_cast<std::size_t>(i)][j] = v;
  return d;
}

std::vector<std::pair<int, Integer>> primitive_integer_vector(const SparseVector& v) {
  Integer lcm = 1;
  for (const auto& [i, c] : v) mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), c.get_den_mpz_t());
  std::vector<std::pair<int, Integer>> out;
  out.reserve(v.size());
  Integer g = 0;
  for (const auto& [i, c] : v) {
    Integer n = c.get_num() * (lcm / c.get_den());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), n.get_mpz_t());
    out.emplace_back(i, std::move(n));
  }
  if (g > 1)
    for (auto& e : out) mpz_divexact(e.second.get_mpz_t(), e.second.get_mpz_t(), g.get_mpz_t());
  return out;
}

}  // namespace aksz::gla
