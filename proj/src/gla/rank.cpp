#include "aksz/gla/rank.hpp"

#include <algorithm>
#include <utility>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace aksz::gla {

namespace {

using IntRow = Echelon::IntRow;

std::size_t bits(const IntRow& r) {
  std::size_t b = 0;
  for (const auto& [i, v] : r) b += mpz_sizeinbase(v.get_mpz_t(), 2);
  return b;
}

void make_primitive(IntRow& r) {
  if (r.empty()) return;
  Integer g = 0;
  for (const auto& [i, v] : r) {
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
    if (g == 1) break;
  }
  if (r.front().second < 0) g = -g;
  if (g != 1)
    for (auto& e : r) mpz_divexact(e.second.get_mpz_t(), e.second.get_mpz_t(), g.get_mpz_t());
}

// a*x - b*y, both sorted by index
IntRow combine(const Integer& a, const IntRow& x, const Integer& b, const IntRow& y) {
  IntRow out;
  out.reserve(x.size() + y.size());
  std::size_t i = 0, j = 0;
  while (i < x.size() || j < y.size()) {
    if (j == y.size() || (i < x.size() && x[i].first < y[j].first)) {
      out.emplace_back(x[i].first, a * x[i].second);
      ++i;
    } else if (i == x.size() || y[j].first < x[i].first) {
      out.emplace_back(y[j].first, -b * y[j].second);
      ++j;
    } else {
      Integer v = a * x[i].second - b * y[j].second;
      if (v != 0) out.emplace_back(x[i].first, std::move(v));
      ++i;
      ++j;
    }
  }
  return out;
}

}  // namespace

IntRow Echelon::reduce(IntRow row) {
  while (!row.empty()) {
    auto it = pivots_.find(row.front().first);
    if (it == pivots_.end()) return row;
    if (bits(row) < bits(it->second)) std::swap(row, it->second);
    const IntRow& piv = it->second;
    Integer g;
    mpz_gcd(g.get_mpz_t(), row.front().second.get_mpz_t(), piv.front().second.get_mpz_t());
    Integer a = piv.front().second / g;
    Integer b = row.front().second / g;
    row = combine(a, row, b, piv);
    make_primitive(row);
  }
  return row;
}

bool Echelon::insert(const SparseVector& v) {
  IntRow row = primitive_integer_vector(v);
  make_primitive(row);
  row = reduce(std::move(row));
  if (row.empty()) return false;
  int lead = row.front().first;
  pivots_.emplace(lead, std::move(row));
  return true;
}

bool Echelon::contains(const SparseVector& v) const {
  IntRow row = primitive_integer_vector(v);
  while (!row.empty()) {
    auto it = pivots_.find(row.front().first);
    if (it == pivots_.end()) return false;
    const IntRow& piv = it->second;
    Integer g;
    mpz_gcd(g.get_mpz_t(), row.front().second.get_mpz_t(), piv.front().second.get_mpz_t());
    row = combine(piv.front().second / g, row, row.front().second / g, piv);
    make_primitive(row);
  }
  return true;
}

int rank(const SparseMatrix& m) {
  // eliminate along the shorter side
  const SparseMatrix& src = m;
  if (m.rows() < m.cols()) {
    SparseMatrix t = m.transpose();
    Echelon e;
    for (int j = 0; j < t.cols(); ++j)
      if (!t.column(j).empty()) e.insert(t.column(j));
    return e.rank();
  }
  Echelon e;
  for (int j = 0; j < src.cols(); ++j)
    if (!src.column(j).empty()) e.insert(src.column(j));
  return e.rank();
}

int rank_reference(const SparseMatrix& m) {
  auto a = m.to_dense();
  const int rows = m.rows();
  const int cols = m.cols();
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int piv = -1;
    for (int i = r; i < rows; ++i)
      if (!is_zero(a[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)])) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    std::swap(a[static_cast<std::size_t>(piv)], a[static_cast<std::size_t>(r)]);
    auto& prow = a[static_cast<std::size_t>(r)];
    for (int i = 0; i < rows; ++i) {
      if (i == r) continue;
      auto& row = a[static_cast<std::size_t>(i)];
      if (is_zero(row[static_cast<std::size_t>(c)])) continue;
      Rational f = row[static_cast<std::size_t>(c)] / prow[static_cast<std::size_t>(c)];
      for (int k = c; k < cols; ++k) row[static_cast<std::size_t>(k)] -= f * prow[static_cast<std::size_t>(k)];
    }
    ++r;
  }
  return r;
}

int rank_parallel(const SparseMatrix& m) {
  // Bareiss on the integer-scaled row form; rows of the working array are the
  // columns of m (rank is transpose invariant).
  const int n_rows = m.cols();
  const int n_cols = m.rows();
  std::vector<std::vector<Integer>> a(static_cast<std::size_t>(n_rows), std::vector<Integer>(static_cast<std::size_t>(n_cols), Integer(0)));
  for (int j = 0; j < n_rows; ++j)
    for (auto& [i, v] : primitive_integer_vector(m.column(j))) a[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = v;

  Integer prev = 1;
  int r = 0;
  for (int c = 0; c < n_cols && r < n_rows; ++c) {
    int piv = -1;
    std::size_t best = 0;
    for (int i = r; i < n_rows; ++i) {
      const Integer& v = a[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
      if (v == 0) continue;
      std::size_t b = mpz_sizeinbase(v.get_mpz_t(), 2);
      if (piv < 0 || b < best) {
        piv = i;
        best = b;
      }
    }
    if (piv < 0) continue;
    std::swap(a[static_cast<std::size_t>(piv)], a[static_cast<std::size_t>(r)]);
    const auto& prow = a[static_cast<std::size_t>(r)];
    const Integer p = prow[static_cast<std::size_t>(c)];
#pragma omp parallel for schedule(static)
    for (int i = r + 1; i < n_rows; ++i) {
      auto& row = a[static_cast<std::size_t>(i)];
      const Integer f = row[static_cast<std::size_t>(c)];
      for (int k = c; k < n_cols; ++k) {
        Integer v = p * row[static_cast<std::size_t>(k)] - f * prow[static_cast<std::size_t>(k)];
        mpz_divexact(row[static_cast<std::size_t>(k)].get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
      }
    }
    prev = p;
    ++r;
  }
  return r;
}

std::vector<SparseVector> kernel_basis(const SparseMatrix& m) {
  auto a = m.to_dense();
  const int rows = m.rows();
  const int cols = m.cols();
  std::vector<int> pivot_col;
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int piv = -1;
    std::size_t best = 0;
    for (int i = r; i < rows; ++i) {
      const Rational& v = a[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
      if (is_zero(v)) continue;
      std::size_t b = bit_size(v);
      if (piv < 0 || b < best) {
        piv = i;
        best = b;
      }
    }
    if (piv < 0) continue;
    std::swap(a[static_cast<std::size_t>(piv)], a[static_cast<std::size_t>(r)]);
    auto& prow = a[static_cast<std::size_t>(r)];
    Rational inv = 1 / prow[static_cast<std::size_t>(c)];
    for (int k = c; k < cols; ++k) prow[static_cast<std::size_t>(k)] *= inv;
    for (int i = 0; i < rows; ++i) {
      if (i == r) continue;
      auto& row = a[static_cast<std::size_t>(i)];
      Rational f = row[static_cast<std::size_t>(c)];
      if (is_zero(f)) continue;
      for (int k = c; k < cols; ++k) row[static_cast<std::size_t>(k)] -= f * prow[static_cast<std::size_t>(k)];
    }
    pivot_col.push_back(c);
    ++r;
  }
  std::vector<bool> is_pivot(static_cast<std::size_t>(cols), false);
  for (int c : pivot_col) is_pivot[static_cast<std::size_t>(c)] = true;
  std::vector<SparseVector> basis;
  for (int f = 0; f < cols; ++f) {
    if (is_pivot[static_cast<std::size_t>(f)]) continue;
    SparseVector v;
    for (std::size_t k = 0; k < pivot_col.size(); ++k) {
      const Rational& coef = a[k][static_cast<std::size_t>(f)];
      if (!is_zero(coef)) v.emplace_back(pivot_col[k], -coef);
    }
    v.emplace_back(f, Rational(1));
    std::sort(v.begin(), v.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    basis.push_back(std::move(v));
  }
  return basis;
}

std::optional<SparseMatrix> inverse(const SparseMatrix& m) {
  const int n = m.rows();
  if (m.cols() != n) return std::nullopt;
  auto a = m.to_dense();
  auto inv = SparseMatrix::identity(n).to_dense();
  for (int c = 0; c < n; ++c) {
    int piv = -1;
    for (int i = c; i < n; ++i)
      if (!is_zero(a[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)])) {
        piv = i;
        break;
      }
    if (piv < 0) return std::nullopt;
    std::swap(a[static_cast<std::size_t>(piv)], a[static_cast<std::size_t>(c)]);
    std::swap(inv[static_cast<std::size_t>(piv)], inv[static_cast<std::size_t>(c)]);
    Rational f = 1 / a[static_cast<std::size_t>(c)][static_cast<std::size_t>(c)];
    for (int k = 0; k < n; ++k) {
      a[static_cast<std::size_t>(c)][static_cast<std::size_t>(k)] *= f;
      inv[static_cast<std::size_t>(c)][static_cast<std::size_t>(k)] *= f;
    }
    for (int i = 0; i < n; ++i) {
      if (i == c) continue;
      Rational g = a[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
      if (is_zero(g)) continue;
      for (int k = 0; k < n; ++k) {
        a[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] -= g * a[static_cast<std::size_t>(c)][static_cast<std::size_t>(k)];
        inv[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] -= g * inv[static_cast<std::size_t>(c)][static_cast<std::size_t>(k)];
      }
    }
  }
  return SparseMatrix::from_dense(inv);
}

}  // namespace aksz::gla
