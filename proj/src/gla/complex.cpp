#include "aksz/gla/complex.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "aksz/errors.hpp"
#include "aksz/gla/rank.hpp"

namespace aksz::gla {

// ---------------------------------------------------------------- GradedSpace

void GradedSpace::set_basis(int degree, std::vector<BasisLabel> labels) {
  std::sort(labels.begin(), labels.end());
  if (std::adjacent_find(labels.begin(), labels.end()) != labels.end())
    throw StructuralError("duplicate basis label in degree " + std::to_string(degree));
  basis_[degree] = std::move(labels);
}

void GradedSpace::set_dim(int degree, int dim) {
  if (dim < 0) throw StructuralError("negative dimension");
  std::vector<BasisLabel> labels;
  labels.reserve(static_cast<std::size_t>(dim));
  for (int i = 0; i < dim; ++i) labels.push_back(BasisLabel{{i}, "e" + std::to_string(i)});
  basis_[degree] = std::move(labels);
}

int GradedSpace::dim(int degree) const {
  auto it = basis_.find(degree);
  return it == basis_.end() ? 0 : static_cast<int>(it->second.size());
}

const std::vector<BasisLabel>& GradedSpace::basis(int degree) const {
  static const std::vector<BasisLabel> empty;
  auto it = basis_.find(degree);
  return it == basis_.end() ? empty : it->second;
}

int GradedSpace::index_of(int degree, const BasisLabel& label) const {
  const auto& b = basis(degree);
  auto it = std::lower_bound(b.begin(), b.end(), label);
  if (it == b.end() || !(*it == label)) return -1;
  return static_cast<int>(it - b.begin());
}

std::vector<int> GradedSpace::degrees() const {
  std::vector<int> out;
  for (const auto& [k, v] : basis_) out.push_back(k);
  return out;
}

GradedDims GradedSpace::dims() const {
  GradedDims out;
  for (const auto& [k, v] : basis_) out[k] = static_cast<std::int64_t>(v.size());
  return out;
}

// ----------------------------------------------------------- CohomologyReport

std::int64_t CohomologyReport::dim(int degree) const {
  auto it = degrees.find(degree);
  return it == degrees.end() ? 0 : it->second.dim;
}

bool CohomologyReport::stable(int degree) const {
  auto it = degrees.find(degree);
  return it == degrees.end() || it->second.stability == Stability::Stable;
}

GradedDims CohomologyReport::dims() const {
  GradedDims out;
  for (const auto& [k, e] : degrees) out[k] = e.dim;
  return out;
}

std::int64_t CohomologyReport::total_dim() const {
  std::int64_t t = 0;
  for (const auto& [k, e] : degrees) t += e.dim;
  return t;
}

// ----------------------------------------------------------- TruncatedComplex

TruncatedComplex::TruncatedComplex(GradedSpace spaces, std::map<int, SparseMatrix> differentials,
                                   std::set<int> edge_degrees, std::set<int> unchecked)
    : spaces_(std::move(spaces)), d_(std::move(differentials)), edges_(std::move(edge_degrees)),
      unchecked_(std::move(unchecked)) {
  std::vector<int> ks = spaces_.degrees();
  for (const auto& [k, m] : d_) {
    ks.push_back(k);
    ks.push_back(k + 1);
  }
  if (!ks.empty()) {
    lo_ = *std::min_element(ks.begin(), ks.end());
    hi_ = *std::max_element(ks.begin(), ks.end());
  }
  validate();
}

SparseMatrix TruncatedComplex::d(int k) const {
  auto it = d_.find(k);
  if (it != d_.end()) return it->second;
  return SparseMatrix(dim(k + 1), dim(k));
}

void TruncatedComplex::validate() const {
  for (const auto& [k, m] : d_) {
    if (m.cols() != dim(k) || m.rows() != dim(k + 1)) {
      std::ostringstream os;
      os << "differential d^" << k << " has shape " << m.rows() << "x" << m.cols() << ", expected "
         << dim(k + 1) << "x" << dim(k);
      throw StructuralError(os.str());
    }
  }
  for (const auto& [k, m] : d_) {
    if (unchecked_.count(k)) continue;
    auto next = d_.find(k + 1);
    if (next == d_.end()) continue;
    if (!(next->second * m).is_zero())
      throw IntegrityError("d^" + std::to_string(k + 1) + " d^" + std::to_string(k) + " != 0 at degree " +
                           std::to_string(k));
  }
}

namespace {

std::vector<int> window(const TruncatedComplex& c) {
  std::vector<int> ks;
  for (int k = c.lo(); k <= c.hi(); ++k) ks.push_back(k);
  return ks;
}

}  // namespace

CohomologyReport cohomology(const TruncatedComplex& c, bool with_representatives) {
  const std::vector<int> ks = window(c);
  // rank of d^{k}, k in [lo-1, hi]
  std::vector<int> ranks(ks.size() + 1, 0);
#pragma omp parallel for schedule(dynamic)
  for (int idx = 0; idx < static_cast<int>(ks.size()); ++idx) {
    ranks[static_cast<std::size_t>(idx) + 1] = rank(c.d(ks[static_cast<std::size_t>(idx)]));
  }

  CohomologyReport rep;
  std::vector<CohomologyEntry> entries(ks.size());
#pragma omp parallel for schedule(dynamic)
  for (int idx = 0; idx < static_cast<int>(ks.size()); ++idx) {
    const int k = ks[static_cast<std::size_t>(idx)];
    CohomologyEntry e;
    e.dim = c.dim(k) - ranks[static_cast<std::size_t>(idx) + 1] - ranks[static_cast<std::size_t>(idx)];
    e.stability = c.is_edge(k) ? Stability::EdgeAffected : Stability::Stable;
    if (with_representatives && e.dim > 0) {
      Echelon span;
      SparseMatrix in = c.d(k - 1);
      for (int j = 0; j < in.cols(); ++j)
        if (!in.column(j).empty()) span.insert(in.column(j));
      for (auto& z : kernel_basis(c.d(k)))
        if (span.insert(z)) e.representatives.push_back(std::move(z));
      if (static_cast<std::int64_t>(e.representatives.size()) != e.dim)
        throw IntegrityError("representative count disagrees with rank count at degree " + std::to_string(k));
    }
    entries[static_cast<std::size_t>(idx)] = std::move(e);
  }
  for (std::size_t i = 0; i < ks.size(); ++i) rep.degrees[ks[i]] = std::move(entries[i]);
  return rep;
}

CohomologyReport cohomology_serial(const TruncatedComplex& c) {
  CohomologyReport rep;
  int prev_rank = 0;
  for (int k : window(c)) {
    int r = rank_reference(c.d(k));
    CohomologyEntry e;
    e.dim = c.dim(k) - r - prev_rank;
    e.stability = c.is_edge(k) ? Stability::EdgeAffected : Stability::Stable;
    rep.degrees[k] = std::move(e);
    prev_rank = r;
  }
  return rep;
}

// -------------------------------------------------------------------- Bicomplex

Bicomplex::Bicomplex(int p_lo, int p_hi, int q_lo, int q_hi) : p_lo_(p_lo), p_hi_(p_hi), q_lo_(q_lo), q_hi_(q_hi) {
  if (p_hi < p_lo - 1 || q_hi < q_lo - 1) throw StructuralError("bicomplex window is inverted");
}

void Bicomplex::set_dim(int p, int q, int dim) {
  if (!inside(p, q)) throw StructuralError("bidegree outside bicomplex window");
  dims_[{p, q}] = dim;
}

int Bicomplex::dim(int p, int q) const {
  auto it = dims_.find({p, q});
  return it == dims_.end() ? 0 : it->second;
}

void Bicomplex::set_d1(int p, int q, SparseMatrix m) {
  if (!inside(p, q)) throw StructuralError("d1 source outside bicomplex window");
  d1_[{p, q}] = std::move(m);
}

void Bicomplex::set_d2(int p, int q, SparseMatrix m) {
  if (!inside(p, q)) throw StructuralError("d2 source outside bicomplex window");
  d2_[{p, q}] = std::move(m);
}

SparseMatrix Bicomplex::d1(int p, int q) const {
  auto it = d1_.find({p, q});
  if (it != d1_.end()) return it->second;
  return SparseMatrix(dim(p + 1, q), dim(p, q));
}

SparseMatrix Bicomplex::d2(int p, int q) const {
  auto it = d2_.find({p, q});
  if (it != d2_.end()) return it->second;
  return SparseMatrix(dim(p, q + 1), dim(p, q));
}

void Bicomplex::validate() const {
  auto where = [](const char* what, int p, int q) {
    return std::string(what) + " at bidegree (" + std::to_string(p) + "," + std::to_string(q) + ")";
  };
  for (const auto& [pq, m] : d1_)
    if (m.cols() != dim(pq.first, pq.second) || m.rows() != dim(pq.first + 1, pq.second))
      throw StructuralError(where("d1 has wrong shape", pq.first, pq.second));
  for (const auto& [pq, m] : d2_)
    if (m.cols() != dim(pq.first, pq.second) || m.rows() != dim(pq.first, pq.second + 1))
      throw StructuralError(where("d2 has wrong shape", pq.first, pq.second));
  for (int p = p_lo_; p <= p_hi_; ++p) {
    for (int q = q_lo_; q <= q_hi_; ++q) {
      if (dim(p, q) == 0) continue;
      if (!(d1(p + 1, q) * d1(p, q)).is_zero()) throw IntegrityError(where("d1^2 != 0", p, q));
      if (!(d2(p, q + 1) * d2(p, q)).is_zero()) throw IntegrityError(where("d2^2 != 0", p, q));
      if (!(d1(p, q + 1) * d2(p, q) + d2(p + 1, q) * d1(p, q)).is_zero())
        throw IntegrityError(where("d1 d2 + d2 d1 != 0", p, q));
    }
  }
}

TruncatedComplex Bicomplex::column(int p) const {
  GradedSpace s;
  std::map<int, SparseMatrix> d;
  for (int q = q_lo_; q <= q_hi_; ++q) {
    s.set_dim(q, dim(p, q));
    if (q < q_hi_) d[q] = d2(p, q);
  }
  return TruncatedComplex(std::move(s), std::move(d));
}

TruncatedComplex Bicomplex::row(int q) const {
  GradedSpace s;
  std::map<int, SparseMatrix> d;
  for (int p = p_lo_; p <= p_hi_; ++p) {
    s.set_dim(p, dim(p, q));
    if (p < p_hi_) d[p] = d1(p, q);
  }
  return TruncatedComplex(std::move(s), std::move(d));
}

TruncatedComplex total_complex(const Bicomplex& b) {
  if (b.p_hi() < b.p_lo() || b.q_hi() < b.q_lo()) return TruncatedComplex{};
  const long span = static_cast<long>(b.p_hi() - b.p_lo()) + (b.q_hi() - b.q_lo());
  if (span > 100000) throw StructuralError("bicomplex window too large to assemble a total complex");
  b.validate();
  const int m_lo = b.p_lo() + b.q_lo();
  const int m_hi = b.p_hi() + b.q_hi();

  // offset of block (p, m-p) inside Tot^m
  std::map<std::pair<int, int>, int> offset;
  GradedSpace s;
  for (int m = m_lo; m <= m_hi; ++m) {
    int off = 0;
    std::vector<BasisLabel> labels;
    for (int p = b.p_lo(); p <= b.p_hi(); ++p) {
      int q = m - p;
      if (q < b.q_lo() || q > b.q_hi()) continue;
      offset[{p, q}] = off;
      for (int i = 0; i < b.dim(p, q); ++i)
        labels.push_back(BasisLabel{{p, q, i}, "(" + std::to_string(p) + "," + std::to_string(q) + ")#" + std::to_string(i)});
      off += b.dim(p, q);
    }
    s.set_basis(m, std::move(labels));
  }
  std::map<int, SparseMatrix> d;
  for (int m = m_lo; m < m_hi; ++m) {
    SparseMatrix D(s.dim(m + 1), s.dim(m));
    for (int p = b.p_lo(); p <= b.p_hi(); ++p) {
      int q = m - p;
      if (q < b.q_lo() || q > b.q_hi() || b.dim(p, q) == 0) continue;
      int src = offset[{p, q}];
      SparseMatrix a = b.d1(p, q);
      SparseMatrix c = b.d2(p, q);
      for (int j = 0; j < b.dim(p, q); ++j) {
        SparseVector col;
        if (p + 1 <= b.p_hi())
          for (const auto& [i, v] : a.column(j)) col.emplace_back(offset[{p + 1, q}] + i, v);
        if (q + 1 <= b.q_hi())
          for (const auto& [i, v] : c.column(j)) col.emplace_back(offset[{p, q + 1}] + i, v);
        D.set_column(src + j, std::move(col));
      }
    }
    d[m] = std::move(D);
  }
  return TruncatedComplex(std::move(s), std::move(d));
}

// ------------------------------------------------------------ spectral pages

namespace {

struct PageInput {
  int a_lo, a_hi, b_lo, b_hi;
  std::function<int(int, int)> dim;
  std::function<SparseMatrix(int, int)> inner;  // (a,b) -> (a,b+1)
  std::function<SparseMatrix(int, int)> outer;  // (a,b) -> (a+1,b)
};

void compute_pages(const PageInput& in, std::map<std::pair<int, int>, std::int64_t>& e1,
                   std::map<std::pair<int, int>, std::int64_t>& e2) {
  std::map<std::pair<int, int>, SparseMatrix> Z;  // cycle bases as matrix columns
  std::map<std::pair<int, int>, SparseMatrix> B;  // boundary spanning sets
  for (int a = in.a_lo; a <= in.a_hi; ++a) {
    for (int b = in.b_lo; b <= in.b_hi; ++b) {
      int n = in.dim(a, b);
      Z[{a, b}] = SparseMatrix::from_columns(n, kernel_basis(in.inner(a, b)));
      B[{a, b}] = in.inner(a, b - 1);
    }
  }
  auto z_of = [&](int a, int b) {
    auto it = Z.find({a, b});
    return it == Z.end() ? SparseMatrix(in.dim(a, b), 0) : it->second;
  };
  auto b_of = [&](int a, int b) {
    auto it = B.find({a, b});
    return it == B.end() ? SparseMatrix(in.dim(a, b), 0) : it->second;
  };
  for (int a = in.a_lo; a <= in.a_hi; ++a) {
    for (int b = in.b_lo; b <= in.b_hi; ++b) {
      SparseMatrix z = z_of(a, b);
      SparseMatrix bd = b_of(a, b);
      int rank_b = rank(bd);
      e1[{a, b}] = z.cols() - rank_b;

      SparseMatrix bnext = b_of(a + 1, b);
      SparseMatrix image_z = in.outer(a, b) * z;
      int kernel = z.cols() - (rank(image_z.hconcat(bnext)) - rank(bnext));
      SparseMatrix zprev = z_of(a - 1, b);
      SparseMatrix incoming = in.outer(a - 1, b) * zprev;
      int denominator = rank(bd.hconcat(incoming));
      e2[{a, b}] = kernel - denominator;
    }
  }
}

}  // namespace

GradedDims PageReport::e2_total() const {
  GradedDims out;
  for (const auto& [pq, d] : e2) out[pq.first + pq.second] += d;
  return trim(out);
}

PageReport spectral_pages(const Bicomplex& b, Filtration f) {
  b.validate();
  PageReport rep;
  rep.filtration = f;
  std::map<std::pair<int, int>, std::int64_t> e1, e2;
  if (f == Filtration::First) {
    PageInput in{b.p_lo(), b.p_hi(), b.q_lo(), b.q_hi(),
                 [&](int p, int q) { return b.dim(p, q); },
                 [&](int p, int q) { return b.d2(p, q); },
                 [&](int p, int q) { return b.d1(p, q); }};
    compute_pages(in, rep.e1, rep.e2);
  } else {
    PageInput in{b.q_lo(), b.q_hi(), b.p_lo(), b.p_hi(),
                 [&](int q, int p) { return b.dim(p, q); },
                 [&](int q, int p) { return b.d1(p, q); },
                 [&](int q, int p) { return b.d2(p, q); }};
    compute_pages(in, e1, e2);
    for (const auto& [k, v] : e1) rep.e1[{k.second, k.first}] = v;
    for (const auto& [k, v] : e2) rep.e2[{k.second, k.first}] = v;
  }
  return rep;
}

// ------------------------------------------------------- two filtrations

TwoFiltrationVerdict two_filtration_check(const Bicomplex& b) {
  b.validate();
  for (int p = b.p_lo(); p <= b.p_hi(); ++p) {
    auto h = cohomology(b.column(p), false);
    for (int q = b.q_lo() + 1; q <= b.q_hi(); ++q)
      if (h.dim(q) != 0)
        throw HypothesisError("column p=" + std::to_string(p) + " (d2) is not exact at q=" + std::to_string(q));
  }
  for (int q = b.q_lo(); q <= b.q_hi(); ++q) {
    auto h = cohomology(b.row(q), false);
    for (int p = b.p_lo() + 1; p <= b.p_hi(); ++p)
      if (h.dim(p) != 0)
        throw HypothesisError("row q=" + std::to_string(q) + " (d1) is not exact at p=" + std::to_string(p));
  }

  TwoFiltrationVerdict v;
  {
    const int q = b.q_lo();
    std::map<int, SparseMatrix> z;
    for (int p = b.p_lo(); p <= b.p_hi(); ++p)
      z[p] = SparseMatrix::from_columns(b.dim(p, q), kernel_basis(b.d2(p, q)));
    int prev = 0;
    for (int p = b.p_lo(); p <= b.p_hi(); ++p) {
      int r = rank(b.d1(p, q) * z[p]);
      v.q1[p + q] = z[p].cols() - r - prev;
      prev = r;
    }
  }
  {
    const int p = b.p_lo();
    std::map<int, SparseMatrix> z;
    for (int q = b.q_lo(); q <= b.q_hi(); ++q)
      z[q] = SparseMatrix::from_columns(b.dim(p, q), kernel_basis(b.d1(p, q)));
    int prev = 0;
    for (int q = b.q_lo(); q <= b.q_hi(); ++q) {
      int r = rank(b.d2(p, q) * z[q]);
      v.q2[p + q] = z[q].cols() - r - prev;
      prev = r;
    }
  }
  v.total = trim(cohomology(total_complex(b), false).dims());
  v.q1 = trim(v.q1);
  v.q2 = trim(v.q2);
  v.equal = v.q1 == v.q2;
  return v;
}

// ---------------------------------------------------------------- Künneth

GradedDims kunneth(const GradedDims& a, const GradedDims& b) {
  GradedDims out;
  for (const auto& [i, x] : a) {
    if (x < 0) throw StructuralError("negative dimension in Kunneth input");
    for (const auto& [j, y] : b) {
      if (y < 0) throw StructuralError("negative dimension in Kunneth input");
      out[i + j] += x * y;
    }
  }
  return trim(out);
}

TruncatedComplex tensor_complex(const TruncatedComplex& a, const TruncatedComplex& b) {
  if (a.hi() < a.lo() || b.hi() < b.lo()) return TruncatedComplex{};
  const int m_lo = a.lo() + b.lo();
  const int m_hi = a.hi() + b.hi();
  std::map<std::pair<int, int>, int> offset;  // (i, m) -> offset of A^i ⊗ B^{m-i}
  GradedSpace s;
  std::set<int> edges;
  for (int m = m_lo; m <= m_hi; ++m) {
    int off = 0;
    std::vector<BasisLabel> labels;
    for (int i = a.lo(); i <= a.hi(); ++i) {
      int j = m - i;
      if (j < b.lo() || j > b.hi()) continue;
      offset[{i, m}] = off;
      for (int x = 0; x < a.dim(i); ++x)
        for (int y = 0; y < b.dim(j); ++y) labels.push_back(BasisLabel{{i, x, y}, ""});
      off += a.dim(i) * b.dim(j);
      if (a.is_edge(i) || b.is_edge(j)) edges.insert(m);
    }
    s.set_basis(m, std::move(labels));
  }
  std::map<int, SparseMatrix> d;
  for (int m = m_lo; m < m_hi; ++m) {
    SparseMatrix D(s.dim(m + 1), s.dim(m));
    for (int i = a.lo(); i <= a.hi(); ++i) {
      int j = m - i;
      if (j < b.lo() || j > b.hi()) continue;
      SparseMatrix da = a.d(i);
      SparseMatrix db = b.d(j);
      const int nb = b.dim(j);
      const Rational sign = (i % 2 == 0) ? 1 : -1;
      for (int x = 0; x < a.dim(i); ++x) {
        for (int y = 0; y < nb; ++y) {
          SparseVector col;
          if (i + 1 <= a.hi()) {
            int base = offset[{i + 1, m + 1}];
            for (const auto& [r, v] : da.column(x)) col.emplace_back(base + r * nb + y, v);
          }
          if (j + 1 <= b.hi()) {
            int base = offset[{i, m + 1}];
            int nb1 = b.dim(j + 1);
            for (const auto& [r, v] : db.column(y)) col.emplace_back(base + x * nb1 + r, sign * v);
          }
          D.set_column(offset[{i, m}] + x * nb + y, std::move(col));
        }
      }
    }
    d[m] = std::move(D);
  }
  return TruncatedComplex(std::move(s), std::move(d), std::move(edges));
}

GradedDims trim(const GradedDims& d) {
  GradedDims out;
  for (const auto& [k, v] : d)
    if (v != 0) out[k] = v;
  return out;
}

}  // namespace aksz::gla
