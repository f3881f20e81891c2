#include "aksz/base.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "aksz/errors.hpp"
#include "aksz/gla/rank.hpp"

namespace aksz {

BaseModel BaseModel::flat(int n, int D) {
  BaseModel m;
  m.kind = BaseKind::FlatPoly;
  m.n = n;
  m.D = D;
  m.validate();
  return m;
}

BaseModel BaseModel::torus(int n, int N) {
  BaseModel m;
  m.kind = BaseKind::TorusFourier;
  m.n = n;
  m.N = N;
  m.validate();
  return m;
}

BaseModel BaseModel::from_complex(gla::TruncatedComplex c) {
  BaseModel m;
  m.kind = BaseKind::External;
  m.n = std::max(1, c.hi());
  m.external = std::move(c);
  m.external.validate();
  return m;
}

void BaseModel::validate() const {
  if (kind == BaseKind::External) return;
  if (n < 1 || n > kMaxBaseDim) throw StructuralError("base dimension must lie in 1.." + std::to_string(kMaxBaseDim));
  if (D < 0 || N < 0) throw StructuralError("base truncation must be nonnegative");
}

bool in_truncation(const BaseModel& m, const BaseExp& e) {
  int total = 0;
  for (int i = 0; i < kMaxBaseDim; ++i) {
    if (i >= m.n && e[static_cast<std::size_t>(i)] != 0) return false;
    if (m.kind == BaseKind::FlatPoly && e[static_cast<std::size_t>(i)] < 0) return false;
    if (m.kind == BaseKind::TorusFourier && std::abs(e[static_cast<std::size_t>(i)]) > m.N) return false;
    total += e[static_cast<std::size_t>(i)];
  }
  return m.kind != BaseKind::FlatPoly || total <= m.D;
}

std::vector<BaseExp> coefficient_basis(const BaseModel& m) {
  if (!m.has_coordinates()) throw StructuralError("external base models have no coefficient ring");
  std::vector<BaseExp> out;
  const int lo = m.kind == BaseKind::FlatPoly ? 0 : -m.N;
  const int hi = m.kind == BaseKind::FlatPoly ? m.D : m.N;
  BaseExp e{};
  auto rec = [&](auto&& self, int i) -> void {
    if (i == m.n) {
      if (in_truncation(m, e)) out.push_back(e);
      return;
    }
    for (int k = lo; k <= hi; ++k) {
      e[static_cast<std::size_t>(i)] = k;
      self(self, i + 1);
    }
    e[static_cast<std::size_t>(i)] = 0;
  };
  rec(rec, 0);
  std::sort(out.begin(), out.end());
  return out;
}

std::pair<Rational, BaseExp> base_derivative(const BaseModel& m, int i, const BaseExp& e) {
  BaseExp out = e;
  const int k = e[static_cast<std::size_t>(i)];
  if (k == 0) return {0, out};
  if (m.kind == BaseKind::FlatPoly) out[static_cast<std::size_t>(i)] = k - 1;
  return {Rational(k), out};
}

SuperPoly base_derivative_poly(const BaseModel& m, int i, const BaseExp& e) {
  auto [c, out] = base_derivative(m, i, e);
  return SuperPoly::monomial(Monomial{out, {}}, c);
}

void FlatConnection::validate(int n) const {
  if (static_cast<int>(A.size()) != n) throw StructuralError("flat connection needs one matrix per base direction");
  for (const auto& a : A)
    if (a.rows() != dim || a.cols() != dim) throw StructuralError("flat connection matrix has the wrong size");
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (!(A[static_cast<std::size_t>(i)] * A[static_cast<std::size_t>(j)] ==
            A[static_cast<std::size_t>(j)] * A[static_cast<std::size_t>(i)]))
        throw IntegrityError("flat connection matrices A_" + std::to_string(i + 1) + " and A_" + std::to_string(j + 1) +
                             " do not commute");
}

std::pair<int, std::vector<int>> wedge_front(int i, const std::vector<int>& J) {
  int before = 0;
  for (int j : J) {
    if (j == i) return {0, {}};
    if (j < i) ++before;
  }
  std::vector<int> out = J;
  out.insert(std::lower_bound(out.begin(), out.end(), i), i);
  return {before % 2 == 0 ? 1 : -1, out};
}

std::vector<std::vector<int>> subsets(int n, int p) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  auto rec = [&](auto&& self, int start) -> void {
    if (static_cast<int>(cur.size()) == p) {
      out.push_back(cur);
      return;
    }
    for (int i = start; i < n; ++i) {
      cur.push_back(i);
      self(self, i + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

namespace {

std::int64_t mask(const std::vector<int>& J) {
  std::int64_t m = 0;
  for (int j : J) m |= std::int64_t{1} << j;
  return m;
}

}  // namespace

gla::TruncatedComplex de_rham_complex(const BaseModel& m, const std::optional<FlatConnection>& twist,
                                      const std::optional<BaseExp>& mode) {
  m.validate();
  if (m.kind == BaseKind::External) {
    if (twist) throw StructuralError("twists are only defined on coordinate base models");
    return m.external;
  }
  if (twist) twist->validate(m.n);
  if (mode && m.kind != BaseKind::TorusFourier) throw StructuralError("mode restriction needs the torus model");
  const int r = twist ? twist->dim : 1;

  std::vector<BaseExp> coeffs;
  if (mode) {
    if (in_truncation(m, *mode)) coeffs.push_back(*mode);
  } else {
    coeffs = coefficient_basis(m);
  }

  auto label = [&](const std::vector<int>& J, const BaseExp& e, int c) {
    gla::BasisLabel b;
    b.parts.push_back(mask(J));
    for (int i = 0; i < m.n; ++i) b.parts.push_back(e[static_cast<std::size_t>(i)]);
    b.parts.push_back(c);
    return b;
  };

  gla::GradedSpace space;
  for (int p = 0; p <= m.n; ++p) {
    std::vector<gla::BasisLabel> labels;
    for (const auto& J : subsets(m.n, p))
      for (const auto& e : coeffs)
        for (int c = 0; c < r; ++c) labels.push_back(label(J, e, c));
    space.set_basis(p, labels);
  }

  std::map<int, gla::SparseMatrix> d;
  for (int p = 0; p < m.n; ++p) {
    gla::SparseMatrix M(space.dim(p + 1), space.dim(p));
    for (const auto& J : subsets(m.n, p))
      for (const auto& e : coeffs)
        for (int c = 0; c < r; ++c) {
          const int col = space.index_of(p, label(J, e, c));
          for (int i = 0; i < m.n; ++i) {
            auto [s, K] = wedge_front(i, J);
            if (s == 0) continue;
            auto [k, e2] = base_derivative(m, i, e);
            if (!is_zero(k)) M.add(space.index_of(p + 1, label(K, e2, c)), col, s * k);
            if (twist)
              for (const auto& [row, a] : twist->A[static_cast<std::size_t>(i)].column(c))
                M.add(space.index_of(p + 1, label(K, e, row)), col, s * a);
          }
        }
    d[p] = std::move(M);
  }
  std::set<int> edges;
  if (m.kind == BaseKind::FlatPoly)
    for (int p = 1; p <= m.n; ++p) edges.insert(p);
  return gla::TruncatedComplex(space, d, edges);
}

namespace {

gla::GradedDims flat_stage(const BaseModel& m) {
  auto small = de_rham_complex(m);
  auto big = de_rham_complex(BaseModel::flat(m.n, m.D + 1));
  gla::GradedDims out;
  for (int p = 0; p <= m.n; ++p) {
    std::int64_t z = small.dim(p) - gla::rank(small.d(p));
    std::int64_t b = p == 0 ? 0 : gla::rank(big.d(p - 1));
    out[p] = z - b;
  }
  return out;
}

}  // namespace

gla::CohomologyReport base_cohomology(const BaseModel& m) {
  m.validate();
  if (m.kind != BaseKind::FlatPoly) return gla::cohomology(de_rham_complex(m));
  auto here = flat_stage(m);
  auto next = flat_stage(BaseModel::flat(m.n, m.D + 1));
  gla::CohomologyReport rep;
  for (auto [p, v] : here) {
    gla::CohomologyEntry e;
    e.dim = v;
    e.stability = next.at(p) == v ? gla::Stability::Stable : gla::Stability::EdgeAffected;
    rep.degrees[p] = std::move(e);
  }
  return rep;
}

}  // namespace aksz
