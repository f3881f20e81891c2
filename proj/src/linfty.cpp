#include "aksz/linfty.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

#include "aksz/errors.hpp"
#include "aksz/gla/rank.hpp"

namespace aksz {

LInfinityStructure::LInfinityStructure(std::vector<TargetBasis> basis, int max_arity)
    : basis_(std::move(basis)), max_arity_(max_arity), q_(basis_.size()) {
  if (max_arity < 1) throw StructuralError("maximal arity must be at least 1");
  std::set<std::string> seen;
  for (const auto& b : basis_)
    if (!seen.insert(b.label).second) throw StructuralError("duplicate target basis label '" + b.label + "'");
}

int LInfinityStructure::index_of(const std::string& label) const {
  for (std::size_t i = 0; i < basis_.size(); ++i)
    if (basis_[i].label == label) return static_cast<int>(i);
  return -1;
}

int LInfinityStructure::index_of_generator(Gen g) const {
  long a = static_cast<long>(g >> 1) - 1;
  if (a < 0 || a >= dim() || generator(static_cast<int>(a)) != g) return -1;
  return static_cast<int>(a);
}

void LInfinityStructure::add_bracket(const BracketEntry& e) {
  if (e.arity < 1 || e.arity > max_arity_)
    throw StructuralError("bracket arity " + std::to_string(e.arity) + " outside 1.." + std::to_string(max_arity_));
  if (static_cast<int>(e.inputs.size()) != e.arity) throw StructuralError("bracket input count differs from its arity");
  auto check = [&](int i) {
    if (i < 0 || i >= dim()) throw StructuralError("bracket refers to unknown basis index " + std::to_string(i));
  };
  check(e.output);
  int in_degree = 0;
  for (int b : e.inputs) {
    check(b);
    in_degree += basis_[static_cast<std::size_t>(b)].degree;
  }
  const int out_degree = basis_[static_cast<std::size_t>(e.output)].degree;
  if (out_degree + 1 != in_degree) {
    std::ostringstream os;
    os << "bracket into '" << basis_[static_cast<std::size_t>(e.output)].label << "' has input degree " << in_degree
       << ", expected " << out_degree + 1;
    throw StructuralError(os.str());
  }
  std::vector<Gen> gens;
  for (int b : e.inputs) gens.push_back(generator(b));
  int sign = normalize(gens);
  if (sign == 0) throw StructuralError("bracket repeats an odd input, which graded symmetry forces to vanish");
  Rational v = e.value;
  if (sign < 0) v = -v;
  q_[static_cast<std::size_t>(e.output)].add_term(Monomial{{}, gens}, v);
  entries_.push_back(e);
}

void LInfinityStructure::set_lie_structure(const std::vector<std::vector<std::vector<Rational>>>& f) {
  const int n = dim();
  if (static_cast<int>(f.size()) != n) throw StructuralError("lie_structure must have one slice per basis element");
  for (int a = 0; a < n; ++a) {
    if (static_cast<int>(f[static_cast<std::size_t>(a)].size()) != n)
      throw StructuralError("lie_structure slice has the wrong size");
    for (int b = 0; b < n; ++b)
      if (static_cast<int>(f[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)].size()) != n)
        throw StructuralError("lie_structure row has the wrong size");
  }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        const Rational& x = f[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)][static_cast<std::size_t>(c)];
        const Rational& y = f[static_cast<std::size_t>(a)][static_cast<std::size_t>(c)][static_cast<std::size_t>(b)];
        if (x != -y) {
          std::ostringstream os;
          os << "lie_structure is not skew: f[" << a << "][" << b << "][" << c << "] = " << to_string(x) << " but f[" << a
             << "][" << c << "][" << b << "] = " << to_string(y);
          throw StructuralError(os.str());
        }
        if (!is_zero(x) && (basis_[static_cast<std::size_t>(a)].degree != 1 ||
                            basis_[static_cast<std::size_t>(b)].degree != 1 || basis_[static_cast<std::size_t>(c)].degree != 1))
          throw StructuralError("lie_structure needs degree-1 generators");
      }
  // -1/2 f^a_{bc} c^b c^c summed over b, c equals -f^a_{bc} c^b c^c over b < c
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = b + 1; c < n; ++c) {
        const Rational& x = f[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)][static_cast<std::size_t>(c)];
        if (!is_zero(x)) add_bracket(BracketEntry{2, a, {b, c}, -x});
      }
}

Derivation LInfinityStructure::q_derivation() const {
  Derivation d;
  d.odd = true;
  d.on_gen = [this](Gen g) {
    int a = index_of_generator(g);
    return a < 0 ? SuperPoly{} : q_[static_cast<std::size_t>(a)];
  };
  return d;
}

int LInfinityStructure::effective_arity() const {
  int k = 0;
  for (const auto& q : q_)
    for (const auto& [m, c] : q.terms()) k = std::max(k, static_cast<int>(m.degree()));
  return k;
}

gla::SparseMatrix LInfinityStructure::l1_matrix() const {
  gla::SparseMatrix m(dim(), dim());
  for (const auto& e : entries_)
    if (e.arity == 1) m.add(e.output, e.inputs.front(), e.value);
  return m;
}

std::string LInfinityStructure::text(const Monomial& m) const {
  if (m.gens.empty()) return "1";
  std::string s;
  for (std::size_t i = 0; i < m.gens.size(); ++i) {
    if (i) s += " ";
    int a = index_of_generator(m.gens[i]);
    s += "c^" + (a < 0 ? std::string("?") : basis_[static_cast<std::size_t>(a)].label);
  }
  return s;
}

namespace {

std::vector<NilpotencyViolation> nilpotency_components(const LInfinityStructure& L, int limit) {
  std::vector<NilpotencyViolation> out;
  Derivation Q = L.q_derivation();
  for (int a = 0; a < L.dim(); ++a) {
    SuperPoly q2 = Q(L.q_image(a));
    for (const auto& [m, c] : q2.terms()) {
      if (static_cast<int>(m.degree()) > limit) continue;
      out.push_back({static_cast<int>(m.degree()), L.basis()[static_cast<std::size_t>(a)].label, L.text(m), c});
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
    return std::tie(x.arity, x.output, x.monomial) < std::tie(y.arity, y.output, y.monomial);
  });
  return out;
}

void enumerate(const LInfinityStructure& L, int a, int weight_left, Monomial& cur, std::vector<Monomial>& out) {
  if (weight_left == 0) {
    out.push_back(cur);
    return;
  }
  if (a == L.dim()) return;
  const Gen g = L.generator(a);
  const int max_count = is_odd(g) ? 1 : weight_left;
  for (int k = 0; k <= max_count; ++k) {
    for (int i = 0; i < k; ++i) cur.gens.push_back(g);
    enumerate(L, a + 1, weight_left - k, cur, out);
    for (int i = 0; i < k; ++i) cur.gens.pop_back();
  }
}

int monomial_degree(const LInfinityStructure& L, const Monomial& m) {
  int d = 0;
  for (Gen g : m.gens) d += L.basis()[static_cast<std::size_t>(L.index_of_generator(g))].degree;
  return d;
}

std::vector<Monomial> all_of_weight(const LInfinityStructure& L, int weight) {
  std::vector<Monomial> out;
  Monomial cur;
  enumerate(L, 0, weight, cur, out);
  std::sort(out.begin(), out.end());
  return out;
}

gla::BasisLabel label_of(const LInfinityStructure& L, const Monomial& m) {
  gla::BasisLabel b;
  b.parts.push_back(static_cast<std::int64_t>(m.degree()));
  for (Gen g : m.gens) b.parts.push_back(L.index_of_generator(g));
  b.text = L.text(m);
  return b;
}

// CE complex on the weights [w_lo, w_hi], dropping image components above w_hi.
gla::TruncatedComplex build_ce(const LInfinityStructure& L, int w_lo, int w_hi) {
  std::map<int, std::vector<Monomial>> by_degree;
  for (int w = w_lo; w <= w_hi; ++w)
    for (auto& m : all_of_weight(L, w)) by_degree[monomial_degree(L, m)].push_back(std::move(m));
  if (by_degree.empty()) return {};

  gla::GradedSpace space;
  std::map<int, std::map<Monomial, int>> index;
  for (auto& [g, ms] : by_degree) {
    std::vector<gla::BasisLabel> labels;
    for (const auto& m : ms) labels.push_back(label_of(L, m));
    space.set_basis(g, labels);
    for (std::size_t i = 0; i < ms.size(); ++i) index[g][ms[i]] = space.index_of(g, labels[i]);
  }

  const int lo = by_degree.begin()->first;
  const int hi = by_degree.rbegin()->first;
  Derivation Q = L.q_derivation();
  std::map<int, gla::SparseMatrix> d;
  std::set<int> edges;
  for (int g = lo; g < hi; ++g) {
    gla::SparseMatrix M(space.dim(g + 1), space.dim(g));
    for (const auto& [m, j] : index[g]) {
      SuperPoly img = Q.apply(m);
      gla::SparseVector col;
      for (const auto& [t, c] : img.terms()) {
        if (static_cast<int>(t.degree()) > w_hi) {
          edges.insert(g);
          edges.insert(g + 1);
          continue;
        }
        col.emplace_back(index[g + 1].at(t), c);
      }
      M.set_column(j, std::move(col));
    }
    d[g] = std::move(M);
  }
  // images out of the top degree leave the window only through dropped weight
  for (const auto& [m, j] : index[hi])
    if (!Q.apply(m).is_zero()) edges.insert(hi);
  return gla::TruncatedComplex(space, d, edges);
}

void require_nilpotent(const LInfinityStructure& L) {
  auto v = nilpotency_components(L, 1 << 20);
  if (!v.empty()) {
    const auto& f = v.front();
    throw IntegrityError("Q^2 != 0: component " + f.monomial + " of Q^2 c^" + f.output + " has coefficient " +
                         to_string(f.coefficient));
  }
}

}  // namespace

std::vector<NilpotencyViolation> check_nilpotency(const LInfinityStructure& L, int max_arity) {
  // Q^2 c^a has polynomial degree at most 2A - 1 for brackets of arity <= A
  if (max_arity > 2 * L.max_arity() - 1)
    throw StructuralError("requested arity " + std::to_string(max_arity) + " exceeds 2A-1 for the declared bound A = " +
                          std::to_string(L.max_arity()));
  return nilpotency_components(L, max_arity);
}

std::vector<Monomial> sym_basis(const LInfinityStructure& L, int weight, int degree) {
  std::vector<Monomial> out;
  for (auto& m : all_of_weight(L, weight))
    if (monomial_degree(L, m) == degree) out.push_back(std::move(m));
  return out;
}

std::vector<int> sym_degrees(const LInfinityStructure& L, int weight) {
  std::set<int> ds;
  for (const auto& m : all_of_weight(L, weight)) ds.insert(monomial_degree(L, m));
  return {ds.begin(), ds.end()};
}

gla::TruncatedComplex ce_differential(const LInfinityStructure& L, const CETruncation& t) {
  if (t.max_weight < 1) throw StructuralError("CE truncation needs max weight >= 1");
  require_nilpotent(L);
  return build_ce(L, 1, t.max_weight);
}

gla::TruncatedComplex ce_weight_block(const LInfinityStructure& L, int weight) {
  if (!L.weight_graded()) throw HypothesisError("weight blocks need a target with only l_1");
  return build_ce(L, weight, weight);
}

TargetCohomology target_cohomology(const LInfinityStructure& L, const CETruncation& t) {
  TargetCohomology out;
  out.total = gla::cohomology(ce_differential(L, t));
  out.weight_graded = L.weight_graded();
  if (out.weight_graded) {
    for (int w = 1; w <= t.max_weight; ++w)
      out.by_weight[w] = gla::trim(gla::cohomology(build_ce(L, w, w), false).dims());
  }
  return out;
}

LInfinityStructure change_basis(const LInfinityStructure& L, const gla::SparseMatrix& T) {
  const int n = L.dim();
  if (T.rows() != n || T.cols() != n) throw StructuralError("basis change has the wrong size");
  auto Ti = gla::inverse(T);
  if (!Ti) throw StructuralError("basis change is singular");
  for (int j = 0; j < n; ++j)
    for (const auto& [i, v] : T.column(j))
      if (L.basis()[static_cast<std::size_t>(i)].degree != L.basis()[static_cast<std::size_t>(j)].degree)
        throw StructuralError("basis change mixes degrees");

  // c^a = sum_b T_ab c'^b ; Q'(c'^b) = sum_a (T^-1)_ba Q(c^a) rewritten in c'
  std::vector<SuperPoly> image(static_cast<std::size_t>(n));
  for (int b = 0; b < n; ++b)
    for (const auto& [a, v] : T.column(b)) image[static_cast<std::size_t>(a)] += SuperPoly::generator(L.generator(b), v);
  auto subst = [&](Gen g) { return image[static_cast<std::size_t>(L.index_of_generator(g))]; };

  LInfinityStructure out(L.basis(), L.max_arity());
  for (int b = 0; b < n; ++b) {
    SuperPoly q;
    for (int a = 0; a < n; ++a) {
      const Rational& c = Ti->at(b, a);
      if (!is_zero(c)) q += substitute(L.q_image(a), subst) * c;
    }
    for (const auto& [m, c] : q.terms()) {
      BracketEntry e;
      e.arity = static_cast<int>(m.degree());
      e.output = b;
      for (Gen g : m.gens) e.inputs.push_back(L.index_of_generator(g));
      e.value = c;
      out.add_bracket(e);
    }
  }
  return out;
}

}  // namespace aksz
