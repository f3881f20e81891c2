#include "aksz/jet.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <sstream>

#include "aksz/errors.hpp"

namespace aksz {

namespace {

// bit layout of a generator key, high to low:
//   63-62 kind | 61-50 target index | 49-46 subset I | 45-14 sigma (4 x 8) | 13-1 direction | 0 parity
constexpr int kKindShift = 62;
constexpr int kAShift = 50;
constexpr int kIShift = 46;
constexpr int kSigmaShift = 14;
constexpr int kDirShift = 1;

Gen pack(VarKind kind, int I, int a, const Sigma& s, int dir, int parity) {
  Gen g = static_cast<Gen>(kind) << kKindShift;
  g |= static_cast<Gen>(a) << kAShift;
  g |= static_cast<Gen>(I) << kIShift;
  for (int j = 0; j < kMaxBaseDim; ++j) {
    int v = s[static_cast<std::size_t>(j)];
    if (v < 0 || v > kMaxJetOrder) throw StructuralError("jet order outside the encodable range");
    g |= static_cast<Gen>(v) << (kSigmaShift + 8 * (kMaxBaseDim - 1 - j));
  }
  g |= static_cast<Gen>(dir) << kDirShift;
  g |= static_cast<Gen>(parity & 1);
  return g;
}

int parity_of(int x) { return ((x % 2) + 2) % 2; }

bool only_base(const JetPoly& p) {
  for (const auto& [m, c] : p.terms())
    if (!m.gens.empty()) return false;
  return true;
}

}  // namespace

FieldBundleSpec::FieldBundleSpec(BaseModel base, LInfinityStructure target, std::optional<FlatConnection> twist)
    : base_(std::move(base)), target_(std::move(target)), twist_(std::move(twist)) {
  base_.validate();
  if (!base_.has_coordinates()) throw StructuralError("jet calculus needs a coordinate base model");
  if (target_.dim() > kMaxTargetDim) throw StructuralError("target too large for the generator encoding");
  if (twist_) {
    if (twist_->dim != target_.dim()) throw StructuralError("twist must act on the target basis");
    twist_->validate(n());
    for (const auto& A : twist_->A)
      for (int j = 0; j < A.cols(); ++j)
        for (const auto& [i, v] : A.column(j))
          if (target_.basis()[static_cast<std::size_t>(i)].degree != target_.basis()[static_cast<std::size_t>(j)].degree)
            throw StructuralError("twist matrices must preserve degree");
  }
}

int FieldBundleSpec::ghost(int I, int a) const {
  return target_.basis()[static_cast<std::size_t>(a)].degree - std::popcount(static_cast<unsigned>(I));
}

Gen FieldBundleSpec::u(int I, int a, const Sigma& s) const {
  return pack(VarKind::U, I, a, s, 0, parity_of(ghost(I, a)));
}

Gen FieldBundleSpec::cartan(int I, int a, const Sigma& s) const {
  return pack(VarKind::Cartan, I, a, s, 0, parity_of(ghost(I, a) + 1));
}

Gen FieldBundleSpec::dx(int i) { return pack(VarKind::Dx, 0, 0, {}, i, 1); }
Gen FieldBundleSpec::xi(int i) { return pack(VarKind::Xi, 0, 0, {}, i, 1); }

JetVar FieldBundleSpec::decode(Gen g) {
  JetVar v;
  v.kind = static_cast<VarKind>(g >> kKindShift);
  v.a = static_cast<int>((g >> kAShift) & 0xFFF);
  v.I = static_cast<int>((g >> kIShift) & 0xF);
  for (int j = 0; j < kMaxBaseDim; ++j)
    v.sigma[static_cast<std::size_t>(j)] = static_cast<int>((g >> (kSigmaShift + 8 * (kMaxBaseDim - 1 - j))) & 0xFF);
  v.dir = static_cast<int>((g >> kDirShift) & 0x1FFF);
  return v;
}

std::string FieldBundleSpec::text(Gen g) const {
  JetVar v = decode(g);
  std::ostringstream os;
  switch (v.kind) {
    case VarKind::Xi: os << "xi" << v.dir + 1; return os.str();
    case VarKind::Dx: os << "dx" << v.dir + 1; return os.str();
    case VarKind::U: os << "u"; break;
    case VarKind::Cartan: os << "th"; break;
  }
  os << "[";
  for (int j = 0; j < n(); ++j)
    if (v.I & (1 << j)) os << j + 1;
  os << ";" << target_.basis()[static_cast<std::size_t>(v.a)].label << "]";
  bool any = false;
  for (int j = 0; j < n(); ++j) any |= v.sigma[static_cast<std::size_t>(j)] != 0;
  if (any) {
    os << "_(";
    for (int j = 0; j < n(); ++j) os << (j ? "," : "") << v.sigma[static_cast<std::size_t>(j)];
    os << ")";
  }
  return os.str();
}

std::string FieldBundleSpec::text(const JetPoly& p) const {
  if (p.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : p.terms()) {
    if (!first) os << " + ";
    first = false;
    os << to_string(c);
    bool coeff = false;
    for (int j = 0; j < n(); ++j) coeff |= m.base[static_cast<std::size_t>(j)] != 0;
    if (coeff) {
      os << " " << (base_.kind == BaseKind::FlatPoly ? "x^" : "z^") << "(";
      for (int j = 0; j < n(); ++j) os << (j ? "," : "") << m.base[static_cast<std::size_t>(j)];
      os << ")";
    }
    for (Gen g : m.gens) os << " " << text(g);
  }
  return os.str();
}

Grading grading(const FieldBundleSpec& spec, const Monomial& m) {
  Grading g;
  for (Gen x : m.gens) {
    JetVar v = FieldBundleSpec::decode(x);
    switch (v.kind) {
      case VarKind::Dx: ++g.form; break;
      case VarKind::Xi: break;
      case VarKind::U:
      case VarKind::Cartan: {
        ++g.weight;
        g.ghost += spec.ghost(v.I, v.a);
        if (v.kind == VarKind::Cartan) ++g.vertical;
        int order = std::accumulate(v.sigma.begin(), v.sigma.end(), 0);
        g.jet_order = std::max(g.jet_order, order);
        break;
      }
    }
  }
  return g;
}

std::optional<Grading> homogeneous_grading(const FieldBundleSpec& spec, const JetPoly& p) {
  std::optional<Grading> out;
  for (const auto& [m, c] : p.terms()) {
    Grading g = grading(spec, m);
    g.jet_order = 0;
    if (out && !(*out == g)) return std::nullopt;
    out = g;
  }
  return out;
}

int scaling_degree(const FieldBundleSpec& spec, const Monomial& m, int j) {
  int d = 0;
  for (Gen x : m.gens) {
    JetVar v = FieldBundleSpec::decode(x);
    if (v.kind == VarKind::Dx && v.dir == j) d -= 1;
    if (v.kind == VarKind::U || v.kind == VarKind::Cartan)
      d += v.sigma[static_cast<std::size_t>(j)] + ((v.I >> j) & 1);
  }
  if (spec.base().kind == BaseKind::FlatPoly) d -= m.base[static_cast<std::size_t>(j)];
  return d;
}

JetPoly total_derivative(const FieldBundleSpec& spec, int i, const JetPoly& f) {
  Derivation D;
  D.odd = false;
  D.on_gen = [&spec, i](Gen g) {
    JetVar v = FieldBundleSpec::decode(g);
    if (v.kind != VarKind::U && v.kind != VarKind::Cartan) return JetPoly{};
    Sigma s = v.sigma;
    s[static_cast<std::size_t>(i)] += 1;
    return JetPoly::generator(v.kind == VarKind::U ? spec.u(v.I, v.a, s) : spec.cartan(v.I, v.a, s));
  };
  D.on_base = [&spec, i](const BaseExp& e) { return base_derivative_poly(spec.base(), i, e); };
  return D(f);
}

JetPoly d_h(const FieldBundleSpec& spec, const JetPoly& f) {
  JetPoly out;
  for (int i = 0; i < spec.n(); ++i) out += JetPoly::generator(FieldBundleSpec::dx(i)) * total_derivative(spec, i, f);
  return out;
}

JetPoly d_v(const FieldBundleSpec& spec, const JetPoly& f) {
  Derivation D;
  D.odd = true;
  D.on_gen = [&spec](Gen g) {
    JetVar v = FieldBundleSpec::decode(g);
    if (v.kind != VarKind::U) return JetPoly{};
    return JetPoly::generator(spec.cartan(v.I, v.a, v.sigma));
  };
  return D(f);
}

JetPoly base_d(const FieldBundleSpec& spec, const JetPoly& form) {
  JetPoly out;
  for (int i = 0; i < spec.n(); ++i) {
    Derivation D;
    D.on_base = [&spec, i](const BaseExp& e) { return base_derivative_poly(spec.base(), i, e); };
    out += JetPoly::generator(FieldBundleSpec::dx(i)) * D(form);
  }
  return out;
}

// ---------------------------------------------------------------- prolongation

Prolongation::Prolongation(const FieldBundleSpec& spec, EvolutionaryField e) : spec_(&spec), e_(std::move(e)) {
  if (static_cast<int>(e_.phi.size()) != spec.fiber_count())
    throw StructuralError("characteristic needs one entry per fiber coordinate");
}

const JetPoly& Prolongation::derived(int fiber, const Sigma& s) {
  auto key = std::make_pair(fiber, s);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  JetPoly value;
  int i = 0;
  while (i < kMaxBaseDim && s[static_cast<std::size_t>(i)] == 0) ++i;
  if (i == kMaxBaseDim) {
    value = e_.phi[static_cast<std::size_t>(fiber)];
  } else {
    Sigma t = s;
    t[static_cast<std::size_t>(i)] -= 1;
    value = total_derivative(*spec_, i, derived(fiber, t));
  }
  return cache_.emplace(key, std::move(value)).first->second;
}

const JetPoly& Prolongation::image(Gen g) {
  auto it = gen_cache_.find(g);
  if (it != gen_cache_.end()) return it->second;
  JetVar v = FieldBundleSpec::decode(g);
  JetPoly value;
  if (v.kind == VarKind::U) {
    value = derived(spec_->fiber_index(v.I, v.a), v.sigma);
  } else if (v.kind == VarKind::Cartan) {
    value = d_v(*spec_, derived(spec_->fiber_index(v.I, v.a), v.sigma));
    if (e_.odd) value *= Rational(-1);
  }
  return gen_cache_.emplace(g, std::move(value)).first->second;
}

JetPoly Prolongation::operator()(const JetPoly& f) {
  Derivation D;
  D.odd = e_.odd;
  D.on_gen = [this](Gen g) { return image(g); };
  return D(f);
}

JetPoly prolong(const FieldBundleSpec& spec, const EvolutionaryField& e, const JetPoly& f) {
  Prolongation p(spec, e);
  return p(f);
}

// ------------------------------------------------------------------------ s

namespace {

// Coefficient of xi^I in a polynomial whose xi factors sort to the front.
JetPoly xi_coefficient(const JetPoly& p, int I) {
  JetPoly out;
  for (const auto& [m, c] : p.terms()) {
    int mask = 0;
    std::size_t k = 0;
    while (k < m.gens.size() && FieldBundleSpec::decode(m.gens[k]).kind == VarKind::Xi) {
      mask |= 1 << FieldBundleSpec::decode(m.gens[k]).dir;
      ++k;
    }
    if (mask != I) continue;
    Monomial rest{m.base, std::vector<Gen>(m.gens.begin() + static_cast<long>(k), m.gens.end())};
    out.add_term(rest, c);
  }
  return out;
}

JetPoly xi_monomial(int I) {
  std::vector<Gen> gens;
  for (int j = 0; j < kMaxBaseDim; ++j)
    if (I & (1 << j)) gens.push_back(FieldBundleSpec::xi(j));
  return JetPoly::monomial(Monomial{{}, gens});
}

}  // namespace

EvolutionaryField brst_s(const FieldBundleSpec& spec, BrstPart part) {
  const int n = spec.n();
  const int dimL = spec.target().dim();
  EvolutionaryField e;
  e.odd = true;
  e.phi.resize(static_cast<std::size_t>(spec.fiber_count()));
  if (dimL == 0) return e;

  std::vector<JetPoly> Phi(static_cast<std::size_t>(dimL));
  for (int a = 0; a < dimL; ++a)
    for (int I = 0; I < (1 << n); ++I)
      Phi[static_cast<std::size_t>(a)] += xi_monomial(I) * JetPoly::generator(spec.u(I, a));

  for (int a = 0; a < dimL; ++a) {
    JetPoly F;
    if (part != BrstPart::Target) {
      for (int i = 0; i < n; ++i) {
        JetPoly inner = total_derivative(spec, i, Phi[static_cast<std::size_t>(a)]);
        if (spec.twist())
          for (int b = 0; b < dimL; ++b) {
            Rational A = spec.twist()->A[static_cast<std::size_t>(i)].at(a, b);
            if (!is_zero(A)) inner += Phi[static_cast<std::size_t>(b)] * A;
          }
        F += JetPoly::generator(FieldBundleSpec::xi(i)) * inner;
      }
    }
    if (part != BrstPart::DeRham) {
      const LInfinityStructure& L = spec.target();
      F += substitute(L.q_image(a), [&](Gen g) { return Phi[static_cast<std::size_t>(L.index_of_generator(g))]; });
    }
    for (int I = 0; I < (1 << n); ++I) {
      JetPoly c = xi_coefficient(F, I);
      if (std::popcount(static_cast<unsigned>(I)) % 2 == 1) c *= Rational(-1);
      e.phi[static_cast<std::size_t>(spec.fiber_index(I, a))] = std::move(c);
    }
  }
  return e;
}

// ------------------------------------------------------------------- lifts

ProjectibleLift lift_projectible(const FieldBundleSpec& spec, const std::vector<JetPoly>& h, const std::vector<JetPoly>& g) {
  if (static_cast<int>(h.size()) != spec.n()) throw StructuralError("lift needs one base component per direction");
  if (static_cast<int>(g.size()) != spec.fiber_count()) throw StructuralError("lift needs one fiber component per coordinate");
  for (const auto& hi : h)
    if (!only_base(hi)) throw StructuralError("base components of a projectible field depend on x only");
  for (int k = 0; k < spec.fiber_count(); ++k)
    for (const auto& [m, c] : g[static_cast<std::size_t>(k)].terms()) {
      if (m.gens.size() > 1) throw StructuralError("fiber component of weight > 1 is not projectible");
      for (Gen x : m.gens) {
        JetVar v = FieldBundleSpec::decode(x);
        bool jet_free = std::all_of(v.sigma.begin(), v.sigma.end(), [](int s) { return s == 0; });
        if (v.kind != VarKind::U || !jet_free) throw StructuralError("fiber component may depend on x and u only");
        if (is_odd(x) != (parity_of(spec.ghost(spec.fiber_I(k), spec.fiber_a(k))) != 0))
          throw StructuralError("fiber component must have the parity of its coordinate");
      }
    }
  ProjectibleLift out;
  out.h = h;
  out.vertical.odd = false;
  out.vertical.phi = g;
  for (int k = 0; k < spec.fiber_count(); ++k)
    for (int i = 0; i < spec.n(); ++i) {
      Sigma s{};
      s[static_cast<std::size_t>(i)] = 1;
      out.vertical.phi[static_cast<std::size_t>(k)] -= h[static_cast<std::size_t>(i)] * JetPoly::generator(spec.u(spec.fiber_I(k), spec.fiber_a(k), s));
    }
  return out;
}

JetPoly apply_lift(const FieldBundleSpec& spec, const ProjectibleLift& v, const JetPoly& f) {
  JetPoly out = prolong(spec, v.vertical, f);
  for (int i = 0; i < spec.n(); ++i) out += v.h[static_cast<std::size_t>(i)] * total_derivative(spec, i, f);
  return out;
}

JetPoly cartan_defect(const FieldBundleSpec& spec, const ProjectibleLift& v, int fiber, const Sigma& sigma) {
  const int I = spec.fiber_I(fiber), a = spec.fiber_a(fiber);
  JetPoly out = d_h(spec, apply_lift(spec, v, JetPoly::generator(spec.u(I, a, sigma))));
  for (int i = 0; i < spec.n(); ++i) {
    Sigma s = sigma;
    s[static_cast<std::size_t>(i)] += 1;
    JetPoly up = JetPoly::generator(spec.u(I, a, s));
    out -= JetPoly::generator(FieldBundleSpec::dx(i)) * apply_lift(spec, v, up);
    out -= base_d(spec, v.h[static_cast<std::size_t>(i)]) * up;
  }
  return out;
}

// ---------------------------------------------------------------- pullbacks

namespace {

JetPoly derive_section(const FieldBundleSpec& spec, JetPoly f, const Sigma& s) {
  for (int i = 0; i < spec.n(); ++i)
    for (int k = 0; k < s[static_cast<std::size_t>(i)]; ++k) {
      Derivation D;
      D.on_base = [&spec, i](const BaseExp& e) { return base_derivative_poly(spec.base(), i, e); };
      f = D(f);
    }
  return f;
}

void check_section(const FieldBundleSpec& spec, const Section& s) {
  if (static_cast<int>(s.size()) != spec.fiber_count()) throw StructuralError("section needs one function per fiber coordinate");
  for (int k = 0; k < spec.fiber_count(); ++k) {
    if (!only_base(s[static_cast<std::size_t>(k)])) throw StructuralError("section components are base functions");
    if (parity_of(spec.ghost(spec.fiber_I(k), spec.fiber_a(k))) != 0 && !s[static_cast<std::size_t>(k)].is_zero())
      throw StructuralError("sections are defined for even fiber coordinates only");
  }
}

bool leaves_truncation(const FieldBundleSpec& spec, const JetPoly& f) {
  for (const auto& [m, c] : f.terms())
    if (!in_truncation(spec.base(), m.base)) return true;
  return false;
}

}  // namespace

BaseForm pullback_on_section(const FieldBundleSpec& spec, const JetPoly& omega, const Section& s) {
  check_section(spec, s);
  BaseForm out;
  std::map<Gen, JetPoly> memo;
  for (const auto& [m, c] : omega.terms()) {
    JetPoly term = JetPoly::monomial(Monomial{m.base, {}}, c);
    bool vanish = false;
    for (Gen g : m.gens) {
      JetVar v = FieldBundleSpec::decode(g);
      if (v.kind == VarKind::Dx) {
        term = term * JetPoly::generator(g);
      } else if (v.kind == VarKind::U) {
        auto it = memo.find(g);
        if (it == memo.end())
          it = memo.emplace(g, derive_section(spec, s[static_cast<std::size_t>(spec.fiber_index(v.I, v.a))], v.sigma)).first;
        term = term * it->second;
      } else {
        vanish = true;  // Cartan forms vanish on holonomic sections; xi never occurs here
      }
      if (vanish || term.is_zero()) break;
    }
    if (!vanish) out.form += term;
  }
  out.edge = leaves_truncation(spec, out.form);
  return out;
}

Rational integrate_top(const FieldBundleSpec& spec, const JetPoly& omega, const Section& s) {
  if (spec.base().kind != BaseKind::TorusFourier) throw StructuralError("integration needs the compact torus model");
  BaseForm f = pullback_on_section(spec, omega, s);
  Rational total = 0;
  for (const auto& [m, c] : f.form.terms()) {
    if (static_cast<int>(m.gens.size()) != spec.n()) throw StructuralError("integrand is not a top form");
    if (std::all_of(m.base.begin(), m.base.end(), [](int k) { return k == 0; })) total += c;
  }
  return total;
}

BaseForm apply_operator(const FieldBundleSpec& spec, const JetPoly& omega, const std::vector<Section>& sections) {
  for (const auto& s : sections) check_section(spec, s);
  const int l = static_cast<int>(sections.size());
  if (l < 1) throw StructuralError("operators need at least one argument");
  Rational fact = 1;
  for (int k = 2; k <= l; ++k) fact *= k;

  BaseForm out;
  for (const auto& [m, c] : omega.terms()) {
    JetPoly head = JetPoly::monomial(Monomial{m.base, {}}, c);
    std::vector<JetVar> factors;
    for (Gen g : m.gens) {
      JetVar v = FieldBundleSpec::decode(g);
      if (v.kind == VarKind::Dx) head = head * JetPoly::generator(g);
      else if (v.kind == VarKind::U) factors.push_back(v);
      else throw StructuralError("operator picture is defined on forms without Cartan factors");
    }
    if (static_cast<int>(factors.size()) != l) throw StructuralError("form weight differs from the number of arguments");
    std::vector<int> perm(static_cast<std::size_t>(l));
    std::iota(perm.begin(), perm.end(), 0);
    JetPoly sum;
    do {
      JetPoly prod = head;
      for (int k = 0; k < l && !prod.is_zero(); ++k) {
        const JetVar& v = factors[static_cast<std::size_t>(k)];
        const Section& sec = sections[static_cast<std::size_t>(perm[static_cast<std::size_t>(k)])];
        prod = prod * derive_section(spec, sec[static_cast<std::size_t>(spec.fiber_index(v.I, v.a))], v.sigma);
      }
      sum += prod;
    } while (std::next_permutation(perm.begin(), perm.end()));
    out.form += sum * (Rational(1) / fact);
  }
  out.edge = leaves_truncation(spec, out.form);
  return out;
}

gla::SparseMatrix operator_matrix(const FieldBundleSpec& spec, const JetPoly& omega) {
  if (spec.base().kind != BaseKind::TorusFourier) throw StructuralError("operator matrices need the torus model");
  const auto coeffs = coefficient_basis(spec.base());
  std::map<std::pair<int, BaseExp>, int> row_of;
  for (int p = 0; p <= spec.n(); ++p)
    for (const auto& J : subsets(spec.n(), p)) {
      int mask = 0;
      for (int j : J) mask |= 1 << j;
      for (const auto& e : coeffs) row_of.emplace(std::make_pair(mask, e), static_cast<int>(row_of.size()));
    }
  const int cols = spec.fiber_count() * static_cast<int>(coeffs.size());
  gla::SparseMatrix M(static_cast<int>(row_of.size()), cols);
  int col = 0;
  for (int k = 0; k < spec.fiber_count(); ++k)
    for (const auto& e : coeffs) {
      Section s(static_cast<std::size_t>(spec.fiber_count()));
      if (parity_of(spec.ghost(spec.fiber_I(k), spec.fiber_a(k))) == 0) s[static_cast<std::size_t>(k)] = JetPoly::monomial(Monomial{e, {}});
      BaseForm f = apply_operator(spec, omega, {s});
      for (const auto& [m, c] : f.form.terms()) {
        int mask = 0;
        for (Gen g : m.gens) mask |= 1 << FieldBundleSpec::decode(g).dir;
        auto it = row_of.find({mask, m.base});
        if (it != row_of.end()) M.add(it->second, col, c);
      }
      ++col;
    }
  return M;
}

// ------------------------------------------------------------------ random

JetPoly random_jet_poly(const FieldBundleSpec& spec, std::mt19937_64& rng, const RandomJetOptions& opt) {
  const int n = spec.n();
  std::vector<int> fibers;
  for (int k = 0; k < spec.fiber_count(); ++k)
    if (!opt.even_fibers_only || parity_of(spec.ghost(spec.fiber_I(k), spec.fiber_a(k))) == 0) fibers.push_back(k);
  std::uniform_int_distribution<int> terms(1, opt.max_terms);
  std::uniform_int_distribution<int> weight(0, opt.max_weight);
  std::uniform_int_distribution<int> coeff(-4, 4);
  std::uniform_int_distribution<int> order(0, opt.max_order);
  std::uniform_int_distribution<int> dir(0, n - 1);
  std::bernoulli_distribution coin(0.5);
  const int lo = spec.base().kind == BaseKind::FlatPoly ? 0 : -opt.coefficient_spread;
  std::uniform_int_distribution<int> expo(lo, opt.coefficient_spread);
  const int max_form = opt.max_form < 0 ? n : opt.max_form;

  JetPoly out;
  const int t = terms(rng);
  for (int k = 0; k < t; ++k) {
    int c = coeff(rng);
    if (c == 0) c = 1;
    Monomial base;
    for (int j = 0; j < n; ++j) base.base[static_cast<std::size_t>(j)] = expo(rng);
    Rational q(c, 1 + static_cast<int>(rng() % 3));
    q.canonicalize();
    JetPoly term = JetPoly::monomial(base, q);
    for (int j = 0; j < n; ++j)
      if (coin(rng) && grading(spec, term.terms().begin()->first).form < max_form)
        term = term * JetPoly::generator(FieldBundleSpec::dx(j));
    if (!fibers.empty()) {
      int w = weight(rng);
      for (int q = 0; q < w; ++q) {
        int f = fibers[rng() % fibers.size()];
        Sigma s{};
        int o = order(rng);
        for (int r = 0; r < o; ++r) s[static_cast<std::size_t>(dir(rng))] += 1;
        Gen g = (opt.cartan && coin(rng)) ? spec.cartan(spec.fiber_I(f), spec.fiber_a(f), s)
                                          : spec.u(spec.fiber_I(f), spec.fiber_a(f), s);
        term = term * JetPoly::generator(g);
      }
    }
    if (term.is_zero()) continue;
    out += term;
  }
  return out;
}

Section random_section(const FieldBundleSpec& spec, std::mt19937_64& rng, int spread) {
  Section s(static_cast<std::size_t>(spec.fiber_count()));
  const int lo = spec.base().kind == BaseKind::FlatPoly ? 0 : -spread;
  std::uniform_int_distribution<int> expo(lo, spread);
  std::uniform_int_distribution<int> coeff(-3, 3);
  for (int k = 0; k < spec.fiber_count(); ++k) {
    if (parity_of(spec.ghost(spec.fiber_I(k), spec.fiber_a(k))) != 0) continue;
    for (int t = 0; t < 3; ++t) {
      Monomial m;
      for (int j = 0; j < spec.n(); ++j) m.base[static_cast<std::size_t>(j)] = expo(rng);
      s[static_cast<std::size_t>(k)].add_term(m, coeff(rng));
    }
  }
  return s;
}

}  // namespace aksz
