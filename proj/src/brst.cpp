#include "aksz/brst.hpp"

#include <omp.h>

#include <algorithm>
#include <bit>
#include <exception>
#include <functional>
#include <numeric>

#include "aksz/errors.hpp"
#include "aksz/gla/rank.hpp"

namespace aksz {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

BaseModel VerificationCase::base_at(const Rung& r) const {
  if (base_kind == BaseKind::FlatPoly) return BaseModel::flat(n, r.base);
  if (base_kind == BaseKind::TorusFourier) return BaseModel::torus(n, r.base);
  throw StructuralError("the bicomplex needs a coordinate base model");
}

FieldBundleSpec VerificationCase::bundle_at(const Rung& r) const { return FieldBundleSpec(base_at(r), target, twist); }

namespace {

using PG = std::pair<int, int>;  // (form degree p, ghost g)

// ------------------------------------------------------------ enumeration

struct VarInfo {
  Gen g = 0;
  Sigma cost{};
  int total = 0;
  int ghost = 0;
  bool odd = false;
};

std::vector<VarInfo> jet_variables(const FieldBundleSpec& spec, int max_cost, bool fields_only) {
  std::vector<VarInfo> out;
  const int n = spec.n();
  for (int k = 0; k < spec.fiber_count(); ++k) {
    const int I = spec.fiber_I(k), a = spec.fiber_a(k);
    if (fields_only && I != 0) continue;
    const int ci = std::popcount(static_cast<unsigned>(I));
    if (ci > max_cost) continue;
    Sigma s{};
    auto rec = [&](auto&& self, int j, int left) -> void {
      if (j == n) {
        VarInfo v;
        v.g = spec.u(I, a, s);
        for (int i = 0; i < n; ++i) v.cost[static_cast<std::size_t>(i)] = s[static_cast<std::size_t>(i)] + ((I >> i) & 1);
        v.total = std::accumulate(v.cost.begin(), v.cost.end(), 0);
        v.ghost = spec.ghost(I, a);
        v.odd = is_odd(v.g);
        out.push_back(v);
        return;
      }
      for (int t = 0; t <= left; ++t) {
        s[static_cast<std::size_t>(j)] = t;
        self(self, j + 1, left - t);
      }
      s[static_cast<std::size_t>(j)] = 0;
    };
    rec(rec, 0, max_cost - ci);
  }
  std::sort(out.begin(), out.end(), [](const VarInfo& x, const VarInfo& y) { return x.g < y.g; });
  return out;
}

enum class CostRule { Scaling, Exact, AtMost };
enum class StageRule { None, CoefficientDegree, Cost };

struct BlockRequest {
  CostRule rule = CostRule::Scaling;
  Sigma delta{};  // Scaling
  int cost = 0;   // Exact / AtMost
  std::vector<BaseExp> coefficients;
  bool flat = false;  // scaling degree includes -mu
  int wmin = 1, wmax = 1;
  bool fields_only = false;
  StageRule stage = StageRule::None;
};

struct Block {
  std::map<PG, std::vector<Monomial>> basis;
  std::map<PG, std::vector<int>> stage;
  std::map<PG, std::map<Monomial, int>> index;

  int dim() const {
    int d = 0;
    for (const auto& [k, v] : basis) d += static_cast<int>(v.size());
    return d;
  }
  int size(const PG& k) const {
    auto it = basis.find(k);
    return it == basis.end() ? 0 : static_cast<int>(it->second.size());
  }
  int find(const PG& k, const Monomial& m) const {
    auto it = index.find(k);
    if (it == index.end()) return -1;
    auto jt = it->second.find(m);
    return jt == it->second.end() ? -1 : jt->second;
  }
};

Block build_block(const FieldBundleSpec& spec, const BlockRequest& req) {
  const int n = spec.n();
  Block b;

  struct Target {
    std::vector<int> J;
    BaseExp e;
    Sigma cost;
    int total;
  };
  std::vector<Target> targets;
  int max_cost = 0;
  for (int p = 0; p <= n; ++p)
    for (const auto& J : subsets(n, p))
      for (const auto& e : req.coefficients) {
        Target t{J, e, {}, 0};
        if (req.rule == CostRule::Scaling) {
          bool ok = true;
          for (int j = 0; j < n; ++j) {
            int c = req.delta[static_cast<std::size_t>(j)] + (std::find(J.begin(), J.end(), j) != J.end() ? 1 : 0) +
                    (req.flat ? e[static_cast<std::size_t>(j)] : 0);
            if (c < 0) ok = false;
            t.cost[static_cast<std::size_t>(j)] = c;
            t.total += c;
          }
          if (!ok) continue;
        } else {
          t.total = req.cost;
        }
        max_cost = std::max(max_cost, t.total);
        targets.push_back(t);
      }
  const auto vars = jet_variables(spec, max_cost, req.fields_only);

  std::vector<Gen> cur;
  for (const auto& t : targets) {
    std::vector<Gen> head;
    for (int j : t.J) head.push_back(FieldBundleSpec::dx(j));
    const int p = static_cast<int>(t.J.size());
    int coeff_degree = 0;
    for (int j = 0; j < n; ++j) coeff_degree += t.e[static_cast<std::size_t>(j)];

    auto emit = [&](int ghost, int used) {
      Monomial m;
      m.base = t.e;
      m.gens = head;
      m.gens.insert(m.gens.end(), cur.begin(), cur.end());
      PG key{p, ghost};
      auto& idx = b.index[key];
      if (idx.count(m)) return;
      idx.emplace(m, static_cast<int>(b.basis[key].size()));
      b.basis[key].push_back(m);
      int st = 0;
      if (req.stage == StageRule::CoefficientDegree) st = coeff_degree;
      if (req.stage == StageRule::Cost) st = used;
      b.stage[key].push_back(st);
    };

    auto rec = [&](auto&& self, std::size_t start, Sigma rem, int left, int w, int ghost) -> void {
      bool complete = req.rule == CostRule::AtMost ? true : left == 0;
      if (w >= req.wmin && complete) emit(ghost, t.total - left);
      if (w == req.wmax) return;
      for (std::size_t i = start; i < vars.size(); ++i) {
        const VarInfo& v = vars[i];
        if (v.total > left) continue;
        if (req.rule == CostRule::Scaling) {
          bool fits = true;
          for (int j = 0; j < n; ++j)
            if (v.cost[static_cast<std::size_t>(j)] > rem[static_cast<std::size_t>(j)]) fits = false;
          if (!fits) continue;
        }
        Sigma r2 = rem;
        for (int j = 0; j < n; ++j) r2[static_cast<std::size_t>(j)] -= v.cost[static_cast<std::size_t>(j)];
        cur.push_back(v.g);
        self(self, v.odd ? i + 1 : i, r2, left - v.total, w + 1, ghost + v.ghost);
        cur.pop_back();
      }
    };
    rec(rec, 0, t.cost, t.total, 0, 0);
  }
  return b;
}

// ------------------------------------------------------------- operators

struct BlockOps {
  std::map<PG, gla::SparseMatrix> s, h;  // s: (p,g) -> (p,g+1); h: (p,g) -> (p+1,g)
};

std::vector<int> columns_up_to(const Block& b, const PG& k, int stage_max) {
  std::vector<int> out;
  auto it = b.stage.find(k);
  if (it == b.stage.end()) return out;
  for (int j = 0; j < static_cast<int>(it->second.size()); ++j)
    if (stage_max < 0 || it->second[static_cast<std::size_t>(j)] <= stage_max) out.push_back(j);
  return out;
}

std::vector<int> rows_above(const Block& b, const PG& k, int stage_max) {
  std::vector<int> out;
  if (stage_max < 0) return out;
  auto it = b.stage.find(k);
  if (it == b.stage.end()) return out;
  for (int j = 0; j < static_cast<int>(it->second.size()); ++j)
    if (it->second[static_cast<std::size_t>(j)] > stage_max) out.push_back(j);
  return out;
}

// Images of the sources with stage <= kb (all when kb < 0). Terms above the
// weight bound are dropped (quotient); any other term must lie in the block.
BlockOps block_ops(const FieldBundleSpec& spec, const Block& b, Prolongation* S, bool with_h, int wmax, int kb) {
  BlockOps ops;
  auto image_into = [&](const JetPoly& f, const PG& target, int j, gla::SparseMatrix& M) {
    for (const auto& [m, c] : f.terms()) {
      if (grading(spec, m).weight > wmax) continue;
      int i = b.find(target, m);
      if (i < 0) throw IntegrityError("an image left its block: " + spec.text(JetPoly::monomial(m, c)));
      M.add(i, j, c);
    }
  };
  for (const auto& [key, monos] : b.basis) {
    const auto [p, g] = key;
    const PG sk{p, g + 1}, hk{p + 1, g};
    gla::SparseMatrix Ms(b.size(sk), b.size(key));
    gla::SparseMatrix Mh(b.size(hk), b.size(key));
    for (int j : columns_up_to(b, key, kb)) {
      JetPoly x = JetPoly::monomial(monos[static_cast<std::size_t>(j)]);
      if (S) image_into((*S)(x), sk, j, Ms);
      if (with_h) image_into(d_h(spec, x), hk, j, Mh);
    }
    ops.s.emplace(key, std::move(Ms));
    ops.h.emplace(key, std::move(Mh));
  }
  return ops;
}

gla::SparseMatrix op(const std::map<PG, gla::SparseMatrix>& m, const PG& k, int rows, int cols) {
  auto it = m.find(k);
  return it == m.end() ? gla::SparseMatrix(rows, cols) : it->second;
}

gla::SparseMatrix keep_rows(const gla::SparseMatrix& M, const std::vector<int>& rows) {
  std::vector<int> where(static_cast<std::size_t>(M.rows()), -1);
  for (std::size_t i = 0; i < rows.size(); ++i) where[static_cast<std::size_t>(rows[i])] = static_cast<int>(i);
  gla::SparseMatrix out(static_cast<int>(rows.size()), M.cols());
  for (int j = 0; j < M.cols(); ++j)
    for (const auto& [i, v] : M.column(j))
      if (where[static_cast<std::size_t>(i)] >= 0) out.add(where[static_cast<std::size_t>(i)], j, v);
  return out;
}

int rank_of(const gla::SparseMatrix& M) { return M.cols() == 0 || M.rows() == 0 ? 0 : gla::rank(M); }

// dim(im M restricted to the given columns, intersected with the coordinate
// subspace of stage <= kc).
int image_inside(const gla::SparseMatrix& M, const std::vector<int>& outside) {
  return rank_of(M) - rank_of(keep_rows(M, outside));
}

// s^2, h^2 and sh + hs vanish on every column whose images are all computed.
void check_block(const Block& b, const BlockOps& ops, int kb, bool with_s, bool with_h) {
  auto computed = [&](const PG& k) {
    std::vector<char> c(static_cast<std::size_t>(b.size(k)), 0);
    for (int j : columns_up_to(b, k, kb)) c[static_cast<std::size_t>(j)] = 1;
    return c;
  };
  auto check = [&](const gla::SparseMatrix& first, const PG& mid, const gla::SparseMatrix& second, const PG& src,
                   const gla::SparseMatrix* first2, const PG* mid2, const gla::SparseMatrix* second2, const char* what) {
    auto cm = computed(mid);
    auto cs = computed(src);
    gla::SparseMatrix prod = second * first;
    std::vector<char> cm2;
    if (first2) {
      prod = prod + (*second2) * (*first2);
      cm2 = computed(*mid2);
    }
    for (int j = 0; j < prod.cols(); ++j) {
      if (!cs[static_cast<std::size_t>(j)]) continue;
      bool inner = true;
      for (const auto& [i, v] : first.column(j)) inner &= cm[static_cast<std::size_t>(i)] != 0;
      if (first2)
        for (const auto& [i, v] : first2->column(j)) inner &= cm2[static_cast<std::size_t>(i)] != 0;
      if (inner && !prod.column(j).empty())
        throw IntegrityError(std::string(what) + " fails at form degree " + std::to_string(src.first) + ", ghost " +
                             std::to_string(src.second));
    }
  };
  for (const auto& [key, monos] : b.basis) {
    const auto [p, g] = key;
    const PG sk{p, g + 1}, hk{p + 1, g}, hsk{p + 1, g + 1};
    const int nk = b.size(key);
    gla::SparseMatrix s1 = op(ops.s, key, b.size(sk), nk);
    gla::SparseMatrix h1 = op(ops.h, key, b.size(hk), nk);
    if (with_s) check(s1, sk, op(ops.s, sk, b.size({p, g + 2}), b.size(sk)), key, nullptr, nullptr, nullptr, "s^2 = 0");
    if (with_h) check(h1, hk, op(ops.h, hk, b.size({p + 2, g}), b.size(hk)), key, nullptr, nullptr, nullptr, "d_h^2 = 0");
    if (with_s && with_h) {
      gla::SparseMatrix hs = op(ops.h, sk, b.size(hsk), b.size(sk));
      gla::SparseMatrix sh = op(ops.s, hk, b.size(hsk), b.size(hk));
      check(s1, sk, hs, key, &h1, &hk, &sh, "s d_h + d_h s = 0");
    }
  }
}

// ------------------------------------------------------ staged cohomology

struct BlockResult {
  gla::GradedDims iterated, total;
  std::map<PG, std::int64_t> rows;
  bool spectral_consistent = true;
  int dim = 0;
};

struct StagePlan {
  int kc = -1;  // -1: no staging
  int kb = -1;
};

std::pair<int, int> ghost_range(const Block& b) {
  int lo = 0, hi = -1;
  bool first = true;
  for (const auto& [k, v] : b.basis) {
    if (first) lo = hi = k.second;
    lo = std::min(lo, k.second);
    hi = std::max(hi, k.second);
    first = false;
  }
  return {lo, hi};
}

BlockResult staged_cohomology(const Block& b, const BlockOps& ops, int n, const StagePlan& plan) {
  BlockResult r;
  r.dim = b.dim();
  if (r.dim == 0) return r;
  const auto [glo, ghi] = ghost_range(b);

  auto S = [&](int p, int g) { return op(ops.s, {p, g}, b.size({p, g + 1}), b.size({p, g})); };
  auto H = [&](int p, int g) { return op(ops.h, {p, g}, b.size({p + 1, g}), b.size({p, g})); };
  auto cols = [&](int p, int g, int k) { return columns_up_to(b, {p, g}, k); };

  // rows: H^p(d_h) for p < n
  for (int p = 0; p < n; ++p)
    for (int g = glo; g <= ghi; ++g) {
      if (b.size({p, g}) == 0) continue;
      auto cc = cols(p, g, plan.kc);
      std::int64_t z = static_cast<std::int64_t>(cc.size()) - rank_of(H(p, g).select_columns(cc));
      std::int64_t bd = 0;
      if (p > 0) bd = image_inside(H(p - 1, g).select_columns(cols(p - 1, g, plan.kb)), rows_above(b, {p, g}, plan.kc));
      if (z - bd != 0) r.rows[{p, g}] = z - bd;
    }

  // iterated: H^g(H^n(d_h), s)
  for (int g = glo; g <= ghi; ++g) {
    if (b.size({n, g}) == 0) continue;
    auto cc = cols(n, g, plan.kc);
    gla::SparseMatrix Bnext = H(n - 1, g + 1).select_columns(cols(n - 1, g + 1, plan.kb));
    gla::SparseMatrix Sc = S(n, g).select_columns(cc);
    std::int64_t z = static_cast<std::int64_t>(cc.size()) - (rank_of(Sc.hconcat(Bnext)) - rank_of(Bnext));
    gla::SparseMatrix Sprev = S(n, g - 1).select_columns(cols(n, g - 1, plan.kb));
    gla::SparseMatrix Bhere = H(n - 1, g).select_columns(cols(n - 1, g, plan.kb));
    std::int64_t bd = image_inside(Sprev.hconcat(Bhere), rows_above(b, {n, g}, plan.kc));
    if (z - bd != 0) r.iterated[g + n] = z - bd;
  }

  // total complex: T^t = sum_{p+g=t}, components ordered by p
  auto layout = [&](int t) {
    std::vector<std::pair<int, int>> parts;  // (p, offset)
    int off = 0;
    for (int p = 0; p <= n; ++p) {
      parts.push_back({p, off});
      off += b.size({p, t - p});
    }
    return std::make_pair(parts, off);
  };
  auto total_matrix = [&](int t) {
    auto [src, ns] = layout(t);
    auto [dst, nd] = layout(t + 1);
    gla::SparseMatrix D(nd, ns);
    for (auto [p, off] : src) {
      const int g = t - p;
      gla::SparseMatrix s1 = S(p, g), h1 = H(p, g);
      for (int j = 0; j < s1.cols(); ++j) {
        for (const auto& [i, v] : s1.column(j)) D.add(dst[static_cast<std::size_t>(p)].second + i, off + j, v);
        if (p < n)
          for (const auto& [i, v] : h1.column(j)) D.add(dst[static_cast<std::size_t>(p + 1)].second + i, off + j, v);
      }
    }
    return D;
  };
  auto total_cols = [&](int t, int k, bool above) {
    std::vector<int> out;
    auto [parts, sz] = layout(t);
    for (auto [p, off] : parts) {
      auto part = above ? rows_above(b, {p, t - p}, k) : columns_up_to(b, {p, t - p}, k);
      for (int j : part) out.push_back(off + j);
    }
    return out;
  };
  for (int t = glo; t <= ghi + n; ++t) {
    auto cc = total_cols(t, plan.kc, false);
    if (cc.empty()) continue;
    std::int64_t z = static_cast<std::int64_t>(cc.size()) - rank_of(total_matrix(t).select_columns(cc));
    std::int64_t bd = image_inside(total_matrix(t - 1).select_columns(total_cols(t - 1, plan.kb, false)),
                                   plan.kc < 0 ? std::vector<int>{} : total_cols(t, plan.kc, true));
    if (z - bd != 0) r.total[t] = z - bd;
  }

  // exact blocks: cross-check against the generic bicomplex engine
  if (plan.kc < 0) {
    gla::Bicomplex bc(0, n, glo, ghi);
    for (int p = 0; p <= n; ++p)
      for (int g = glo; g <= ghi; ++g) {
        bc.set_dim(p, g, b.size({p, g}));
      }
    for (int p = 0; p <= n; ++p)
      for (int g = glo; g <= ghi; ++g) {
        if (p < n) bc.set_d1(p, g, H(p, g));
        if (g < ghi) bc.set_d2(p, g, S(p, g));
      }
    auto pages = gla::spectral_pages(bc, gla::Filtration::Second);
    bool ok = gla::trim(pages.e2_total()) == r.total && r.iterated == r.total;
    for (const auto& [pq, d] : pages.e1)
      if (pq.first < n && d != 0) ok = ok && r.rows.count({pq.first, pq.second}) && r.rows.at({pq.first, pq.second}) == d;
    for (const auto& [pg, d] : r.rows) ok = ok && pages.e1.count(pg) && pages.e1.at(pg) == d;
    r.spectral_consistent = ok;
  }
  return r;
}

struct Task {
  BlockRequest req;
  StagePlan plan;
};

std::vector<Sigma> box(int n, int lo, int hi) {
  std::vector<Sigma> out;
  Sigma d{};
  auto rec = [&](auto&& self, int j) -> void {
    if (j == n) {
      out.push_back(d);
      return;
    }
    for (int v = lo; v <= hi; ++v) {
      d[static_cast<std::size_t>(j)] = v;
      self(self, j + 1);
    }
    d[static_cast<std::size_t>(j)] = 0;
  };
  rec(rec, 0);
  return out;
}

std::vector<PG> weight_ranges(const LInfinityStructure& L, int Lmax) {
  std::vector<PG> out;
  if (L.weight_graded())
    for (int w = 1; w <= Lmax; ++w) out.push_back({w, w});
  else
    out.push_back({1, Lmax});
  return out;
}

int thread_count(int jobs) { return jobs > 0 ? jobs : omp_get_max_threads(); }

// Keeps the terms of the given parity, so that a random field is a homogeneous derivation.
JetPoly parity_part(const JetPoly& f, bool odd) {
  JetPoly out;
  for (const auto& [m, c] : f.terms()) {
    bool p = false;
    for (Gen g : m.gens) p ^= is_odd(g);
    if (p == odd) out.add_term(m, c);
  }
  return out;
}

}  // namespace

// --------------------------------------------------------- bicomplex dims

BicomplexDims bicomplex_dims(const VerificationCase& c, const Rung& r, int jobs) {
  const FieldBundleSpec spec = c.bundle_at(r);
  if (spec.twist()) throw StructuralError("the bicomplex is assembled for untwisted targets");
  const int n = c.n;
  BicomplexDims out;
  if (spec.target().dim() == 0) return out;

  std::vector<Task> tasks;
  for (auto [wmin, wmax] : weight_ranges(c.target, r.Lmax)) {
    if (c.base_kind == BaseKind::TorusFourier) {
      for (const auto& d : box(n, -1, r.K)) {
        Task t;
        t.req.rule = CostRule::Scaling;
        t.req.delta = d;
        t.req.coefficients = {BaseExp{}};
        t.req.wmin = wmin;
        t.req.wmax = wmax;
        tasks.push_back(t);
      }
      for (const auto& k : box(n, -r.base, r.base)) {
        if (k == Sigma{}) continue;
        Task t;
        t.req.rule = CostRule::AtMost;
        t.req.cost = r.K + 2;
        t.req.coefficients = {k};
        t.req.wmin = wmin;
        t.req.wmax = wmax;
        t.req.stage = StageRule::Cost;
        t.plan = {r.K, r.K + 1};
        tasks.push_back(t);
      }
    } else {
      BaseModel wide = BaseModel::flat(n, r.base + 1);
      for (const auto& d : box(n, -1 - r.base, r.K)) {
        Task t;
        t.req.rule = CostRule::Scaling;
        t.req.delta = d;
        t.req.coefficients = coefficient_basis(wide);
        t.req.flat = true;
        t.req.wmin = wmin;
        t.req.wmax = wmax;
        t.req.stage = StageRule::CoefficientDegree;
        t.plan = {r.base, r.base + 1};
        tasks.push_back(t);
      }
    }
  }

  const EvolutionaryField s_field = brst_s(spec);
  std::vector<BlockResult> results(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());
#pragma omp parallel num_threads(thread_count(jobs))
  {
    Prolongation S(spec, s_field);
#pragma omp for schedule(dynamic)
    for (int i = 0; i < static_cast<int>(tasks.size()); ++i) {
      try {
        const Task& t = tasks[static_cast<std::size_t>(i)];
        Block b = build_block(spec, t.req);
        BlockOps ops = block_ops(spec, b, &S, true, t.req.wmax, t.plan.kb);
        check_block(b, ops, t.plan.kb, true, true);
        results[static_cast<std::size_t>(i)] = staged_cohomology(b, ops, n, t.plan);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  for (const auto& br : results) {
    for (auto [t, d] : br.iterated) out.iterated[t] += d;
    for (auto [t, d] : br.total) out.total[t] += d;
    for (auto [k, d] : br.rows) out.rows_below_top[k] += d;
    out.spectral_consistent = out.spectral_consistent && br.spectral_consistent;
    out.largest_block = std::max(out.largest_block, br.dim);
  }
  out.blocks = static_cast<int>(tasks.size());
  out.iterated = gla::trim(out.iterated);
  out.total = gla::trim(out.total);
  return out;
}

// ------------------------------------------------------------ comparisons

namespace {

std::int64_t value(const gla::GradedDims& d, int k) {
  auto it = d.find(k);
  return it == d.end() ? 0 : it->second;
}

Verdict combine(bool any_mismatch, bool any_compared, bool any_rows) {
  if (any_mismatch) return Verdict::Fail;
  if (any_compared || !any_rows) return Verdict::Pass;
  return Verdict::Inconclusive;
}

}  // namespace

Comparison compare_ladders(const std::vector<gla::GradedDims>& lhs, const std::vector<gla::GradedDims>& rhs,
                           const std::set<int>& extra_rhs_unstable) {
  Comparison out;
  if (lhs.empty() || rhs.empty()) return out;
  std::set<int> degrees;
  auto collect = [&](const std::vector<gla::GradedDims>& v) {
    for (std::size_t i = v.size() >= 2 ? v.size() - 2 : 0; i < v.size(); ++i)
      for (auto [k, d] : v[i])
        if (d != 0) degrees.insert(k);
  };
  collect(lhs);
  collect(rhs);
  bool mismatch = false, compared = false;
  for (int k : degrees) {
    ComparisonRow row;
    row.degree = k;
    row.lhs = value(lhs.back(), k);
    row.rhs = value(rhs.back(), k);
    row.lhs_stable = lhs.size() >= 2 && value(lhs[lhs.size() - 2], k) == row.lhs;
    row.rhs_stable = rhs.size() >= 2 && value(rhs[rhs.size() - 2], k) == row.rhs && !extra_rhs_unstable.count(k);
    row.match = row.lhs_stable && row.rhs_stable && row.lhs == row.rhs;
    if (row.lhs_stable && row.rhs_stable) {
      compared = true;
      mismatch = mismatch || !row.match;
    }
    out.rows.push_back(row);
  }
  out.verdict = combine(mismatch, compared, !out.rows.empty());
  return out;
}

PropVerdict verify_prop(const std::vector<BicomplexDims>& per_rung) {
  PropVerdict v;
  std::vector<gla::GradedDims> it, tot;
  for (const auto& d : per_rung) {
    it.push_back(d.iterated);
    tot.push_back(d.total);
  }
  v.table = compare_ladders(it, tot);
  // concentration: rows cohomology below the top degree must vanish; stable
  // nonzero entries refute it, unstable ones leave it open
  bool refuted = false, open = false;
  if (!per_rung.empty()) {
    const auto& last = per_rung.back().rows_below_top;
    for (const auto& [k, d] : last) {
      bool stable = per_rung.size() >= 2 && per_rung[per_rung.size() - 2].rows_below_top.count(k) &&
                    per_rung[per_rung.size() - 2].rows_below_top.at(k) == d;
      (stable ? refuted : open) = true;
    }
  }
  v.e1_concentrated = !refuted && !open;
  v.spectral_consistent = std::all_of(per_rung.begin(), per_rung.end(), [](const BicomplexDims& d) { return d.spectral_consistent; });
  if (v.table.verdict == Verdict::Fail || refuted || !v.spectral_consistent)
    v.verdict = Verdict::Fail;
  else if (v.table.verdict == Verdict::Inconclusive || open)
    v.verdict = Verdict::Inconclusive;
  else
    v.verdict = Verdict::Pass;
  return v;
}

TheoremVerdict verify_theorem(const VerificationCase& c, const std::vector<BicomplexDims>& per_rung) {
  TheoremVerdict v;
  std::vector<gla::GradedDims> lhs, rhs;
  std::set<int> unstable;
  for (std::size_t i = 0; i < c.ladder.size() && i < per_rung.size(); ++i) {
    const Rung& r = c.ladder[i];
    lhs.push_back(per_rung[i].iterated);
    auto base = base_cohomology(c.base_at(r));
    auto target = target_cohomology(c.target, {r.Lmax}).total;
    rhs.push_back(gla::trim(gla::kunneth(base.dims(), target.dims())));
    if (i + 1 == std::min(c.ladder.size(), per_rung.size())) {
      v.base = gla::trim(base.dims());
      v.target = gla::trim(target.dims());
      for (const auto& [bi, be] : base.degrees)
        for (const auto& [tj, te] : target.degrees)
          if (be.stability != gla::Stability::Stable || te.stability != gla::Stability::Stable) unstable.insert(bi + tj);
    }
  }
  v.table = compare_ladders(lhs, rhs, unstable);
  v.verdict = v.table.verdict;
  return v;
}

// --------------------------------------------------------------- row lemma

namespace {

LInfinityStructure even_fields(int rank) {
  std::vector<TargetBasis> basis;
  for (int a = 0; a < rank; ++a) basis.push_back({"a" + std::to_string(a + 1), 0});
  return LInfinityStructure(basis, 1);
}

// Count of quadratic classes u^a D^nu u^b modulo integration by parts: the
// fixed space of E_ab -> (-1)^{|nu|} E_ba, as the rank of 1 + T.
std::int64_t adjoint_fixed_count(int rank, int nu_total) {
  const int N = rank * rank;
  gla::SparseMatrix M(N, N);
  const Rational sign = nu_total % 2 == 0 ? 1 : -1;
  for (int a = 0; a < rank; ++a)
    for (int b = 0; b < rank; ++b) {
      int col = a * rank + b;
      M.add(col, col, 1);
      M.add(b * rank + a, col, sign);
    }
  return gla::rank_reference(M);
}

}  // namespace

RowLemmaVerdict verify_row_lemma(int n, int rank, int l, BaseKind base, const std::vector<Rung>& ladder, int jobs) {
  RowLemmaVerdict v;
  v.n = n;
  v.rank = rank;
  v.l = l;
  v.base = base;
  if (l < 1 || l > 2) throw StructuralError("the row lemma is checked for l = 1, 2");
  if (base == BaseKind::FlatPoly && l != 1) throw StructuralError("the FlatPoly row lemma is checked for l = 1");
  if (base == BaseKind::External) throw StructuralError("the row lemma needs a coordinate base model");
  if (ladder.empty()) return v;
  const bool flat = base == BaseKind::FlatPoly;

  using Key = std::pair<Sigma, int>;
  std::vector<std::map<Key, std::int64_t>> per_rung;
  std::vector<std::pair<int, int>> windows;
  for (const Rung& r : ladder) {
    BaseModel model = flat ? BaseModel::flat(n, r.base + 1) : BaseModel::torus(n, 0);
    FieldBundleSpec spec(model, even_fields(rank));
    const int lo = flat ? -1 - r.base : -1;
    windows.push_back({lo, r.K});
    auto deltas = box(n, lo, r.K);
    std::vector<std::map<int, std::int64_t>> res(deltas.size());
    std::vector<std::exception_ptr> errors(deltas.size());
#pragma omp parallel for schedule(dynamic) num_threads(thread_count(jobs))
    for (int i = 0; i < static_cast<int>(deltas.size()); ++i) {
      try {
        BlockRequest req;
        req.rule = CostRule::Scaling;
        req.delta = deltas[static_cast<std::size_t>(i)];
        req.coefficients = flat ? coefficient_basis(model) : std::vector<BaseExp>{BaseExp{}};
        req.flat = flat;
        req.wmin = req.wmax = l;
        req.fields_only = true;
        req.stage = flat ? StageRule::CoefficientDegree : StageRule::None;
        StagePlan plan = flat ? StagePlan{r.base, r.base + 1} : StagePlan{};
        Block b = build_block(spec, req);
        BlockOps ops = block_ops(spec, b, nullptr, true, l, plan.kb);
        check_block(b, ops, plan.kb, false, true);
        for (int p = 0; p <= n; ++p) {
          if (b.size({p, 0}) == 0) continue;
          auto H = [&](int q) { return op(ops.h, {q, 0}, b.size({q + 1, 0}), b.size({q, 0})); };
          auto cc = columns_up_to(b, {p, 0}, plan.kc);
          std::int64_t z = static_cast<std::int64_t>(cc.size()) - (p < n ? rank_of(H(p).select_columns(cc)) : 0);
          std::int64_t bd = p == 0 ? 0 : image_inside(H(p - 1).select_columns(columns_up_to(b, {p - 1, 0}, plan.kb)),
                                                      rows_above(b, {p, 0}, plan.kc));
          res[static_cast<std::size_t>(i)][p] = z - bd;
        }
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
    std::map<Key, std::int64_t> table;
    for (std::size_t i = 0; i < deltas.size(); ++i)
      for (int p = 0; p <= n; ++p) table[{deltas[i], p}] = res[i].count(p) ? res[i].at(p) : 0;
    per_rung.push_back(std::move(table));
  }

  const Rung& last = ladder.back();
  auto oracle = [&](const Sigma& d, int p) -> std::int64_t {
    if (p < n) return 0;
    if (l == 1) {
      int mu = 0;
      for (int j = 0; j < n; ++j) {
        int m = -1 - d[static_cast<std::size_t>(j)];
        if (m < 0 || (!flat && m != 0)) return 0;
        mu += m;
      }
      return mu <= (flat ? last.base : 0) ? rank : 0;
    }
    int nu = 0;
    for (int j = 0; j < n; ++j) {
      if (d[static_cast<std::size_t>(j)] + 1 < 0) return 0;
      nu += d[static_cast<std::size_t>(j)] + 1;
    }
    return adjoint_fixed_count(rank, nu);
  };

  bool mismatch = false, compared = false;
  for (const auto& [key, dim] : per_rung.back()) {
    const auto& [d, p] = key;
    RowLemmaEntry e;
    e.delta = d;
    e.p = p;
    e.dim = dim;
    e.oracle = oracle(d, p);
    if (per_rung.size() >= 2) {
      const auto& prev = per_rung[per_rung.size() - 2];
      auto it = prev.find(key);
      e.stable = it != prev.end() && it->second == dim;
    }
    e.match = e.stable && e.dim == e.oracle;
    if (e.stable) {
      compared = true;
      mismatch = mismatch || !e.match;
      if (p == n) {
        v.top_dim += e.dim;
        v.top_oracle += e.oracle;
      }
    }
    if (e.dim != 0 || e.oracle != 0) v.entries.push_back(e);
  }
  v.verdict = mismatch ? Verdict::Fail : compared ? Verdict::Pass : Verdict::Inconclusive;
  return v;
}

// ------------------------------------------------------- column resolution

gla::GradedDims symmetric_power_dims(const LInfinityStructure& L, int l) {
  std::vector<int> degs;
  for (const auto& b : L.basis()) degs.push_back(b.degree);
  gla::GradedDims out;
  std::function<void(std::size_t, int, int)> rec = [&](std::size_t i, int left, int deg) {
    if (left == 0) {
      out[deg] += 1;
      return;
    }
    if (i == degs.size()) return;
    const int max = degs[i] % 2 != 0 ? 1 : left;
    for (int k = 0; k <= std::min(max, left); ++k) rec(i + 1, left - k, deg + k * degs[i]);
  };
  rec(0, l, 0);
  return gla::trim(out);
}

ColumnVerdict verify_column_resolution(const VerificationCase& c, int jobs) {
  ColumnVerdict v;
  v.twisted = c.twist.has_value();
  if (c.ladder.empty()) return v;
  const int n = c.n;
  const auto coeffs = coefficient_basis(c.base_at(c.ladder.back()));

  using Key = std::tuple<int, int, int>;  // (p, weight, ghost)
  std::vector<std::map<Key, std::int64_t>> per_rung;
  bool concentrated = true;
  for (const Rung& r : c.ladder) {
    const FieldBundleSpec spec = c.bundle_at(r);
    const EvolutionaryField s_field = brst_s(spec, BrstPart::DeRham);
    std::vector<Task> tasks;
    for (const auto& e : coeffs)
      for (int w = 1; w <= r.Lmax; ++w) {
        if (v.twisted) {
          Task t;
          t.req.rule = CostRule::AtMost;
          t.req.cost = r.K;
          t.req.coefficients = {e};
          t.req.wmin = t.req.wmax = w;
          tasks.push_back(t);
        } else {
          for (int cost = 0; cost <= r.K; ++cost) {
            Task t;
            t.req.rule = CostRule::Exact;
            t.req.cost = cost;
            t.req.coefficients = {e};
            t.req.wmin = t.req.wmax = w;
            tasks.push_back(t);
          }
        }
      }
    std::vector<std::map<Key, std::int64_t>> res(tasks.size());
    std::vector<char> stray(tasks.size(), 0);
    std::vector<std::exception_ptr> errors(tasks.size());
#pragma omp parallel num_threads(thread_count(jobs))
    {
      Prolongation S(spec, s_field);
#pragma omp for schedule(dynamic)
      for (int i = 0; i < static_cast<int>(tasks.size()); ++i) {
        try {
          const Task& t = tasks[static_cast<std::size_t>(i)];
          Block b = build_block(spec, t.req);
          BlockOps ops = block_ops(spec, b, &S, false, t.req.wmax, -1);
          check_block(b, ops, -1, true, false);
          for (const auto& [key, monos] : b.basis) {
            const auto [p, g] = key;
            const int dim = static_cast<int>(monos.size());
            std::int64_t h = dim - rank_of(op(ops.s, key, b.size({p, g + 1}), dim)) -
                             rank_of(op(ops.s, {p, g - 1}, dim, b.size({p, g - 1})));
            if (h != 0) {
              res[static_cast<std::size_t>(i)][{p, t.req.wmax, g}] += h;
              if (t.req.rule == CostRule::Exact && t.req.cost > 0) stray[static_cast<std::size_t>(i)] = 1;
            }
          }
        } catch (...) {
          errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
      }
    }
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
    std::map<Key, std::int64_t> table;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      for (auto [k, d] : res[i]) table[k] += d;
      if (stray[i] && &r == &c.ladder.back()) concentrated = false;
    }
    per_rung.push_back(std::move(table));
  }

  // oracle: dx^J x coefficients x Sym^w(L*) in internal degree = ghost
  const Rung& last = c.ladder.back();
  std::map<Key, std::int64_t> oracle;
  for (int w = 1; w <= last.Lmax; ++w)
    for (auto [deg, d] : symmetric_power_dims(c.target, w))
      for (int p = 0; p <= n; ++p)
        oracle[{p, w, deg}] = d * static_cast<std::int64_t>(subsets(n, p).size()) * static_cast<std::int64_t>(coeffs.size());

  std::set<Key> keys;
  for (const auto& [k, d] : per_rung.back()) keys.insert(k);
  for (const auto& [k, d] : oracle) keys.insert(k);
  bool mismatch = false, compared = false;
  for (const auto& k : keys) {
    ColumnEntry e;
    std::tie(e.p, e.weight, e.ghost) = k;
    e.dim = per_rung.back().count(k) ? per_rung.back().at(k) : 0;
    e.oracle = oracle.count(k) ? oracle.at(k) : 0;
    if (per_rung.size() >= 2) {
      const auto& prev = per_rung[per_rung.size() - 2];
      const int prev_L = c.ladder[c.ladder.size() - 2].Lmax;
      e.stable = e.weight <= prev_L && (prev.count(k) ? prev.at(k) : 0) == e.dim;
    }
    e.match = e.stable && e.dim == e.oracle;
    if (e.stable) {
      compared = true;
      mismatch = mismatch || !e.match;
    }
    v.entries.push_back(e);
  }
  v.concentrated = !v.twisted && concentrated;
  if (mismatch || (!v.twisted && !concentrated))
    v.verdict = Verdict::Fail;
  else
    v.verdict = compared || v.entries.empty() ? Verdict::Pass : Verdict::Inconclusive;
  return v;
}

// -------------------------------------------------------------- identities

IdentityReport check_identities(const FieldBundleSpec& spec, int samples, std::uint64_t seed) {
  IdentityReport rep;
  std::mt19937_64 rng(seed);
  Prolongation S(spec, brst_s(spec));
  RandomJetOptions with_cartan;
  with_cartan.cartan = true;
  RandomJetOptions plain;
  std::uniform_int_distribution<int> dir(0, spec.n() - 1);
  for (int k = 0; k < samples; ++k) {
    ++rep.samples;
    JetPoly w = random_jet_poly(spec, rng, with_cartan);
    JetPoly hw = d_h(spec, w), vw = d_v(spec, w);
    if (!d_h(spec, hw).is_zero()) ++rep.dh_squared;
    if (!d_v(spec, vw).is_zero()) ++rep.dv_squared;
    if (!(d_h(spec, vw) + d_v(spec, hw)).is_zero()) ++rep.dh_dv;
    JetPoly f = random_jet_poly(spec, rng, plain);
    JetPoly sf = S(f);
    if (!S(sf).is_zero()) ++rep.s_squared;
    if (!(S(d_h(spec, f)) + d_h(spec, sf)).is_zero()) ++rep.s_dh;

    ++rep.prolong_samples;
    EvolutionaryField e;
    e.odd = k % 2 == 1;
    for (int q = 0; q < spec.fiber_count(); ++q) {
      const bool odd = is_odd(spec.u(spec.fiber_I(q), spec.fiber_a(q))) != e.odd;
      e.phi.push_back(parity_part(random_jet_poly(spec, rng, {3, 2, 1, 0}), odd));
    }
    JetPoly g = random_jet_poly(spec, rng, with_cartan);
    const int i = dir(rng);
    if (!(prolong(spec, e, total_derivative(spec, i, g)) == total_derivative(spec, i, prolong(spec, e, g))))
      ++rep.prolong_failures;

    ++rep.pullback_samples;
    Section sec = random_section(spec, rng);
    JetPoly om = random_jet_poly(spec, rng, with_cartan);
    if (!(pullback_on_section(spec, d_h(spec, om), sec).form == base_d(spec, pullback_on_section(spec, om, sec).form)))
      ++rep.pullback_failures;
  }
  return rep;
}

}  // namespace aksz
