#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "aksz/errors.hpp"
#include "aksz/gla/rank.hpp"
#include "aksz/linfty.hpp"
#include "support/generators.hpp"

using namespace aksz;

namespace {

using Tensor3 = std::vector<std::vector<std::vector<Rational>>>;

Tensor3 zeros(int n) {
  return Tensor3(static_cast<std::size_t>(n), std::vector<std::vector<Rational>>(static_cast<std::size_t>(n), std::vector<Rational>(static_cast<std::size_t>(n), Rational(0))));
}

// [e1, e2] = e2
LInfinityStructure affine_line() {
  LInfinityStructure L({{"1", 1}, {"2", 1}}, 2);
  Tensor3 f = zeros(2);
  f[1][0][1] = 1;
  f[1][1][0] = -1;
  L.set_lie_structure(f);
  return L;
}

// sl2 in the basis (h, e, f); optionally with [h, f] = +2f instead of -2f
Tensor3 sl2(bool broken) {
  Tensor3 f = zeros(3);
  auto set = [&](int a, int b, int c, int v) {
    f[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)][static_cast<std::size_t>(c)] = v;
    f[static_cast<std::size_t>(a)][static_cast<std::size_t>(c)][static_cast<std::size_t>(b)] = -v;
  };
  set(1, 0, 1, 2);               // [h,e] = 2e
  set(2, 0, 2, broken ? 2 : -2);  // [h,f] = -2f
  set(0, 1, 2, 1);               // [e,f] = h
  return f;
}

// Jacobiator sum_cyc [[x_a,x_b],x_c] computed from the table alone.
bool jacobi_holds(const Tensor3& f) {
  const int n = static_cast<int>(f.size());
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int out = 0; out < n; ++out) {
          Rational s = 0;
          int idx[3] = {a, b, c};
          for (int r = 0; r < 3; ++r) {
            int x = idx[r], y = idx[(r + 1) % 3], z = idx[(r + 2) % 3];
            for (int m = 0; m < n; ++m)
              s += f[static_cast<std::size_t>(m)][static_cast<std::size_t>(x)][static_cast<std::size_t>(y)] *
                   f[static_cast<std::size_t>(out)][static_cast<std::size_t>(m)][static_cast<std::size_t>(z)];
          }
          if (s != 0) return false;
        }
  return true;
}

// Graded Sym^w count from per-degree generator counts, by brute-force
// enumeration of multisets (odd-degree generators at most once).
gla::GradedDims sym_count(const gla::GradedDims& gens, int w) {
  std::vector<int> degs;
  for (auto [d, k] : gens)
    for (int i = 0; i < k; ++i) degs.push_back(d);
  gla::GradedDims out;
  std::function<void(std::size_t, int, int)> rec = [&](std::size_t i, int left, int deg) {
    if (left == 0) {
      out[deg] += 1;
      return;
    }
    if (i == degs.size()) return;
    int max = (degs[i] % 2 != 0) ? 1 : left;
    for (int k = 0; k <= max; ++k) rec(i + 1, left - k, deg + k * degs[i]);
  };
  rec(0, w, 0);
  return gla::trim(out);
}

}  // namespace

TEST_CASE("brackets are degree checked") {
  LInfinityStructure L({{"x", 0}, {"y", 1}}, 2);
  CHECK_NOTHROW(L.add_bracket({1, 0, {1}, 1}));
  CHECK_THROWS_AS(L.add_bracket({1, 1, {0}, 1}), StructuralError);
  CHECK_THROWS_AS(L.add_bracket({3, 1, {0, 0, 0}, 1}), StructuralError);
  CHECK_THROWS_AS(L.add_bracket({2, 0, {1, 1}, 1}), StructuralError);  // c^y c^y = 0
  Tensor3 f = zeros(2);
  f[1][0][1] = 1;
  f[1][1][0] = 1;
  CHECK_THROWS_AS(affine_line().set_lie_structure(f), StructuralError);
}

TEST_CASE("nilpotency") {
  SUBCASE("abelian") {
    LInfinityStructure L({{"a", 1}, {"b", 2}}, 3);
    CHECK(check_nilpotency(L, 3).empty());
  }
  SUBCASE("two-dimensional Lie algebra") {
    Tensor3 f = zeros(2);
    f[1][0][1] = 1;
    f[1][1][0] = -1;
    CHECK(jacobi_holds(f));
    CHECK(check_nilpotency(affine_line(), 3).empty());
  }
  SUBCASE("sl2 and a broken copy") {
    CHECK(jacobi_holds(sl2(false)));
    CHECK_FALSE(jacobi_holds(sl2(true)));
    LInfinityStructure good({{"h", 1}, {"e", 1}, {"f", 1}}, 2);
    good.set_lie_structure(sl2(false));
    CHECK(check_nilpotency(good, 3).empty());
    LInfinityStructure bad({{"h", 1}, {"e", 1}, {"f", 1}}, 2);
    bad.set_lie_structure(sl2(true));
    auto v = check_nilpotency(bad, 3);
    REQUIRE(!v.empty());
    CHECK(v.front().arity == 3);
    CHECK(v.front().output == "h");
    CHECK(v.front().monomial == "c^h c^e c^f");
    // Q c^h = -c^e c^f, Q c^e = -2 c^h c^e and (broken) Q c^f = -2 c^h c^f give
    // Q^2 c^h = -(Q c^e) c^f + c^e (Q c^f) = 4 c^h c^e c^f
    CHECK(v.front().coefficient == 4);
    CHECK(check_nilpotency(bad, 2).empty());
    CHECK_THROWS_AS(ce_differential(bad, {2}), IntegrityError);
    CHECK_THROWS_AS(check_nilpotency(bad, 4), StructuralError);
  }
}

TEST_CASE("CE differential of the two-dimensional Lie algebra") {
  auto L = affine_line();
  CHECK(L.q_image(0).is_zero());
  Monomial m12{{}, {L.generator(0), L.generator(1)}};
  CHECK(L.q_image(1) == SuperPoly::monomial(m12, -1));
  auto h = target_cohomology(L, {2});
  CHECK(h.total.dim(1) == 1);
  CHECK(h.total.dim(2) == 0);
  CHECK(h.total.stable(1));
  CHECK(h.total.stable(2));
  CHECK_FALSE(h.weight_graded);
}

TEST_CASE("abelian targets") {
  SUBCASE("odd generator: only weight 1 survives") {
    LInfinityStructure L({{"a", 1}}, 1);
    auto h = target_cohomology(L, {3});
    CHECK(h.weight_graded);
    CHECK(h.by_weight[1] == gla::GradedDims{{1, 1}});
    CHECK(h.by_weight[2].empty());
    CHECK(h.total.total_dim() == 1);
  }
  SUBCASE("even generator: one class per weight") {
    LInfinityStructure L({{"x", 0}}, 2);
    auto h = target_cohomology(L, {4});
    for (int w = 1; w <= 4; ++w) CHECK(h.by_weight[w] == gla::GradedDims{{0, 1}});
    CHECK(h.total.dim(0) == 4);
  }
  SUBCASE("even generator in degree 2") {
    LInfinityStructure L({{"b", 2}}, 1);
    auto h = target_cohomology(L, {3});
    for (int w = 1; w <= 3; ++w) CHECK(h.by_weight[w] == gla::GradedDims{{2 * w, 1}});
  }
}

TEST_CASE("contractible pair") {
  LInfinityStructure L({{"x", 0}, {"y", 1}}, 1);
  L.add_bracket({1, 0, {1}, 1});
  auto h = target_cohomology(L, {4});
  CHECK(h.total.total_dim() == 0);
  for (int w = 1; w <= 4; ++w) CHECK(h.by_weight[w].empty());
}

TEST_CASE("weight-graded cohomology is the symmetric power of the linear part") {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 8; ++t) {
    // l_1 built from points and contractible pairs, then a random basis change
    auto g = testgen::random_global_complex(-1, 2, rng, 4);
    std::vector<TargetBasis> basis;
    for (std::size_t i = 0; i < g.deg.size(); ++i) basis.push_back({"v" + std::to_string(i), g.deg[i]});
    LInfinityStructure L(basis, 1);
    for (int j = 0; j < g.d.cols(); ++j)
      for (const auto& [i, v] : g.d.column(j)) L.add_bracket({1, j, {i}, v});
    const int n = L.dim();
    // degree-preserving change: permute inside degrees via a block random invertible
    gla::SparseMatrix T(n, n);
    std::map<int, std::vector<int>> members;
    for (int i = 0; i < n; ++i) members[basis[static_cast<std::size_t>(i)].degree].push_back(i);
    for (auto& [d, idx] : members) {
      auto [B, Bi] = testgen::random_invertible(static_cast<int>(idx.size()), rng);
      for (int j = 0; j < B.cols(); ++j)
        for (const auto& [i, v] : B.column(j)) T.add(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)], v);
    }
    auto L2 = change_basis(L, T);
    CHECK(check_nilpotency(L2, 1).empty());
    auto h1 = gla::trim(gla::cohomology(ce_weight_block(L2, 1), false).dims());
    auto h = target_cohomology(L2, {3});
    for (int w = 1; w <= 3; ++w) CHECK(h.by_weight[w] == sym_count(h1, w));
    CHECK(target_cohomology(L, {3}).total.dims() == h.total.dims());
  }
}

TEST_CASE("weight-1 CE matrix is the transpose of l_1") {
  LInfinityStructure L({{"x", 0}, {"x2", 0}, {"y", 1}, {"y2", 1}}, 1);
  L.add_bracket({1, 0, {2}, 2});
  L.add_bracket({1, 0, {3}, Rational(-1, 3)});
  L.add_bracket({1, 1, {2}, -4});
  L.add_bracket({1, 1, {3}, Rational(2, 3)});
  auto c = ce_weight_block(L, 1);
  auto l1 = L.l1_matrix();
  auto d0 = c.d(0);
  for (int a = 0; a < 2; ++a)
    for (int b = 2; b < 4; ++b) CHECK(d0.at(b - 2, a) == l1.at(a, b));
}

TEST_CASE("basis change leaves sl2 cohomology alone") {
  std::mt19937_64 rng(2);
  LInfinityStructure L({{"h", 1}, {"e", 1}, {"f", 1}}, 2);
  L.set_lie_structure(sl2(false));
  auto [T, Ti] = testgen::random_invertible(3, rng);
  auto L2 = change_basis(L, T);
  CHECK(check_nilpotency(L2, 3).empty());
  auto a = target_cohomology(L, {3}).total.dims();
  auto b = target_cohomology(L2, {3}).total.dims();
  CHECK(a == b);
  // sl2 has H^3 = 1 and nothing below in the reduced complex
  CHECK(gla::trim(a) == gla::GradedDims{{3, 1}});
}
