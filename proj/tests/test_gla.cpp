#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "aksz/errors.hpp"
#include "aksz/gla/complex.hpp"
#include "aksz/gla/rank.hpp"
#include "support/generators.hpp"

using namespace aksz;
using namespace aksz::gla;

namespace {

TruncatedComplex line(std::vector<int> dims, std::vector<SparseMatrix> maps, int lo = 0) {
  GradedSpace s;
  for (std::size_t i = 0; i < dims.size(); ++i) s.set_dim(lo + static_cast<int>(i), dims[i]);
  std::map<int, SparseMatrix> d;
  for (std::size_t i = 0; i < maps.size(); ++i) d[lo + static_cast<int>(i)] = maps[i];
  return TruncatedComplex(s, d);
}

SparseMatrix scalar(const Rational& c) { return SparseMatrix::from_dense({{c}}); }

}  // namespace

TEST_CASE("parse_rational accepts exact literals only") {
  CHECK(*parse_rational("3") == 3);
  CHECK(*parse_rational("-6/4") == Rational(-3, 2));
  CHECK(*parse_rational("+1/3") == Rational(1, 3));
  CHECK_FALSE(parse_rational("0.5"));
  CHECK_FALSE(parse_rational("1e3"));
  CHECK_FALSE(parse_rational("1/0"));
  CHECK_FALSE(parse_rational(" 1"));
  CHECK_FALSE(parse_rational(""));
}

TEST_CASE("rank paths agree") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 40; ++t) {
    int rows = 1 + static_cast<int>(rng() % 9), cols = 1 + static_cast<int>(rng() % 9);
    int r = static_cast<int>(rng() % static_cast<unsigned>(std::min(rows, cols) + 1));
    SparseMatrix m = testgen::random_rank_matrix(rows, cols, r, rng);
    int ref = rank_reference(m);
    CHECK(ref <= r);
    CHECK(rank(m) == ref);
    CHECK(rank_parallel(m) == ref);
    CHECK(static_cast<int>(kernel_basis(m).size()) == cols - ref);
    for (const auto& z : kernel_basis(m)) CHECK(m.apply(z).empty());
  }
}

TEST_CASE("echelon membership") {
  Echelon e;
  CHECK(e.insert({{0, 1}, {2, Rational(1, 2)}}));
  CHECK(e.insert({{1, 3}}));
  CHECK_FALSE(e.insert({{0, 2}, {1, 6}, {2, 1}}));
  CHECK(e.contains({{0, -4}, {2, -2}}));
  CHECK_FALSE(e.contains({{2, 1}}));
  CHECK(e.rank() == 2);
}

TEST_CASE("cohomology of elementary complexes") {
  SUBCASE("zero complex") {
    auto h = cohomology(TruncatedComplex{});
    CHECK(h.total_dim() == 0);
  }
  SUBCASE("identity two-term complex") {
    auto h = cohomology(line({1, 1}, {scalar(1)}));
    CHECK(h.dim(0) == 0);
    CHECK(h.dim(1) == 0);
  }
  SUBCASE("zero then identity") {
    auto h = cohomology(line({1, 1, 1}, {scalar(0), scalar(1)}));
    CHECK(h.dim(0) == 1);
    CHECK(h.dim(1) == 0);
    CHECK(h.dim(2) == 0);
    CHECK(h.degrees.at(0).representatives.size() == 1);
  }
}

TEST_CASE("cohomology rejects broken complexes") {
  CHECK_THROWS_AS(line({1, 1, 1}, {scalar(1), scalar(1)}), IntegrityError);
  CHECK_THROWS_AS(line({1, 2}, {scalar(1)}), StructuralError);
}

TEST_CASE("representatives complete the coboundaries inside the cocycles") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 15; ++t) {
    auto c = testgen::to_complex(testgen::random_global_complex(0, 3, rng, 6), rng);
    auto h = cohomology(c);
    auto hs = cohomology_serial(c);
    CHECK(h.dims() == hs.dims());
    for (const auto& [k, e] : h.degrees) {
      CHECK(static_cast<std::int64_t>(e.representatives.size()) == e.dim);
      Echelon span;
      auto in = c.d(k - 1);
      for (int j = 0; j < in.cols(); ++j) span.insert(in.column(j));
      for (const auto& z : e.representatives) {
        CHECK(c.d(k).apply(z).empty());
        CHECK(span.insert(z));
      }
    }
  }
}

TEST_CASE("random complexes have their built-in cohomology") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    auto g = testgen::random_global_complex(-1, 2, rng, 5);
    GradedDims expect;
    // points are the basis vectors that neither map nor get hit
    std::vector<bool> hit(g.deg.size(), false), maps(g.deg.size(), false);
    for (int j = 0; j < g.d.cols(); ++j)
      for (const auto& [i, v] : g.d.column(j)) {
        hit[static_cast<std::size_t>(i)] = true;
        maps[static_cast<std::size_t>(j)] = true;
      }
    for (std::size_t i = 0; i < g.deg.size(); ++i)
      if (!hit[i] && !maps[i]) expect[g.deg[i]] += 1;
    CHECK(trim(cohomology(testgen::to_complex(g, rng), false).dims()) == expect);
  }
}

TEST_CASE("total complex") {
  std::mt19937_64 rng(5);
  SUBCASE("one cell") {
    Bicomplex b(0, 0, 0, 0);
    b.set_dim(0, 0, 1);
    auto t = total_complex(b);
    CHECK(t.dim(0) == 1);
    CHECK(cohomology(t).dim(0) == 1);
  }
  SUBCASE("exact rows") {
    Bicomplex b(0, 1, 0, 1);
    for (int p = 0; p < 2; ++p)
      for (int q = 0; q < 2; ++q) b.set_dim(p, q, 1);
    b.set_d1(0, 0, scalar(1));
    b.set_d1(0, 1, scalar(1));
    CHECK(cohomology(total_complex(b)).total_dim() == 0);
  }
  SUBCASE("random 3x3 against the summed global differential") {
    for (int t = 0; t < 10; ++t) {
      auto g = testgen::bi_sum(testgen::bi_tensor(testgen::bi_hook(), testgen::bi_hook()),
                               testgen::bi_sum(testgen::bi_square(0, 1), testgen::bi_point(2, 2)));
      // independent assembly: one matrix d1 + d2 graded by p + q
      testgen::GlobalComplex flat;
      for (auto [p, q] : g.deg) flat.deg.push_back(p + q);
      flat.d = g.d1 + g.d2;
      auto expect = cohomology(testgen::to_complex(flat, rng, false), false).dims();
      auto got = cohomology(total_complex(testgen::to_bicomplex(g, rng)), false).dims();
      CHECK(trim(got) == trim(expect));
    }
  }
}

TEST_CASE("bicomplex identities are enforced") {
  Bicomplex b(0, 1, 0, 1);
  for (int p = 0; p < 2; ++p)
    for (int q = 0; q < 2; ++q) b.set_dim(p, q, 1);
  b.set_d1(0, 0, scalar(1));
  b.set_d2(0, 0, scalar(1));
  b.set_d1(0, 1, scalar(1));
  b.set_d2(1, 0, scalar(1));  // commutes instead of anticommuting
  CHECK_THROWS_AS(b.validate(), IntegrityError);
  CHECK_THROWS_AS(total_complex(b), IntegrityError);
}

TEST_CASE("spectral pages") {
  std::mt19937_64 rng(9);
  SUBCASE("zero differentials") {
    Bicomplex b(0, 1, 0, 2);
    int n = 1;
    for (int p = 0; p <= 1; ++p)
      for (int q = 0; q <= 2; ++q) b.set_dim(p, q, n++);
    for (auto f : {Filtration::First, Filtration::Second}) {
      auto pg = spectral_pages(b, f);
      for (int p = 0; p <= 1; ++p)
        for (int q = 0; q <= 2; ++q) {
          CHECK(pg.e1.at({p, q}) == b.dim(p, q));
          CHECK(pg.e2.at({p, q}) == b.dim(p, q));
        }
    }
  }
  SUBCASE("rows exact except the leftmost column") {
    // row pairs everywhere plus a column complex living at p = 0
    auto g = testgen::bi_sum(testgen::bi_row_pair(0, 0), testgen::bi_row_pair(1, 1));
    g = testgen::bi_sum(g, testgen::bi_column_pair(0, 1));
    g = testgen::bi_sum(g, testgen::bi_point(0, 0));
    g = testgen::bi_sum(g, testgen::bi_point(0, 2));
    auto b = testgen::to_bicomplex(g, rng);
    auto pg = spectral_pages(b, Filtration::Second);
    for (const auto& [pq, d] : pg.e1)
      if (pq.first != 0) CHECK(d == 0);
    // E2 is then the d2 cohomology of that column
    CHECK(pg.e2.at({0, 0}) == 1);
    CHECK(pg.e2.at({0, 1}) == 0);
    CHECK(pg.e2.at({0, 2}) == 1);
    CHECK(pg.e2_total() == trim(cohomology(total_complex(b), false).dims()));
  }
  SUBCASE("degenerate random bicomplexes reach the total cohomology") {
    for (int t = 0; t < 10; ++t) {
      auto b = testgen::to_bicomplex(testgen::random_edge_exact(rng), rng);
      auto total = trim(cohomology(total_complex(b), false).dims());
      CHECK(spectral_pages(b, Filtration::First).e2_total() == total);
      CHECK(spectral_pages(b, Filtration::Second).e2_total() == total);
    }
  }
}

TEST_CASE("two filtrations") {
  std::mt19937_64 rng(13);
  SUBCASE("torus model") {
    auto circle = testgen::bi_sum(testgen::bi_point(), testgen::bi_hook());
    auto b = testgen::to_bicomplex(testgen::bi_tensor(circle, circle), rng);
    auto v = two_filtration_check(b);
    GradedDims expect{{0, 1}, {1, 2}, {2, 1}};
    CHECK(v.q1 == expect);
    CHECK(v.q2 == expect);
    CHECK(v.total == expect);
    CHECK(v.equal);
  }
  SUBCASE("one cell") {
    Bicomplex b(0, 0, 0, 0);
    b.set_dim(0, 0, 1);
    auto v = two_filtration_check(b);
    CHECK(v.q1 == GradedDims{{0, 1}});
    CHECK(v.equal);
  }
  SUBCASE("interior row with cohomology") {
    auto g = testgen::bi_sum(testgen::bi_hook(), testgen::bi_point(1, 1));
    CHECK_THROWS_AS(two_filtration_check(testgen::to_bicomplex(g, rng)), HypothesisError);
  }
}

TEST_CASE("kunneth") {
  CHECK(kunneth({{0, 1}, {1, 1}}, {{0, 1}}) == GradedDims{{0, 1}, {1, 1}});
  CHECK(kunneth({{0, 1}, {1, 1}}, {{1, 1}, {2, 1}}) == GradedDims{{1, 1}, {2, 2}, {3, 1}});
  std::mt19937_64 rng(17);
  for (int t = 0; t < 10; ++t) {
    auto a = testgen::to_complex(testgen::random_global_complex(0, 2, rng, 4), rng);
    auto b = testgen::to_complex(testgen::random_global_complex(-1, 1, rng, 4), rng);
    auto ha = cohomology(a, false).dims();
    auto hb = cohomology(b, false).dims();
    auto brute = trim(cohomology(tensor_complex(a, b), false).dims());
    CHECK(kunneth(ha, hb) == brute);
  }
  SUBCASE("torus factor quadruples the total") {
    auto tor = tensor_complex(line({1, 1}, {scalar(0)}), line({1, 1}, {scalar(0)}));
    auto b = testgen::to_complex(testgen::random_global_complex(0, 3, rng, 5), rng);
    auto total = kunneth(cohomology(tor, false).dims(), cohomology(b, false).dims());
    std::int64_t sum = 0;
    for (auto [k, v] : total) sum += v;
    CHECK(sum == 4 * cohomology(b, false).total_dim());
    CHECK(trim(cohomology(tensor_complex(tor, b), false).dims()) == total);
  }
}
