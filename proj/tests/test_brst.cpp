#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "aksz/brst.hpp"
#include "aksz/errors.hpp"

using namespace aksz;

namespace {

using Tensor3 = std::vector<std::vector<std::vector<Rational>>>;

Tensor3 zero_tensor(int d) {
  return Tensor3(static_cast<std::size_t>(d),
                 std::vector<std::vector<Rational>>(static_cast<std::size_t>(d), std::vector<Rational>(static_cast<std::size_t>(d), Rational(0))));
}

LInfinityStructure abelian(int degree) { return LInfinityStructure({{"a", degree}}, 1); }

LInfinityStructure contractible() {
  LInfinityStructure L({{"x", 0}, {"y", 1}}, 1);
  L.add_bracket({1, 0, {1}, 1});
  return L;
}

LInfinityStructure affine_line() {
  LInfinityStructure L({{"1", 1}, {"2", 1}}, 2);
  Tensor3 f = zero_tensor(2);
  f[1][0][1] = 1;
  f[1][1][0] = -1;
  L.set_lie_structure(f);
  return L;
}

// [e1, e2] = e3, [e1, e3] = e1: the Jacobiator on (e1, e2, e3) is e3
LInfinityStructure broken_jacobi() {
  LInfinityStructure L({{"1", 1}, {"2", 1}, {"3", 1}}, 2);
  Tensor3 f = zero_tensor(3);
  f[2][0][1] = 1;
  f[2][1][0] = -1;
  f[0][0][2] = 1;
  f[0][2][0] = -1;
  L.set_lie_structure(f);
  return L;
}

VerificationCase make_case(BaseKind kind, int n, LInfinityStructure L, int Lmax) {
  VerificationCase c;
  c.name = "case";
  c.base_kind = kind;
  c.n = n;
  c.target = std::move(L);
  c.ladder = {{1, Lmax, 1}, {2, Lmax, 2}};
  return c;
}

std::vector<BicomplexDims> run(const VerificationCase& c) {
  std::vector<BicomplexDims> out;
  for (const auto& r : c.ladder) out.push_back(bicomplex_dims(c, r));
  return out;
}

}  // namespace

TEST_CASE("symmetric powers of the dual") {
  LInfinityStructure even({{"p", 0}, {"q", 0}}, 1);
  CHECK(symmetric_power_dims(even, 2) == gla::GradedDims{{0, 3}});
  CHECK(symmetric_power_dims(affine_line(), 2) == gla::GradedDims{{2, 1}});
  CHECK(symmetric_power_dims(affine_line(), 3).empty());
  CHECK(symmetric_power_dims(contractible(), 2) == gla::GradedDims{{0, 1}, {1, 1}});
}

TEST_CASE("ladder comparison") {
  using D = gla::GradedDims;
  SUBCASE("stable agreement") {
    auto c = compare_ladders({D{{1, 1}}, D{{1, 1}}}, {D{{1, 2}}, D{{1, 1}}});
    CHECK(c.verdict == Verdict::Inconclusive);
    c = compare_ladders({D{{1, 1}}, D{{1, 1}}}, {D{{1, 1}}, D{{1, 1}}});
    CHECK(c.verdict == Verdict::Pass);
    REQUIRE(c.rows.size() == 1);
    CHECK(c.rows[0].match);
  }
  SUBCASE("stable disagreement") {
    auto c = compare_ladders({D{{1, 1}}, D{{1, 1}}}, {D{{1, 2}}, D{{1, 2}}});
    CHECK(c.verdict == Verdict::Fail);
  }
  SUBCASE("a single rung is never stable") {
    CHECK(compare_ladders({D{{0, 1}}}, {D{{0, 1}}}).verdict == Verdict::Inconclusive);
  }
  SUBCASE("external instability") {
    auto c = compare_ladders({D{{1, 1}}, D{{1, 1}}}, {D{{1, 1}}, D{{1, 1}}}, {1});
    CHECK(c.verdict == Verdict::Inconclusive);
  }
  SUBCASE("empty tables") { CHECK(compare_ladders({D{}, D{}}, {D{}, D{}}).verdict == Verdict::Pass); }
}

TEST_CASE("local BRST cohomology of small targets") {
  SUBCASE("abelian degree 1 on the circle") {
    auto c = make_case(BaseKind::TorusFourier, 1, abelian(1), 3);
    auto per = run(c);
    for (const auto& d : per) {
      CHECK(d.iterated == gla::GradedDims{{1, 1}, {2, 1}});
      CHECK(d.total == d.iterated);
      CHECK(d.rows_below_top.empty());
      CHECK(d.spectral_consistent);
    }
    auto th = verify_theorem(c, per);
    CHECK(th.verdict == Verdict::Pass);
    CHECK(th.base == gla::GradedDims{{0, 1}, {1, 1}});
    CHECK(th.target == gla::GradedDims{{1, 1}});
    CHECK(verify_prop(per).verdict == Verdict::Pass);
  }
  SUBCASE("abelian degree 1 on polynomial coefficients") {
    auto c = make_case(BaseKind::FlatPoly, 1, abelian(1), 3);
    auto per = run(c);
    CHECK(per.back().iterated == gla::GradedDims{{1, 1}});
    CHECK(verify_theorem(c, per).verdict == Verdict::Pass);
  }
  SUBCASE("contractible pair") {
    auto c = make_case(BaseKind::TorusFourier, 1, contractible(), 3);
    auto per = run(c);
    CHECK(per.back().iterated.empty());
    CHECK(per.back().total.empty());
    CHECK(verify_theorem(c, per).verdict == Verdict::Pass);
  }
  SUBCASE("two-dimensional nonabelian on T^2") {
    auto c = make_case(BaseKind::TorusFourier, 2, affine_line(), 2);
    auto per = run(c);
    CHECK(per.back().iterated == gla::GradedDims{{1, 1}, {2, 2}, {3, 1}});
    CHECK(verify_theorem(c, per).verdict == Verdict::Pass);
    CHECK(verify_prop(per).verdict == Verdict::Pass);
  }
  SUBCASE("empty target") {
    auto c = make_case(BaseKind::TorusFourier, 1, LInfinityStructure({}, 1), 2);
    auto per = run(c);
    CHECK(per.back().iterated.empty());
    CHECK(per.back().blocks == 0);
    CHECK(verify_theorem(c, per).verdict == Verdict::Pass);
  }
  SUBCASE("a failing Jacobi identity is caught") {
    auto c = make_case(BaseKind::TorusFourier, 1, broken_jacobi(), 3);
    CHECK_THROWS_AS(bicomplex_dims(c, c.ladder.front()), IntegrityError);
  }
  SUBCASE("job count does not change the result") {
    auto c = make_case(BaseKind::TorusFourier, 1, affine_line(), 2);
    auto a = bicomplex_dims(c, c.ladder.back(), 1);
    auto b = bicomplex_dims(c, c.ladder.back(), 4);
    CHECK(a.iterated == b.iterated);
    CHECK(a.total == b.total);
  }
}

TEST_CASE("row complexes") {
  std::vector<Rung> ladder{{2, 1, 1}, {3, 1, 2}};
  auto v = verify_row_lemma(1, 2, 1, BaseKind::FlatPoly, ladder);
  CHECK(v.verdict == Verdict::Pass);
  CHECK(v.top_dim == 4);  // f(x) u^a dx, deg f <= 1
  v = verify_row_lemma(2, 1, 1, BaseKind::TorusFourier, ladder);
  CHECK(v.verdict == Verdict::Pass);
  CHECK(v.top_dim == 1);
  for (auto& r : ladder) r.Lmax = 2;
  v = verify_row_lemma(1, 2, 2, BaseKind::TorusFourier, ladder);
  CHECK(v.verdict == Verdict::Pass);
  // three classes at each even order nu of the blocks 0..3, one at each odd order
  CHECK(v.top_dim == 8);
  for (const auto& e : v.entries)
    if (e.p < 1) CHECK(e.dim == 0);
  CHECK_THROWS_AS(verify_row_lemma(1, 1, 2, BaseKind::FlatPoly, ladder), StructuralError);
}

TEST_CASE("column resolution") {
  SUBCASE("untwisted") {
    auto c = make_case(BaseKind::TorusFourier, 2, abelian(1), 2);
    auto v = verify_column_resolution(c);
    CHECK(v.verdict == Verdict::Pass);
    CHECK(v.concentrated);
  }
  SUBCASE("twisted") {
    gla::SparseMatrix A(2, 2);
    A.add(0, 1, 1);
    auto c = make_case(BaseKind::TorusFourier, 1, LInfinityStructure({{"p", 0}, {"q", 0}}, 1), 2);
    c.twist = FlatConnection{2, {A}};
    auto v = verify_column_resolution(c);
    CHECK(v.twisted);
    CHECK(v.verdict == Verdict::Pass);
    for (const auto& e : v.entries) CHECK(e.match);
  }
}

TEST_CASE("randomized identities") {
  for (const auto& base : {BaseModel::flat(1, 2), BaseModel::torus(2, 1)}) {
    auto rep = check_identities(FieldBundleSpec(base, affine_line()), 30, 11);
    CHECK(rep.samples == 30);
    CHECK(rep.ok());
  }
}
