#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "aksz/base.hpp"
#include "aksz/errors.hpp"

using namespace aksz;
using gla::GradedDims;
using gla::SparseMatrix;

namespace {

std::int64_t binom(int n, int k) {
  std::int64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Simplicial cochains of the boundary of a tetrahedron.
gla::TruncatedComplex sphere_cochains() {
  const std::vector<std::pair<int, int>> edges = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
  const std::vector<std::array<int, 3>> faces = {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};
  SparseMatrix d0(6, 4), d1(4, 6);
  for (int e = 0; e < 6; ++e) {
    d0.add(e, edges[static_cast<std::size_t>(e)].second, 1);
    d0.add(e, edges[static_cast<std::size_t>(e)].first, -1);
  }
  auto edge_index = [&](int a, int b) {
    for (int e = 0; e < 6; ++e)
      if (edges[static_cast<std::size_t>(e)] == std::make_pair(a, b)) return e;
    return -1;
  };
  for (int f = 0; f < 4; ++f) {
    auto [a, b, c] = faces[static_cast<std::size_t>(f)];
    d1.add(f, edge_index(b, c), 1);
    d1.add(f, edge_index(a, c), -1);
    d1.add(f, edge_index(a, b), 1);
  }
  gla::GradedSpace s;
  s.set_dim(0, 4);
  s.set_dim(1, 6);
  s.set_dim(2, 4);
  return gla::TruncatedComplex(s, {{0, d0}, {1, d1}});
}

}  // namespace

TEST_CASE("circle") {
  auto m = BaseModel::torus(1, 2);
  CHECK(gla::trim(gla::cohomology(de_rham_complex(m)).dims()) == GradedDims{{0, 1}, {1, 1}});
  for (int k = -2; k <= 2; ++k) {
    auto h = gla::cohomology(de_rham_complex(m, std::nullopt, BaseExp{k, 0, 0, 0})).total_dim();
    CHECK(h == (k == 0 ? 2 : 0));
  }
}

TEST_CASE("tori have binomial cohomology for every N") {
  for (int n = 1; n <= 3; ++n)
    for (int N = 0; N <= 2; ++N) {
      auto h = base_cohomology(BaseModel::torus(n, N));
      for (int p = 0; p <= n; ++p) {
        CHECK(h.dim(p) == binom(n, p));
        CHECK(h.stable(p));
      }
    }
}

TEST_CASE("polynomial Poincare lemma") {
  auto c = de_rham_complex(BaseModel::flat(1, 3));
  CHECK(gla::cohomology(c).dim(0) == 1);
  CHECK(c.is_edge(1));
  for (int n = 1; n <= 3; ++n) {
    auto h = base_cohomology(BaseModel::flat(n, 2));
    CHECK(h.dim(0) == 1);
    CHECK(h.stable(0));
    for (int p = 1; p <= n; ++p) {
      CHECK(h.dim(p) == 0);
      CHECK(h.stable(p));
    }
  }
}

TEST_CASE("twisted circle") {
  FlatConnection A{1, {SparseMatrix::from_dense({{2}})}};
  auto c = de_rham_complex(BaseModel::torus(1, 1), A);
  CHECK(gla::cohomology(c).total_dim() == 0);
  // k + a = 0 for the mode k = -2 once N reaches 2
  CHECK(gla::cohomology(de_rham_complex(BaseModel::torus(1, 2), A)).total_dim() == 2);
}

TEST_CASE("twists must commute") {
  auto J = SparseMatrix::from_dense({{1, 1}, {0, 1}});
  auto K = SparseMatrix::from_dense({{2, 3}, {0, 2}});
  auto P = SparseMatrix::from_dense({{0, 1}, {1, 0}});
  FlatConnection good{2, {J, K}};
  CHECK_NOTHROW(de_rham_complex(BaseModel::torus(2, 1), good).validate());
  CHECK_NOTHROW(de_rham_complex(BaseModel::flat(2, 2), good).validate());
  FlatConnection bad{2, {J, P}};
  CHECK_THROWS_AS(de_rham_complex(BaseModel::torus(2, 1), bad), IntegrityError);
  CHECK_THROWS_AS(de_rham_complex(BaseModel::from_complex(sphere_cochains()), good), StructuralError);
}

TEST_CASE("external sphere") {
  auto h = base_cohomology(BaseModel::from_complex(sphere_cochains()));
  CHECK(gla::trim(h.dims()) == GradedDims{{0, 1}, {2, 1}});
}

TEST_CASE("wedge signs") {
  CHECK(wedge_front(0, {1}) == std::pair<int, std::vector<int>>{1, {0, 1}});
  CHECK(wedge_front(1, {0}) == std::pair<int, std::vector<int>>{-1, {0, 1}});
  CHECK(wedge_front(1, {0, 2}) == std::pair<int, std::vector<int>>{-1, {0, 1, 2}});
  CHECK(wedge_front(1, {1}).first == 0);
  CHECK(subsets(4, 2).size() == 6);
}
