// Serial reference paths against the production and OpenMP kernels, on dense
// rational matrices and scrambled complexes of known shape, plus one block of
// the local BRST bicomplex.

#include <benchmark/benchmark.h>

#include <random>

#include "aksz/brst.hpp"
#include "aksz/gla/complex.hpp"
#include "aksz/gla/rank.hpp"
#include "generators.hpp"

using namespace aksz;

namespace {

gla::SparseMatrix sample_matrix(int n) {
  std::mt19937_64 rng(static_cast<std::uint64_t>(n));
  return testgen::random_rank_matrix(n, n, n - n / 4, rng);
}

gla::TruncatedComplex sample_complex(int pieces) {
  std::mt19937_64 rng(static_cast<std::uint64_t>(pieces) + 99);
  return testgen::to_complex(testgen::random_global_complex(0, 4, rng, pieces), rng);
}

void BM_rank_reference(benchmark::State& st) {
  auto m = sample_matrix(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(gla::rank_reference(m));
}
void BM_rank(benchmark::State& st) {
  auto m = sample_matrix(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(gla::rank(m));
}
void BM_rank_parallel(benchmark::State& st) {
  auto m = sample_matrix(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(gla::rank_parallel(m));
}

void BM_cohomology_serial(benchmark::State& st) {
  auto c = sample_complex(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(gla::cohomology_serial(c).total_dim());
}
void BM_cohomology(benchmark::State& st) {
  auto c = sample_complex(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(gla::cohomology(c, false).total_dim());
}

// The T^1 nonabelian case at its second rung; jobs = 1 against the OpenMP default.
void BM_bicomplex(benchmark::State& st) {
  VerificationCase c;
  c.n = 1;
  c.target = LInfinityStructure({{"1", 1}, {"2", 1}}, 2);
  std::vector<std::vector<std::vector<Rational>>> f(2, std::vector<std::vector<Rational>>(2, std::vector<Rational>(2, Rational(0))));
  f[1][0][1] = 1;
  f[1][1][0] = -1;
  c.target.set_lie_structure(f);
  const Rung r{2, 2, 2};
  for (auto _ : st) benchmark::DoNotOptimize(bicomplex_dims(c, r, static_cast<int>(st.range(0))).blocks);
}

}  // namespace

BENCHMARK(BM_rank_reference)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_rank)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_rank_parallel)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_cohomology_serial)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_cohomology)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_bicomplex)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
