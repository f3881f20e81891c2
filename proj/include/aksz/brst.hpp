#pragma once

// Finite blocks of the local BRST bicomplex (horizontal degree p, ghost g;
// d_h and s) and the verdicts computed on them.
//
// Carriers. Polynomials of weight >= 1 in the jets u^{(I,a)}_sigma, times dx^J,
// times one coefficient monomial. Three kinds of finite block:
//   scaling block  torus zero mode, or FlatPoly: fixed scaling multidegree
//                  Delta (preserved by s and d_h), weight <= Lmax
//   mode block     torus mode k != 0: all monomials with jet cost <= K + 2,
//                  where cost = sum over factors of |sigma| + |I|
// FlatPoly and mode blocks are staged: classes are taken from stage <= Kc and
// boundaries from stage <= Kb (FlatPoly: stage |mu|, Kc = D, Kb = D + 1;
// mode blocks: stage = cost, Kc = K, Kb = K + 1). Torus zero-mode blocks are
// exact subcomplexes.
//
// Targets whose brackets are all unary split by weight; the others are
// computed on the quotient by weight > Lmax.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "aksz/base.hpp"
#include "aksz/gla/complex.hpp"
#include "aksz/jet.hpp"
#include "aksz/linfty.hpp"

namespace aksz {

/// One truncation level. `base` is D for FlatPoly and N for the torus.
struct Rung {
  int K = 1;     // scaling window [lo, K]^n, jet cost stage for torus modes
  int Lmax = 2;  // weight bound
  int base = 1;
  auto operator<=>(const Rung&) const = default;
};

struct VerificationCase {
  std::string name;
  BaseKind base_kind = BaseKind::TorusFourier;
  int n = 1;
  LInfinityStructure target;
  std::optional<FlatConnection> twist;
  std::vector<Rung> ladder;  // ascending

  BaseModel base_at(const Rung& r) const;
  FieldBundleSpec bundle_at(const Rung& r) const;
};

enum class Verdict { Pass, Fail, Inconclusive };
std::string to_string(Verdict v);

/// Cohomology of the assembled bicomplex at one rung.
struct BicomplexDims {
  gla::GradedDims iterated;  // H^{g,n}(s|d_h), keyed by g + n
  gla::GradedDims total;     // H(s + d_h), keyed by total degree
  /// H^p(d_h) for p < n, keyed by (p, g); nonzero entries only.
  std::map<std::pair<int, int>, std::int64_t> rows_below_top;
  /// On exact blocks, E_2 of the row-first spectral sequence (from the
  /// generic bicomplex engine) agrees with the iterated and total dimensions.
  bool spectral_consistent = true;
  int blocks = 0;
  int largest_block = 0;
};

/// `jobs` <= 0 leaves the OpenMP default. Throws IntegrityError if s and d_h
/// fail to square to zero or to anticommute on some block.
BicomplexDims bicomplex_dims(const VerificationCase& c, const Rung& r, int jobs = 0);

struct ComparisonRow {
  int degree = 0;
  std::int64_t lhs = 0, rhs = 0;
  bool lhs_stable = false, rhs_stable = false;
  bool match = false;  // both stable and equal
};

struct Comparison {
  std::vector<ComparisonRow> rows;
  Verdict verdict = Verdict::Inconclusive;
};

/// Compares two ladders of tables; an entry is stable when the last two
/// rungs agree (plus `extra_rhs_unstable` for the right-hand side).
Comparison compare_ladders(const std::vector<gla::GradedDims>& lhs, const std::vector<gla::GradedDims>& rhs,
                           const std::set<int>& extra_rhs_unstable = {});

struct PropVerdict {
  Comparison table;  // iterated (lhs) against total (rhs)
  bool e1_concentrated = false;
  bool spectral_consistent = false;
  Verdict verdict = Verdict::Inconclusive;
};
PropVerdict verify_prop(const std::vector<BicomplexDims>& per_rung);

struct TheoremVerdict {
  Comparison table;  // H^{g,n}(s|d_h) (lhs) against the Kunneth table (rhs)
  gla::GradedDims base;
  gla::GradedDims target;
  Verdict verdict = Verdict::Inconclusive;
};
TheoremVerdict verify_theorem(const VerificationCase& c, const std::vector<BicomplexDims>& per_rung);

/// Row complexes (Sym^l of the jets of `rank` even fields, d_h) per scaling block.
struct RowLemmaEntry {
  Sigma delta{};
  int p = 0;
  std::int64_t dim = 0, oracle = 0;
  bool stable = false;
  bool match = false;
};

struct RowLemmaVerdict {
  int n = 1, rank = 1, l = 1;
  BaseKind base = BaseKind::TorusFourier;
  std::vector<RowLemmaEntry> entries;  // entries with dim or oracle nonzero
  std::int64_t top_dim = 0, top_oracle = 0;  // summed over stable blocks
  Verdict verdict = Verdict::Inconclusive;
};

/// FlatPoly supports l = 1 (classes f(x) u^a dx^1..dx^n); the torus model uses
/// the zero mode (constant coefficients) and supports l = 1, 2.
RowLemmaVerdict verify_row_lemma(int n, int rank, int l, BaseKind base, const std::vector<Rung>& ladder, int jobs = 0);

struct ColumnEntry {
  int p = 0, weight = 1, ghost = 0;
  std::int64_t dim = 0, oracle = 0;
  bool stable = false;
  bool match = false;
};

struct ColumnVerdict {
  bool twisted = false;
  std::vector<ColumnEntry> entries;
  /// Untwisted: no cohomology outside jet cost 0. Twisted: not measured per cost.
  bool concentrated = false;
  Verdict verdict = Verdict::Inconclusive;
};

/// Columns (fixed p, weight and coefficient; differential the de Rham part of s).
ColumnVerdict verify_column_resolution(const VerificationCase& c, int jobs = 0);

/// Randomized exact identities on one bundle.
struct IdentityReport {
  int samples = 0;
  int dh_squared = 0, dv_squared = 0, dh_dv = 0, s_squared = 0, s_dh = 0;  // failure counts
  int prolong_samples = 0, prolong_failures = 0;
  int pullback_samples = 0, pullback_failures = 0;
  bool ok() const {
    return dh_squared + dv_squared + dh_dv + s_squared + s_dh + prolong_failures + pullback_failures == 0;
  }
};
IdentityReport check_identities(const FieldBundleSpec& spec, int samples, std::uint64_t seed);

/// dim Sym^l(L*) in each internal degree (odd generators at most once).
gla::GradedDims symmetric_power_dims(const LInfinityStructure& L, int l);

}  // namespace aksz
