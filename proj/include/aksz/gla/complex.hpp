#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "aksz/gla/matrix.hpp"

namespace aksz::gla {

/// degree -> dimension
using GradedDims = std::map<int, std::int64_t>;

/// Finite-type Z-graded vector space with a labelled basis in every degree.
class GradedSpace {
 public:
  GradedSpace() = default;

  /// Labels must be unique within a degree; they are kept in canonical order.
  void set_basis(int degree, std::vector<BasisLabel> labels);
  /// Anonymous basis e_0..e_{dim-1}.
  void set_dim(int degree, int dim);

  int dim(int degree) const;
  const std::vector<BasisLabel>& basis(int degree) const;
  /// Index of a label in its degree, or -1.
  int index_of(int degree, const BasisLabel& label) const;
  std::vector<int> degrees() const;
  GradedDims dims() const;

 private:
  std::map<int, std::vector<BasisLabel>> basis_;
};

enum class Stability { Stable, EdgeAffected };

struct CohomologyEntry {
  std::int64_t dim = 0;
  Stability stability = Stability::Stable;
  /// Cocycles completing a basis of the coboundaries inside the cocycles.
  std::vector<SparseVector> representatives;
};

struct CohomologyReport {
  std::map<int, CohomologyEntry> degrees;

  std::int64_t dim(int degree) const;
  bool stable(int degree) const;
  GradedDims dims() const;
  std::int64_t total_dim() const;
};

/// Bounded cochain complex C^lo -> ... -> C^hi. Differentials are stored as
/// d^k : C^k -> C^{k+1}; missing ones are zero.
///
/// `edge_degrees` flags degrees where truncation may have changed the
/// cohomology; `unchecked` lists k for which d^{k+1} d^k = 0 is not asserted.
class TruncatedComplex {
 public:
  TruncatedComplex() = default;
  TruncatedComplex(GradedSpace spaces, std::map<int, SparseMatrix> differentials,
                   std::set<int> edge_degrees = {}, std::set<int> unchecked = {});

  const GradedSpace& spaces() const { return spaces_; }
  int lo() const { return lo_; }
  int hi() const { return hi_; }
  int dim(int k) const { return spaces_.dim(k); }
  /// d^k; a zero matrix of the right shape when absent.
  SparseMatrix d(int k) const;
  const std::set<int>& edge_degrees() const { return edges_; }
  bool is_edge(int k) const { return edges_.count(k) != 0; }

  /// Throws StructuralError on shape mismatches and IntegrityError when
  /// d^{k+1} d^k != 0 for an interior k.
  void validate() const;

 private:
  GradedSpace spaces_;
  std::map<int, SparseMatrix> d_;
  std::set<int> edges_;
  std::set<int> unchecked_;
  int lo_ = 0;
  int hi_ = -1;
};

/// Cohomology with representatives (set `with_representatives` false for
/// dimensions only, which skips the null-space computations).
CohomologyReport cohomology(const TruncatedComplex& c, bool with_representatives = true);

/// Same dimensions as cohomology(c, false) but computed degree by degree on a
/// single thread. Kept as the reference for the OpenMP path.
CohomologyReport cohomology_serial(const TruncatedComplex& c);

/// Doubly graded K^{p,q} on the window [p_lo,p_hi] x [q_lo,q_hi] with
/// d1 : K^{p,q} -> K^{p+1,q} and d2 : K^{p,q} -> K^{p,q+1}.
class Bicomplex {
 public:
  Bicomplex() = default;
  Bicomplex(int p_lo, int p_hi, int q_lo, int q_hi);

  int p_lo() const { return p_lo_; }
  int p_hi() const { return p_hi_; }
  int q_lo() const { return q_lo_; }
  int q_hi() const { return q_hi_; }

  void set_dim(int p, int q, int dim);
  int dim(int p, int q) const;
  void set_d1(int p, int q, SparseMatrix m);
  void set_d2(int p, int q, SparseMatrix m);
  SparseMatrix d1(int p, int q) const;
  SparseMatrix d2(int p, int q) const;

  /// Shapes, d1^2 = 0, d2^2 = 0 and d1 d2 + d2 d1 = 0 on every bidegree.
  void validate() const;

  /// Column p as a single complex in q (differential d2).
  TruncatedComplex column(int p) const;
  /// Row q as a single complex in p (differential d1).
  TruncatedComplex row(int q) const;

 private:
  bool inside(int p, int q) const { return p >= p_lo_ && p <= p_hi_ && q >= q_lo_ && q <= q_hi_; }
  int p_lo_ = 0, p_hi_ = -1, q_lo_ = 0, q_hi_ = -1;
  std::map<std::pair<int, int>, int> dims_;
  std::map<std::pair<int, int>, SparseMatrix> d1_, d2_;
};

/// (Tot K)^m = sum_{p+q=m} K^{p,q} (ordered by increasing p), D = d1 + d2.
TruncatedComplex total_complex(const Bicomplex& b);

/// First: filter by p, so E_1 = H(d2) and E_2 = H(d1 on E_1).
/// Second: filter by q, so E_1 = H(d1) and E_2 = H(d2 on E_1).
enum class Filtration { First, Second };

struct PageReport {
  Filtration filtration = Filtration::First;
  std::map<std::pair<int, int>, std::int64_t> e1;
  std::map<std::pair<int, int>, std::int64_t> e2;

  /// Total dimension of E_2 along each total degree p+q.
  GradedDims e2_total() const;
};

PageReport spectral_pages(const Bicomplex& b, Filtration f);

struct TwoFiltrationVerdict {
  GradedDims q1;  // H(Q_1), Q_1^i = ker(d2 : K^{i,q_lo} -> K^{i,q_lo+1})
  GradedDims q2;  // H(Q_2), Q_2^i = ker(d1 : K^{p_lo,i} -> K^{p_lo+1,i})
  GradedDims total;
  bool equal = false;
};

/// Throws HypothesisError naming the first column (fixed p, d2) or row
/// (fixed q, d1) that has cohomology away from its lowest spot.
TwoFiltrationVerdict two_filtration_check(const Bicomplex& b);

/// Convolution of graded dimensions: out^p = sum_{i+j=p} a^i b^j.
GradedDims kunneth(const GradedDims& a, const GradedDims& b);

/// Explicit tensor product complex (A ⊗ B)^m with d(a⊗b) = da⊗b + (-1)^|a| a⊗db.
TruncatedComplex tensor_complex(const TruncatedComplex& a, const TruncatedComplex& b);

/// Drops zero entries.
GradedDims trim(const GradedDims& d);

}  // namespace aksz::gla
