#pragma once

// Flat graded target (L, Q) stored through its Chevalley-Eilenberg derivation.
//
// Convention. A basis element carries the degree of its coordinate function
// c^a in Sym(L*). A bracket entry (arity k, output a, inputs b_1..b_k, value)
// contributes value * c^{b_1}...c^{b_k} to Q(c^a); degrees must satisfy
// deg(a) + 1 = sum deg(b_i). A Lie structure f^a_{bc} on degree-1
// generators means Q(c^a) = -1/2 f^a_{bc} c^b c^c.

#include <map>
#include <string>
#include <vector>

#include "aksz/gla/complex.hpp"
#include "aksz/superpoly.hpp"

namespace aksz {

struct TargetBasis {
  std::string label;
  int degree = 0;
};

struct BracketEntry {
  int arity = 1;
  int output = 0;
  std::vector<int> inputs;
  Rational value;
};

class LInfinityStructure {
 public:
  LInfinityStructure() = default;
  LInfinityStructure(std::vector<TargetBasis> basis, int max_arity);

  /// Throws StructuralError for unknown indices, wrong arity or a degree mismatch.
  void add_bracket(const BracketEntry& e);
  /// f[a][b][c] = f^a_{bc}; every index must be a degree-1 generator and f
  /// skew in (b, c).
  void set_lie_structure(const std::vector<std::vector<std::vector<Rational>>>& f);

  int dim() const { return static_cast<int>(basis_.size()); }
  int max_arity() const { return max_arity_; }
  const std::vector<TargetBasis>& basis() const { return basis_; }
  const std::vector<BracketEntry>& entries() const { return entries_; }
  int index_of(const std::string& label) const;

  /// Generator key of c^a inside the target algebra.
  static Gen generator(int a, int degree) { return (static_cast<Gen>(a + 1) << 1) | static_cast<Gen>(degree & 1); }
  Gen generator(int a) const { return generator(a, basis_[static_cast<std::size_t>(a)].degree); }
  /// Inverse of generator(); -1 for foreign keys.
  int index_of_generator(Gen g) const;

  /// Q(c^a), a sum of monomials in the c's.
  const SuperPoly& q_image(int a) const { return q_[static_cast<std::size_t>(a)]; }
  /// The odd derivation Q on the target algebra.
  Derivation q_derivation() const;

  /// Highest arity with a nonzero entry (0 when Q = 0).
  int effective_arity() const;
  /// True when l_1 is the only nonzero bracket, so Q preserves weight.
  bool weight_graded() const { return effective_arity() <= 1; }

  /// (l_1)_{ab}: coefficient of c^b in Q(c^a), read from the stored entries.
  gla::SparseMatrix l1_matrix() const;

  std::string text(const Monomial& m) const;

 private:
  std::vector<TargetBasis> basis_;
  int max_arity_ = 1;
  std::vector<SuperPoly> q_;
  std::vector<BracketEntry> entries_;
};

struct NilpotencyViolation {
  int arity = 0;            // polynomial degree of the offending component of Q^2 c^a
  std::string output;       // label a
  std::string monomial;     // inputs, as text
  Rational coefficient;
};

/// Components of Q^2 c^a of polynomial degree <= max_arity that do not vanish.
/// The degree-k component is the generalized Jacobi identity on Sym^k(L), so
/// max_arity may go up to 2A - 1 for declared bracket arity A.
std::vector<NilpotencyViolation> check_nilpotency(const LInfinityStructure& L, int max_arity);

/// Sym^+(L*) modulo weight > P.
struct CETruncation {
  int max_weight = 1;
};

/// Monomials in the c's of the given weight and total degree, in canonical order.
std::vector<Monomial> sym_basis(const LInfinityStructure& L, int weight, int degree);
/// Degrees in which weight-w monomials exist.
std::vector<int> sym_degrees(const LInfinityStructure& L, int weight);

/// The CE complex on weights 1..P. Degrees where a weight-(>P) component was
/// dropped from the image of a basis element (in that degree or the one
/// below) are flagged edge-affected. Throws IntegrityError if Q^2 != 0.
gla::TruncatedComplex ce_differential(const LInfinityStructure& L, const CETruncation& t);
/// Same restricted to a single weight; only meaningful when weight_graded().
gla::TruncatedComplex ce_weight_block(const LInfinityStructure& L, int weight);

struct TargetCohomology {
  gla::CohomologyReport total;            // by degree
  bool weight_graded = false;
  std::map<int, gla::GradedDims> by_weight;  // weight -> degree -> dim (graded case)
};

TargetCohomology target_cohomology(const LInfinityStructure& L, const CETruncation& t);

/// The structure in the basis c = T c' (T invertible, degree preserving).
LInfinityStructure change_basis(const LInfinityStructure& L, const gla::SparseMatrix& T);

}  // namespace aksz
