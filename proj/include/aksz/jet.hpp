#pragma once

// Jet calculus for the graded field bundle of maps T[1]X -> L.
//
// Fiber coordinates are u^{(I,a)}: I a subset of the base directions (the
// form factor dx^I of the superfield) and a a target basis element. With the
// superfield Phi^a = sum_I xi^I u^{(I,a)} of total degree deg(c^a), the
// coordinate u^{(I,a)} has ghost number deg(a) - |I|.
//
// One supercommutative algebra carries everything; a generator's parity is
// its total degree mod 2:
//   xi^i           odd  (superspace coordinate, only used while building s)
//   dx^i           odd
//   u^{(I,a)}_s    ghost number mod 2
//   theta^{(I,a)}_s  (Cartan form du_s - u_{s+1_i} dx^i) ghost number + 1
// Coefficients x^mu (FlatPoly) or z^k (TorusFourier) ride in the monomial's
// base exponent.

#include <array>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "aksz/base.hpp"
#include "aksz/linfty.hpp"
#include "aksz/superpoly.hpp"

namespace aksz {

using JetPoly = SuperPoly;
using Sigma = std::array<int, kMaxBaseDim>;

enum class VarKind : unsigned { Xi = 0, Dx = 1, U = 2, Cartan = 3 };

struct JetVar {
  VarKind kind = VarKind::U;
  int I = 0;      // subset mask (U, Cartan)
  int a = 0;      // target index (U, Cartan)
  Sigma sigma{};  // jet multi-index (U, Cartan)
  int dir = 0;    // direction (Xi, Dx)
};

constexpr int kMaxJetOrder = 255;
constexpr int kMaxTargetDim = 4095;

class FieldBundleSpec {
 public:
  FieldBundleSpec() = default;
  /// `twist` acts on target indices (A_i : L -> L, degree preserving).
  FieldBundleSpec(BaseModel base, LInfinityStructure target, std::optional<FlatConnection> twist = std::nullopt);

  int n() const { return base_.n; }
  const BaseModel& base() const { return base_; }
  const LInfinityStructure& target() const { return target_; }
  const std::optional<FlatConnection>& twist() const { return twist_; }

  /// Fiber coordinates are numbered I * dim L + a.
  int fiber_count() const { return (1 << n()) * target_.dim(); }
  int fiber_I(int k) const { return k / target_.dim(); }
  int fiber_a(int k) const { return k % target_.dim(); }
  int fiber_index(int I, int a) const { return I * target_.dim() + a; }
  int ghost(int I, int a) const;

  Gen u(int I, int a, const Sigma& s = {}) const;
  Gen cartan(int I, int a, const Sigma& s = {}) const;
  static Gen dx(int i);
  static Gen xi(int i);
  static JetVar decode(Gen g);

  std::string text(Gen g) const;
  std::string text(const JetPoly& p) const;

 private:
  BaseModel base_;
  LInfinityStructure target_;
  std::optional<FlatConnection> twist_;
};

struct Grading {
  int form = 0;      // number of dx factors
  int ghost = 0;     // sum of ghost numbers of u and theta factors
  int weight = 0;    // number of u and theta factors
  int vertical = 0;  // number of theta factors
  int jet_order = 0; // max |sigma|
  auto operator<=>(const Grading&) const = default;
};

Grading grading(const FieldBundleSpec& spec, const Monomial& m);
/// Grading shared by all terms, or nullopt if mixed (zero polynomial: nullopt).
std::optional<Grading> homogeneous_grading(const FieldBundleSpec& spec, const JetPoly& p);

/// Scaling degree along direction j: sum over jet factors of (sigma_j + [j in I])
/// minus [dx^j present] minus the coefficient exponent (FlatPoly only).
/// s and d_h preserve it on torus zero modes and polynomial coefficients.
int scaling_degree(const FieldBundleSpec& spec, const Monomial& m, int j);

/// D_i: shifts jets and Cartan forms, differentiates coefficients.
JetPoly total_derivative(const FieldBundleSpec& spec, int i, const JetPoly& f);
/// d_h = dx^i D_i (dx^i multiplied from the left).
JetPoly d_h(const FieldBundleSpec& spec, const JetPoly& f);
/// d_v: u_s -> theta_s, theta -> 0, dx -> 0, coefficients -> 0.
JetPoly d_v(const FieldBundleSpec& spec, const JetPoly& f);

/// Evolutionary field given by its characteristic, one entry per fiber
/// coordinate; `odd` is the parity of the derivation.
struct EvolutionaryField {
  bool odd = false;
  std::vector<JetPoly> phi;
};

/// The prolonged field, with D_sigma(phi) cached across calls. Acts on Cartan
/// forms so that it graded-commutes with d_v. Not thread-safe; use one per thread.
class Prolongation {
 public:
  Prolongation(const FieldBundleSpec& spec, EvolutionaryField e);
  JetPoly operator()(const JetPoly& f);
  /// Image of a single generator.
  const JetPoly& image(Gen g);
  bool odd() const { return e_.odd; }

 private:
  const JetPoly& derived(int fiber, const Sigma& s);
  const FieldBundleSpec* spec_;
  EvolutionaryField e_;
  std::map<std::pair<int, Sigma>, JetPoly> cache_;
  std::map<Gen, JetPoly> gen_cache_;
};

JetPoly prolong(const FieldBundleSpec& spec, const EvolutionaryField& e, const JetPoly& f);

enum class BrstPart { Full, DeRham, Target };

/// Characteristic of s: s u^{(I,a)} = (-1)^{|I|} [xi^I-coefficient of
/// (xi^i (D_i + A_i) Phi^a + Q^a(Phi))]. `part` keeps one summand.
EvolutionaryField brst_s(const FieldBundleSpec& spec, BrstPart part = BrstPart::Full);

/// The lift h^i D_i + prolong(-h^i u_{1_i} + g) of a projectible field.
/// `h` holds one base function per direction, `g` one fiber-linear function
/// (no jets, parity of its coordinate) per fiber coordinate.
struct ProjectibleLift {
  std::vector<JetPoly> h;
  EvolutionaryField vertical;
};
ProjectibleLift lift_projectible(const FieldBundleSpec& spec, const std::vector<JetPoly>& h, const std::vector<JetPoly>& g);
JetPoly apply_lift(const FieldBundleSpec& spec, const ProjectibleLift& v, const JetPoly& f);
/// Horizontal part of the Lie derivative of theta^A_sigma along the lift;
/// it vanishes iff the Cartan span is preserved.
JetPoly cartan_defect(const FieldBundleSpec& spec, const ProjectibleLift& v, int fiber, const Sigma& sigma);

/// A form on the base: polynomial in dx with coefficient exponents only,
/// plus a flag raised when a product left the coefficient truncation.
struct BaseForm {
  JetPoly form;
  bool edge = false;
};

/// Sections are given by one base function per fiber coordinate (even ones only).
using Section = std::vector<JetPoly>;

/// d on base forms: dx^i d_i.
JetPoly base_d(const FieldBundleSpec& spec, const JetPoly& form);
/// u_sigma -> d_sigma s, theta -> 0.
BaseForm pullback_on_section(const FieldBundleSpec& spec, const JetPoly& omega, const Section& s);
/// Zero mode of the top-form coefficient; torus only.
Rational integrate_top(const FieldBundleSpec& spec, const JetPoly& omega, const Section& s);
/// The symmetric l-linear operator of a weight-l form, evaluated on l sections
/// (polarization, averaged over all assignments of sections to jet factors).
BaseForm apply_operator(const FieldBundleSpec& spec, const JetPoly& omega, const std::vector<Section>& sections);
/// Matrix of a weight-1 form as a linear operator from sections (fiber x
/// coefficient basis) to forms (dx^J x coefficient basis); torus only.
gla::SparseMatrix operator_matrix(const FieldBundleSpec& spec, const JetPoly& omega);

struct RandomJetOptions {
  int max_terms = 4;
  int max_weight = 2;
  int max_order = 2;
  int max_form = -1;          // -1: up to n
  bool cartan = false;        // allow Cartan factors
  bool even_fibers_only = false;
  int coefficient_spread = 1; // exponents drawn from [-spread, spread] (torus) or [0, spread] (flat)
};

JetPoly random_jet_poly(const FieldBundleSpec& spec, std::mt19937_64& rng, const RandomJetOptions& opt = {});
Section random_section(const FieldBundleSpec& spec, std::mt19937_64& rng, int spread = 1);

}  // namespace aksz
