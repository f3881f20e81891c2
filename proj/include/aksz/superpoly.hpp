#pragma once

// Supercommutative polynomial algebra over Q.
//
// A generator is a 64-bit key whose lowest bit is its parity; the numeric order
// of keys is the fixed total order used for sign-normal forms. Every term also
// carries an even "base" exponent vector (x^mu for polynomial coefficients,
// z^k for Laurent/Fourier coefficients) which multiplies additively.

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "aksz/rational.hpp"

namespace aksz {

constexpr int kMaxBaseDim = 4;

using Gen = std::uint64_t;
using BaseExp = std::array<int, kMaxBaseDim>;

inline bool is_odd(Gen g) { return (g & 1u) != 0; }

struct Monomial {
  BaseExp base{};
  std::vector<Gen> gens;  // sorted; odd generators appear at most once

  auto operator<=>(const Monomial&) const = default;
  bool operator==(const Monomial&) const = default;

  bool odd() const;
  std::size_t degree() const { return gens.size(); }
};

/// Multiplies sign-normal monomials. Returns 0 when the product vanishes
/// (a repeated odd generator), otherwise +1/-1 and writes the normal form.
int multiply(const Monomial& a, const Monomial& b, Monomial& out);

/// Sorts an arbitrary product of generators into normal form in place.
/// Returns the Koszul sign, or 0 if an odd generator repeats.
int normalize(std::vector<Gen>& gens);

class SuperPoly {
 public:
  using Terms = std::map<Monomial, Rational>;

  SuperPoly() = default;
  static SuperPoly constant(const Rational& c);
  static SuperPoly generator(Gen g, const Rational& c = 1);
  static SuperPoly monomial(Monomial m, const Rational& c = 1);

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  void add_term(const Monomial& m, const Rational& c);
  SuperPoly& operator+=(const SuperPoly& other);
  SuperPoly& operator-=(const SuperPoly& other);
  SuperPoly& operator*=(const Rational& c);

  friend SuperPoly operator+(SuperPoly a, const SuperPoly& b) { return a += b; }
  friend SuperPoly operator-(SuperPoly a, const SuperPoly& b) { return a -= b; }
  friend SuperPoly operator*(SuperPoly a, const Rational& c) { return a *= c; }
  friend SuperPoly operator*(const Rational& c, SuperPoly a) { return a *= c; }
  friend SuperPoly operator*(const SuperPoly& a, const SuperPoly& b);
  SuperPoly operator-() const { return *this * Rational(-1); }

  bool operator==(const SuperPoly& other) const { return terms_ == other.terms_; }

  /// Keeps only the terms for which `keep` returns true.
  SuperPoly filtered(const std::function<bool(const Monomial&)>& keep) const;

 private:
  Terms terms_;
};

/// A (graded) derivation given by its values on generators and, optionally,
/// on base coefficient monomials. Odd derivations pick up the Koszul sign of
/// every odd factor they pass.
struct Derivation {
  bool odd = false;
  std::function<SuperPoly(Gen)> on_gen;
  std::function<SuperPoly(const BaseExp&)> on_base;  // image of the coefficient x^mu / z^k

  SuperPoly operator()(const SuperPoly& p) const;
  SuperPoly apply(const Monomial& m) const;
};

/// Even algebra homomorphism determined by generator images.
SuperPoly substitute(const SuperPoly& p, const std::function<SuperPoly(Gen)>& image);

}  // namespace aksz
