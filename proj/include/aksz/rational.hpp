#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <string_view>

namespace aksz {

// GMP keeps mpq_class canonical (reduced, positive denominator) after every
// arithmetic operation; construction from raw parts must call canonicalize().
using Rational = mpq_class;
using Integer = mpz_class;

/// Parses "p", "-p" or "p/q" with decimal integers. Anything else (floats,
/// exponents, whitespace, zero denominators) yields nullopt.
std::optional<Rational> parse_rational(std::string_view text);

std::string to_string(const Rational& q);

inline bool is_zero(const Rational& q) { return sgn(q) == 0; }

/// Sum of numerator and denominator bit lengths; used as the pivot cost.
inline std::size_t bit_size(const Rational& q) {
  return mpz_sizeinbase(q.get_num_mpz_t(), 2) + mpz_sizeinbase(q.get_den_mpz_t(), 2);
}

}  // namespace aksz
