#pragma once

// Exact models of the base manifold X.
//
//   FlatPoly(n, D)      polynomial coefficients x^mu, |mu| <= D, on R^n
//   TorusFourier(n, N)  Laurent coefficients z^k, |k_j| <= N, on T^n, with
//                       d_j z^k = k_j z^k (z_j the exponential coordinate)
//   External(C)         a user complex standing for Omega(X); Kunneth side only

#include <optional>
#include <vector>

#include "aksz/gla/complex.hpp"
#include "aksz/superpoly.hpp"

namespace aksz {

enum class BaseKind { FlatPoly, TorusFourier, External };

struct BaseModel {
  BaseKind kind = BaseKind::TorusFourier;
  int n = 1;
  int D = 0;  // FlatPoly
  int N = 0;  // TorusFourier
  gla::TruncatedComplex external;

  static BaseModel flat(int n, int D);
  static BaseModel torus(int n, int N);
  static BaseModel from_complex(gla::TruncatedComplex c);

  /// Throws StructuralError on n outside 1..kMaxBaseDim or negative bounds.
  void validate() const;
  bool has_coordinates() const { return kind != BaseKind::External; }
};

/// Coefficient monomials in canonical order.
std::vector<BaseExp> coefficient_basis(const BaseModel& m);
bool in_truncation(const BaseModel& m, const BaseExp& e);

/// d/dx^i of a coefficient monomial: the scalar and the resulting exponent
/// (scalar 0 when the derivative vanishes).
std::pair<Rational, BaseExp> base_derivative(const BaseModel& m, int i, const BaseExp& e);
/// The coordinate derivation as a map on even base exponents (for Derivation::on_base).
SuperPoly base_derivative_poly(const BaseModel& m, int i, const BaseExp& e);

/// Constant matrices A_1..A_n on a twist space of dimension `dim`.
struct FlatConnection {
  int dim = 1;
  std::vector<gla::SparseMatrix> A;

  /// Throws IntegrityError when some [A_i, A_j] != 0, StructuralError on shapes.
  void validate(int n) const;
};

/// Omega^0 -> ... -> Omega^n over the coefficient ring (tensored with the twist
/// space), differential sum_i dx^i (d_i + A_i). Restricting to one Fourier
/// mode is possible on the torus. FlatPoly flags the degrees p >= 1, where the
/// top coefficient degree cuts off primitives.
gla::TruncatedComplex de_rham_complex(const BaseModel& m, const std::optional<FlatConnection>& twist = std::nullopt,
                                      const std::optional<BaseExp>& mode = std::nullopt);

/// H_DR of the model. Torus and External: direct cohomology. FlatPoly: the
/// stage quotient ker(d on V_D) / d(V_{D+1}), compared with the next stage for
/// stability.
gla::CohomologyReport base_cohomology(const BaseModel& m);

/// dx^i wedge dx^J for a sorted J: sign and the sorted result (sign 0 if i in J).
std::pair<int, std::vector<int>> wedge_front(int i, const std::vector<int>& J);
/// p-element subsets of {0..n-1}, lexicographic.
std::vector<std::vector<int>> subsets(int n, int p);

}  // namespace aksz
