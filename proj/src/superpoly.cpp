#include "aksz/superpoly.hpp"

#include <algorithm>

namespace aksz {

bool Monomial::odd() const {
  bool parity = false;
  for (Gen g : gens) parity ^= is_odd(g);
  return parity;
}

int multiply(const Monomial& a, const Monomial& b, Monomial& out) {
  out.base = a.base;
  for (int i = 0; i < kMaxBaseDim; ++i) out.base[i] += b.base[i];
  out.gens.clear();
  out.gens.reserve(a.gens.size() + b.gens.size());

  // odd generators of `a` not yet emitted
  int odd_left = 0;
  for (Gen g : a.gens) odd_left += is_odd(g);

  int sign = 1;
  std::size_t i = 0, j = 0;
  while (i < a.gens.size() || j < b.gens.size()) {
    if (j == b.gens.size() || (i < a.gens.size() && a.gens[i] <= b.gens[j])) {
      if (j < b.gens.size() && a.gens[i] == b.gens[j] && is_odd(a.gens[i])) return 0;
      odd_left -= is_odd(a.gens[i]);
      out.gens.push_back(a.gens[i++]);
    } else {
      if (is_odd(b.gens[j]) && (odd_left & 1)) sign = -sign;
      out.gens.push_back(b.gens[j++]);
    }
  }
  return sign;
}

int normalize(std::vector<Gen>& gens) {
  int sign = 1;
  for (std::size_t k = 1; k < gens.size(); ++k) {
    for (std::size_t m = k; m > 0 && gens[m - 1] >= gens[m]; --m) {
      if (gens[m - 1] == gens[m]) {
        if (is_odd(gens[m])) return 0;
        break;
      }
      if (is_odd(gens[m - 1]) && is_odd(gens[m])) sign = -sign;
      std::swap(gens[m - 1], gens[m]);
    }
  }
  return sign;
}

SuperPoly SuperPoly::constant(const Rational& c) {
  SuperPoly p;
  p.add_term(Monomial{}, c);
  return p;
}

SuperPoly SuperPoly::generator(Gen g, const Rational& c) {
  SuperPoly p;
  p.add_term(Monomial{{}, {g}}, c);
  return p;
}

SuperPoly SuperPoly::monomial(Monomial m, const Rational& c) {
  SuperPoly p;
  p.add_term(m, c);
  return p;
}

void SuperPoly::add_term(const Monomial& m, const Rational& c) {
  if (aksz::is_zero(c)) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (aksz::is_zero(it->second)) terms_.erase(it);
  }
}

SuperPoly& SuperPoly::operator+=(const SuperPoly& other) {
  for (const auto& [m, c] : other.terms_) add_term(m, c);
  return *this;
}

SuperPoly& SuperPoly::operator-=(const SuperPoly& other) {
  for (const auto& [m, c] : other.terms_) add_term(m, -c);
  return *this;
}

SuperPoly& SuperPoly::operator*=(const Rational& c) {
  if (aksz::is_zero(c)) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, v] : terms_) v *= c;
  return *this;
}

SuperPoly operator*(const SuperPoly& a, const SuperPoly& b) {
  SuperPoly out;
  Monomial prod;
  for (const auto& [ma, ca] : a.terms()) {
    for (const auto& [mb, cb] : b.terms()) {
      int sign = multiply(ma, mb, prod);
      if (sign == 0) continue;
      Rational c = ca * cb;
      if (sign < 0) c = -c;
      out.add_term(prod, c);
    }
  }
  return out;
}

SuperPoly SuperPoly::filtered(const std::function<bool(const Monomial&)>& keep) const {
  SuperPoly out;
  for (const auto& [m, c] : terms_)
    if (keep(m)) out.terms_.emplace(m, c);
  return out;
}

SuperPoly Derivation::apply(const Monomial& m) const {
  SuperPoly out;
  if (on_base) {
    SuperPoly rest = SuperPoly::monomial(Monomial{{}, m.gens});
    out += on_base(m.base) * rest;
  }
  if (!on_gen) return out;

  bool prefix_odd = false;
  Monomial prefix{m.base, {}};
  Monomial piece, tmp;
  for (std::size_t k = 0; k < m.gens.size(); ++k) {
    Gen g = m.gens[k];
    SuperPoly image = on_gen(g);
    if (!image.is_zero()) {
      Monomial suffix{{}, std::vector<Gen>(m.gens.begin() + static_cast<long>(k) + 1, m.gens.end())};
      int base_sign = (odd && prefix_odd) ? -1 : 1;
      for (const auto& [im, ic] : image.terms()) {
        int s1 = multiply(prefix, im, tmp);
        if (s1 == 0) continue;
        int s2 = multiply(tmp, suffix, piece);
        if (s2 == 0) continue;
        Rational c = ic;
        if (base_sign * s1 * s2 < 0) c = -c;
        out.add_term(piece, c);
      }
    }
    prefix.gens.push_back(g);
    prefix_odd ^= is_odd(g);
  }
  return out;
}

SuperPoly Derivation::operator()(const SuperPoly& p) const {
  SuperPoly out;
  for (const auto& [m, c] : p.terms()) {
    SuperPoly part = apply(m);
    part *= c;
    out += part;
  }
  return out;
}

SuperPoly substitute(const SuperPoly& p, const std::function<SuperPoly(Gen)>& image) {
  SuperPoly out;
  for (const auto& [m, c] : p.terms()) {
    SuperPoly acc = SuperPoly::monomial(Monomial{m.base, {}}, c);
    for (Gen g : m.gens) acc = acc * image(g);
    out += acc;
  }
  return out;
}

}  // namespace aksz
