#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qmcforge/errors.hpp"

namespace qmcforge {

/// Primes accepted as the field order b.
inline bool is_supported_base(int b) { return b == 2 || b == 3 || b == 5 || b == 7; }

/// Polynomial over Z_b, b prime, coefficients stored lowest degree first with
/// no trailing zeros. The zero polynomial has no coefficients and degree -1,
/// standing in for minus infinity.
class GFPoly {
 public:
  explicit GFPoly(int base = 2) : base_(base) { check_base(); }

  GFPoly(int base, std::vector<int> coeffs) : base_(base), coeffs_(std::move(coeffs)) {
    check_base();
    for (int& c : coeffs_) c = ((c % base_) + base_) % base_;
    trim();
  }

  static GFPoly zero(int base) { return GFPoly(base); }
  static GFPoly one(int base) { return GFPoly(base, {1}); }
  static GFPoly monomial(int base, int degree, int coeff = 1) {
    std::vector<int> c(static_cast<std::size_t>(degree) + 1, 0);
    c.back() = coeff;
    return GFPoly(base, std::move(c));
  }

  /// Polynomial whose coefficient of x^i is the i-th base-b digit of index.
  static GFPoly from_index(std::int64_t index, int base) {
    if (index < 0) throw UsageError("polynomial index must be nonnegative");
    std::vector<int> c;
    for (; index > 0; index /= base) c.push_back(static_cast<int>(index % base));
    return GFPoly(base, std::move(c));
  }

  int base() const { return base_; }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }
  const std::vector<int>& coeffs() const { return coeffs_; }
  int coeff(int i) const { return i >= 0 && i < static_cast<int>(coeffs_.size()) ? coeffs_[i] : 0; }
  int leading() const { return coeffs_.empty() ? 0 : coeffs_.back(); }

  /// sum_i coeff_i b^i; the integer ordering used for tie-breaks.
  std::int64_t index() const {
    std::int64_t v = 0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) v = v * base_ + *it;
    return v;
  }

  friend bool operator==(const GFPoly&, const GFPoly&) = default;

  friend GFPoly operator+(const GFPoly& a, const GFPoly& c) {
    same_base(a, c);
    std::vector<int> r(std::max(a.coeffs_.size(), c.coeffs_.size()), 0);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = a.coeff(static_cast<int>(i)) + c.coeff(static_cast<int>(i));
    return GFPoly(a.base_, std::move(r));
  }

  GFPoly operator-() const {
    std::vector<int> r(coeffs_);
    for (int& x : r) x = -x;
    return GFPoly(base_, std::move(r));
  }

  friend GFPoly operator-(const GFPoly& a, const GFPoly& c) { return a + (-c); }

  friend GFPoly operator*(const GFPoly& a, const GFPoly& c) {
    same_base(a, c);
    if (a.is_zero() || c.is_zero()) return GFPoly(a.base_);
    std::vector<int> r(a.coeffs_.size() + c.coeffs_.size() - 1, 0);
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
      if (a.coeffs_[i] == 0) continue;
      for (std::size_t k = 0; k < c.coeffs_.size(); ++k) r[i + k] = (r[i + k] + a.coeffs_[i] * c.coeffs_[k]) % a.base_;
    }
    return GFPoly(a.base_, std::move(r));
  }

  GFPoly scaled(int c) const {
    std::vector<int> r(coeffs_);
    for (int& x : r) x *= c;
    return GFPoly(base_, std::move(r));
  }

  /// Quotient and remainder of a / d (d nonzero).
  friend std::pair<GFPoly, GFPoly> divmod(const GFPoly& a, const GFPoly& d) {
    same_base(a, d);
    if (d.is_zero()) throw UsageError("polynomial division by zero");
    const int b = a.base_;
    const int inv_lead = inverse_mod(d.leading(), b);
    std::vector<int> rem(a.coeffs_);
    const int dd = d.degree();
    std::vector<int> quot(std::max(0, a.degree() - dd + 1), 0);
    for (int i = a.degree(); i >= dd; --i) {
      const int c = rem[i] * inv_lead % b;
      if (c == 0) continue;
      quot[i - dd] = c;
      for (int k = 0; k <= dd; ++k) rem[i - dd + k] = ((rem[i - dd + k] - c * d.coeffs_[k]) % b + b) % b;
    }
    return {GFPoly(b, std::move(quot)), GFPoly(b, std::move(rem))};
  }

  friend GFPoly operator%(const GFPoly& a, const GFPoly& d) { return divmod(a, d).second; }

  std::string to_string() const {
    if (is_zero()) return "0";
    std::string out;
    for (int i = degree(); i >= 0; --i) {
      const int c = coeffs_[i];
      if (c == 0) continue;
      if (!out.empty()) out += " + ";
      if (c != 1 || i == 0) out += std::to_string(c);
      if (i >= 1) out += (c != 1 ? "*x" : "x");
      if (i >= 2) out += "^" + std::to_string(i);
    }
    return out;
  }

  static int inverse_mod(int a, int b) {
    a = ((a % b) + b) % b;
    for (int x = 1; x < b; ++x) {
      if (a * x % b == 1) return x;
    }
    throw UsageError("no inverse modulo " + std::to_string(b));
  }

 private:
  void check_base() const {
    if (!is_supported_base(base_)) throw UsageError("polynomial base must be a prime <= 7");
  }
  void trim() {
    while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
  }
  static void same_base(const GFPoly& a, const GFPoly& c) {
    if (a.base_ != c.base_) throw UsageError("polynomial base mismatch");
  }

  int base_;
  std::vector<int> coeffs_;
};

/// (a * c) mod p.
inline GFPoly gf_mulmod(const GFPoly& a, const GFPoly& c, const GFPoly& p) {
  if (p.is_zero()) throw UsageError("gf_mulmod: modulus must be nonzero");
  return (a * c) % p;
}

/// Trial division by every monic polynomial of degree 1..floor(deg p / 2).
inline bool gf_is_irreducible(const GFPoly& p) {
  const int d = p.degree();
  if (d < 1) throw UsageError("gf_is_irreducible: degree must be at least 1");
  const int b = p.base();
  std::int64_t work = 0;
  std::int64_t span = 1;
  for (int e = 1; e <= d / 2; ++e) {
    span *= b;
    work += span;
    if (work > (std::int64_t{1} << 20)) throw ResourceError("gf_is_irreducible: too many trial divisors");
  }
  span = 1;
  for (int e = 1; e <= d / 2; ++e) {
    span *= b;
    for (std::int64_t low = 0; low < span; ++low) {
      const GFPoly divisor = GFPoly::from_index(span + low, b);  // monic of degree e
      if ((p % divisor).is_zero()) return false;
    }
  }
  return true;
}

/// Lexicographically smallest (by integer index) monic irreducible polynomial of degree m.
inline GFPoly smallest_irreducible(int b, int m) {
  if (m < 1) throw UsageError("smallest_irreducible: degree must be at least 1");
  std::int64_t span = 1;
  for (int i = 0; i < m; ++i) span *= b;
  for (std::int64_t low = 0; low < span; ++low) {
    GFPoly cand = GFPoly::from_index(span + low, b);
    if (gf_is_irreducible(cand)) return cand;
  }
  throw std::logic_error("smallest_irreducible: none found");
}

/// Digits t_1..t_m (base b) of a number in [0,1); value = numerator() / b^m.
struct DigitExpansion {
  int base = 2;
  std::vector<int> digits;

  int m() const { return static_cast<int>(digits.size()); }
  std::int64_t numerator() const {
    std::int64_t v = 0;
    for (int t : digits) v = v * base + t;
    return v;
  }
  std::int64_t denominator() const {
    std::int64_t d = 1;
    for (std::size_t i = 0; i < digits.size(); ++i) d *= base;
    return d;
  }
  double value() const { return static_cast<double>(numerator()) / static_cast<double>(denominator()); }
};

/// First m Laurent digits of (numer mod p) / p, with deg p = m.
///
/// Writing a = numer mod p and a/p = sum_{i>=1} t_i x^{-i}, matching the
/// coefficient of x^{m-k} in a = p * sum t_i x^{-i} gives
///   p_m t_k = a_{m-k} - sum_{i<k} p_{m-k+i} t_i   (mod b).
inline DigitExpansion nu_m(const GFPoly& numer, const GFPoly& p, int m) {
  if (p.degree() != m) throw UsageError("nu_m: modulus degree must equal m");
  if (numer.base() != p.base()) throw UsageError("nu_m: base mismatch");
  const int b = p.base();
  const GFPoly a = numer % p;
  const int inv_lead = GFPoly::inverse_mod(p.leading(), b);
  DigitExpansion out;
  out.base = b;
  out.digits.assign(static_cast<std::size_t>(m), 0);
  for (int k = 1; k <= m; ++k) {
    int acc = a.coeff(m - k);
    for (int i = 1; i < k; ++i) acc -= p.coeff(m - k + i) * out.digits[i - 1];
    acc = ((acc % b) + b) % b;
    out.digits[k - 1] = acc * inv_lead % b;
  }
  return out;
}

/// kappa_0 + kappa_1 x + ... + kappa_{m-1} x^{m-1} from the base-b digits of k.
inline GFPoly tr_m(std::int64_t k, int m, int b) {
  if (k < 0) throw UsageError("tr_m: k must be nonnegative");
  std::vector<int> c;
  for (int i = 0; i < m && k > 0; ++i, k /= b) c.push_back(static_cast<int>(k % b));
  return GFPoly(b, std::move(c));
}

}  // namespace qmcforge
