#pragma once

// Brute-force references for tests. Nothing here calls into the merit,
// construction or discrepancy code it is used to check.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "qmcforge/lattice.hpp"
#include "qmcforge/walsh_merit.hpp"
#include "qmcforge/weights.hpp"

namespace qmcforge::oracle {

struct DualVector {
  std::vector<std::int64_t> k;
  bool zero = false;
};

inline std::int64_t box_count(std::int64_t side, int s) {
  std::int64_t total = 1;
  for (int j = 0; j < s; ++j) {
    total *= side;
    if (total > 100'000'000) throw std::length_error("oracle enumeration over 1e8 cells");
  }
  return total;
}

/// All k in [-K, K]^s with k.z = 0 mod N, in lexicographic order.
inline std::vector<DualVector> dual_enumerate_lattice(const LatticeRule& rule, std::int64_t K) {
  const int s = rule.dimension();
  const std::int64_t n = rule.modulus(), side = 2 * K + 1, cells = box_count(side, s);
  std::vector<DualVector> out;
  std::vector<std::int64_t> k(s);
  for (std::int64_t c = 0; c < cells; ++c) {
    std::int64_t rest = c, dot = 0;
    bool zero = true;
    for (int j = s - 1; j >= 0; --j) {
      k[j] = rest % side - K;
      rest /= side;
    }
    for (int j = 0; j < s; ++j) {
      dot += k[j] * rule.generator()[j];
      zero = zero && k[j] == 0;
    }
    if (((dot % n) + n) % n == 0) out.push_back({k, zero});
  }
  return out;
}

// Polynomials over Z_b as coefficient vectors, lowest degree first.
using Poly = std::vector<int>;

inline void trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

inline Poly poly_mul(const Poly& a, const Poly& c, int b) {
  if (a.empty() || c.empty()) return {};
  Poly r(a.size() + c.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < c.size(); ++j) r[i + j] = (r[i + j] + a[i] * c[j]) % b;
  }
  trim(r);
  return r;
}

inline int inverse(int a, int b) {
  for (int x = 1; x < b; ++x) {
    if (a * x % b == 1) return x;
  }
  throw std::logic_error("no inverse");
}

inline Poly poly_mod(Poly a, const Poly& p, int b) {
  trim(a);
  const int dp = static_cast<int>(p.size()) - 1, inv = inverse(p.back(), b);
  while (static_cast<int>(a.size()) - 1 >= dp) {
    const int shift = static_cast<int>(a.size()) - 1 - dp, t = a.back() * inv % b;
    for (int i = 0; i <= dp; ++i) a[shift + i] = ((a[shift + i] - t * p[i]) % b + b) % b;
    trim(a);
  }
  return a;
}

/// Base-b digits of k, lowest first, truncated to `count` digits.
inline Poly digits_of(std::int64_t k, int b, int count) {
  Poly d(count, 0);
  for (int i = 0; i < count && k > 0; ++i, k /= b) d[i] = static_cast<int>(k % b);
  trim(d);
  return d;
}

inline Poly coeffs(const GFPoly& g) {
  Poly out(g.coeffs().begin(), g.coeffs().end());
  trim(out);
  return out;
}

/// All k in {0..b^cap - 1}^s with sum_j tr_m(k_j) q_j = 0 mod p, lexicographic.
inline std::vector<std::vector<std::int64_t>> dual_enumerate_poly(const PolyLatticeRule& rule, int digit_cap) {
  const int b = rule.base(), m = rule.m(), s = rule.dimension();
  std::int64_t side = 1;
  for (int i = 0; i < digit_cap; ++i) side *= b;
  const std::int64_t cells = box_count(side, s);
  const Poly p = coeffs(rule.modulus());
  std::vector<Poly> q;
  for (const auto& g : rule.generator()) q.push_back(coeffs(g));
  std::vector<std::vector<std::int64_t>> out;
  std::vector<std::int64_t> k(s);
  for (std::int64_t c = 0; c < cells; ++c) {
    std::int64_t rest = c;
    for (int j = s - 1; j >= 0; --j) {
      k[j] = rest % side;
      rest /= side;
    }
    Poly acc;
    for (int j = 0; j < s; ++j) {
      const Poly term = poly_mul(digits_of(k[j], b, m), q[j], b);
      acc.resize(std::max(acc.size(), term.size()), 0);
      for (std::size_t i = 0; i < term.size(); ++i) acc[i] = (acc[i] + term[i]) % b;
    }
    if (poly_mod(acc, p, b).empty()) out.push_back(k);
  }
  return out;
}

/// First `count` digits t_1, t_2, ... of numer/p = sum t_i x^-i, by long division.
inline std::vector<int> reference_laurent_digits(const Poly& numer, const Poly& p, int b, int count) {
  if (count > 64) throw std::invalid_argument("count <= 64");
  const int dp = static_cast<int>(p.size()) - 1, inv = inverse(p.back(), b);
  Poly r = poly_mod(numer, p, b);
  std::vector<int> out;
  for (int i = 0; i < count; ++i) {
    r.insert(r.begin(), 0);  // times x
    trim(r);
    int digit = 0;
    if (static_cast<int>(r.size()) - 1 == dp) {
      digit = r.back() * inv % b;
      for (int c = 0; c <= dp; ++c) r[c] = ((r[c] - digit * p[c]) % b + b) % b;
      trim(r);
    }
    out.push_back(digit);
  }
  return out;
}

/// Point digits of a polynomial lattice rule: pts[n][j][i] is digit i+1 of
/// coordinate j of point n, with n running over G_m in index order.
inline std::vector<std::vector<std::vector<int>>> poly_point_digits(const PolyLatticeRule& rule) {
  const int b = rule.base(), m = rule.m(), s = rule.dimension();
  const Poly p = coeffs(rule.modulus());
  std::int64_t size = 1;
  for (int i = 0; i < m; ++i) size *= b;
  std::vector<std::vector<std::vector<int>>> pts(size, std::vector<std::vector<int>>(s));
  for (std::int64_t n = 0; n < size; ++n) {
    for (int j = 0; j < s; ++j) {
      pts[n][j] = reference_laurent_digits(poly_mul(digits_of(n, b, m), coeffs(rule.generator()[j]), b), p, b, m);
    }
  }
  return pts;
}

inline double r_alpha_lattice(const std::vector<std::int64_t>& k, double alpha, const WeightSet& w) {
  std::vector<int> u;
  double r = 1.0;
  for (std::size_t j = 0; j < k.size(); ++j) {
    if (k[j] != 0) {
      u.push_back(static_cast<int>(j) + 1);
      r *= std::pow(std::abs(static_cast<double>(k[j])), -2.0 * alpha);
    }
  }
  return u.empty() ? 1.0 : w.weight(u) * r;
}

inline int digit_count(std::int64_t k, int b) {
  int a = 0;
  for (; k > 0; k /= b) ++a;
  return a;
}

inline double r_alpha_walsh(const std::vector<std::int64_t>& k, double alpha, const WeightSet& w, int b) {
  std::vector<int> u;
  double r = 1.0;
  for (std::size_t j = 0; j < k.size(); ++j) {
    if (k[j] != 0) {
      u.push_back(static_cast<int>(j) + 1);
      r *= std::pow(static_cast<double>(b), -2.0 * alpha * digit_count(k[j], b));
    }
  }
  return u.empty() ? 1.0 : w.weight(u) * r;
}

/// Truncated P for a lattice rule: the sum of r over nonzero duals in [-K, K]^s.
inline double p_lattice_truncated(const LatticeRule& rule, double alpha, const WeightSet& w, std::int64_t K) {
  double total = 0.0;
  for (const auto& d : dual_enumerate_lattice(rule, K)) {
    if (!d.zero) total += r_alpha_lattice(d.k, alpha, w);
  }
  return total;
}

/// Truncated P for a polynomial lattice rule over duals with components below b^cap.
inline double p_walsh_truncated(const PolyLatticeRule& rule, double alpha, const WeightSet& w, int digit_cap) {
  double total = 0.0;
  for (const auto& k : dual_enumerate_poly(rule, digit_cap)) {
    if (std::any_of(k.begin(), k.end(), [](std::int64_t v) { return v != 0; })) {
      total += r_alpha_walsh(k, alpha, w, rule.base());
    }
  }
  return total;
}

/// (1/N) sum_n exp(2 pi i k.x_n) with the points generated directly from z.
inline std::complex<double> lattice_char_sum(const LatticeRule& rule, const std::vector<std::int64_t>& k) {
  const std::int64_t n = rule.modulus();
  std::complex<double> total = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    std::int64_t phase = 0;
    for (std::size_t j = 0; j < k.size(); ++j) {
      phase = (phase + (((i * rule.generator()[j]) % n) * (((k[j] % n) + n) % n)) % n) % n;
    }
    total += std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(phase) / static_cast<double>(n));
  }
  return total / static_cast<double>(n);
}

/// (1/b^m) sum_n wal_k(x_n) from the digits of poly_point_digits.
inline std::complex<double> walsh_char_sum(const std::vector<std::vector<std::vector<int>>>& pts, int b,
                                           const std::vector<std::int64_t>& k) {
  std::complex<double> total = 0.0;
  for (const auto& x : pts) {
    std::int64_t e = 0;
    for (std::size_t j = 0; j < k.size(); ++j) {
      std::int64_t kj = k[j];
      for (std::size_t i = 0; kj > 0; ++i, kj /= b) {
        if (i >= x[j].size()) break;  // digits beyond m are zero
        e += (kj % b) * x[j][i];
      }
    }
    total += std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(e % b) / b);
  }
  return total / static_cast<double>(pts.size());
}

/// Lower bound on the worst-case error from unit-norm single-frequency
/// probes f_k = r(k)^{1/2} e_k over the first `probe_count` nonzero k of a box.
inline double wce_by_function_probe(const LatticeRule& rule, double alpha, const WeightSet& w, int probe_count) {
  const int s = rule.dimension();
  std::int64_t K = 1;
  while (box_count(2 * K + 1, s) - 1 < probe_count && K < rule.modulus()) ++K;
  double best = 0.0;
  int used = 0;
  const std::int64_t side = 2 * K + 1, cells = box_count(side, s);
  std::vector<std::int64_t> k(s);
  for (std::int64_t c = 0; c < cells && used < probe_count; ++c) {
    std::int64_t rest = c;
    bool zero = true;
    for (int j = s - 1; j >= 0; --j) {
      k[j] = rest % side - K;
      rest /= side;
      zero = zero && k[j] == 0;
    }
    if (zero) continue;
    ++used;
    best = std::max(best, std::sqrt(r_alpha_lattice(k, alpha, w)) * std::abs(lattice_char_sum(rule, k)));
  }
  return best;
}

inline double wce_by_function_probe(const PolyLatticeRule& rule, double alpha, const WeightSet& w, int probe_count) {
  const int s = rule.dimension(), b = rule.base();
  const auto pts = poly_point_digits(rule);
  std::int64_t side = b;
  while (box_count(side, s) - 1 < probe_count && side < 1'000'000) side *= b;
  double best = 0.0;
  int used = 0;
  std::vector<std::int64_t> k(s);
  for (std::int64_t c = 1; c < box_count(side, s) && used < probe_count; ++c, ++used) {
    std::int64_t rest = c;
    for (int j = s - 1; j >= 0; --j) {
      k[j] = rest % side;
      rest /= side;
    }
    best = std::max(best, std::sqrt(r_alpha_walsh(k, alpha, w, b)) * std::abs(walsh_char_sum(pts, b, k)));
  }
  return best;
}

inline std::int64_t brute_totient(std::int64_t n) {
  std::int64_t count = 0;
  for (std::int64_t k = 1; k <= n; ++k) {
    if (std::gcd(k, n) == 1) ++count;
  }
  return count;
}

/// zeta(x) by direct summation with an integral tail estimate (Euler-Maclaurin to first order).
inline double brute_zeta(double x, std::int64_t terms = 2'000'000) {
  double total = 0.0;
  for (std::int64_t k = terms; k >= 1; --k) total += std::pow(static_cast<double>(k), -x);
  const double t = static_cast<double>(terms);
  return total + std::pow(t, 1.0 - x) / (x - 1.0) - 0.5 * std::pow(t, -x);
}

/// Star discrepancy of a point set on the grid (1/den)Z^s, s in {1, 2}: for
/// every grid corner t compare the counts of the open box [0, t) and the
/// closed box [0, t] against the volume.
inline double exact_star_discrepancy(const PointSet& pts) {
  const std::int64_t den = pts.denominator, n = static_cast<std::int64_t>(pts.size());
  const int s = pts.dimension;
  if (s < 1 || s > 2) throw std::invalid_argument("oracle supports s <= 2");
  double best = 0.0;
  const std::int64_t t2_max = s == 2 ? den : 0;
  for (std::int64_t t1 = 0; t1 <= den; ++t1) {
    for (std::int64_t t2 = 0; t2 <= t2_max; ++t2) {
      std::int64_t open = 0, closed = 0;
      for (const auto& x : pts.numerators) {
        const bool o = x[0] < t1 && (s == 1 || x[1] < t2);
        const bool c = x[0] <= t1 && (s == 1 || x[1] <= t2);
        open += o;
        closed += c;
      }
      const double vol = static_cast<double>(t1) / den * (s == 2 ? static_cast<double>(t2) / den : 1.0);
      best = std::max(best, vol - static_cast<double>(open) / n);
      best = std::max(best, static_cast<double>(closed) / n - vol);
    }
  }
  return best;
}

}  // namespace qmcforge::oracle
