#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "qmcforge/gf_poly.hpp"
#include "qmcforge/lattice.hpp"
#include "qmcforge/walsh_merit.hpp"
#include "qmcforge/weights.hpp"

namespace qmcforge::testing {

inline constexpr std::uint64_t kSeed = 20240611;

inline std::mt19937_64& rng() {
  static std::mt19937_64 gen(kSeed);
  return gen;
}

inline std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng());
}

inline double uniform_real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng()); }

inline LatticeRule random_lattice(std::int64_t n, int s) {
  std::vector<std::int64_t> z(s);
  for (auto& zj : z) zj = uniform_int(1, n - 1);
  return LatticeRule(n, z);
}

inline GFPoly random_poly_below(int b, int m) {
  for (;;) {
    GFPoly q = GFPoly::from_index(uniform_int(1, detail::ipow(b, m) - 1), b);
    if (!q.is_zero()) return q;
  }
}

inline PolyLatticeRule random_poly_lattice(const GFPoly& p, int s) {
  std::vector<GFPoly> q;
  for (int j = 0; j < s; ++j) q.push_back(random_poly_below(p.base(), p.degree()));
  return PolyLatticeRule(p, q);
}

/// Monic polynomial of degree m with random lower coefficients.
inline GFPoly random_monic(int b, int m) {
  std::vector<int> c(m + 1);
  for (int i = 0; i < m; ++i) c[i] = static_cast<int>(uniform_int(0, b - 1));
  c[m] = 1;
  return GFPoly(b, c);
}

/// Nonincreasing product weights in (0, 1].
inline WeightSet random_product_weights(int s) {
  std::vector<double> g(s);
  double cur = 1.0;
  for (auto& gj : g) {
    cur *= uniform_real(0.2, 1.0);
    gj = cur;
  }
  return WeightSet::product(g);
}

inline WeightSet power_weights(int s, double e) {
  std::vector<double> g(s);
  for (int j = 0; j < s; ++j) g[j] = std::pow(j + 1.0, e);
  return WeightSet::product(g);
}

}  // namespace qmcforge::testing
