#pragma once

#include <array>
#include <cmath>
#include <numbers>

#include "qmcforge/errors.hpp"

namespace qmcforge {

/// Even Bernoulli polynomial B_{2 alpha}(x) for alpha in {1,2,3,4}.
inline double bernoulli_even(int alpha, double x) {
  // monomial coefficients, highest degree first
  static constexpr std::array<double, 3> b2 = {1.0, -1.0, 1.0 / 6.0};
  static constexpr std::array<double, 5> b4 = {1.0, -2.0, 1.0, 0.0, -1.0 / 30.0};
  static constexpr std::array<double, 7> b6 = {1.0, -3.0, 5.0 / 2.0, 0.0, -1.0 / 2.0, 0.0, 1.0 / 42.0};
  static constexpr std::array<double, 9> b8 = {1.0, -4.0, 14.0 / 3.0, 0.0, -7.0 / 3.0, 0.0, 2.0 / 3.0, 0.0, -1.0 / 30.0};
  auto horner = [x](const auto& c) {
    double acc = 0.0;
    for (double ci : c) acc = acc * x + ci;
    return acc;
  };
  switch (alpha) {
    case 1: return horner(b2);
    case 2: return horner(b4);
    case 3: return horner(b6);
    case 4: return horner(b8);
    default: throw UnsupportedError("bernoulli_even: smoothness must be 1, 2, 3 or 4");
  }
}

/// (2 pi)^{2a} / ((-1)^{a+1} (2a)!), the factor turning B_{2a}(x) into the
/// one-dimensional Korobov kernel sum  sum_{k != 0} |k|^{-2a} e^{2 pi i k x}.
inline double korobov_kernel_scale(int alpha) {
  double fact = 1.0;
  for (int i = 2; i <= 2 * alpha; ++i) fact *= i;
  const double sign = (alpha % 2 == 1) ? 1.0 : -1.0;
  return std::pow(2.0 * std::numbers::pi, 2 * alpha) / (sign * fact);
}

/// True when alpha is one of the integer smoothness values with a Bernoulli closed form.
inline bool has_closed_form(double alpha) {
  return alpha == 1.0 || alpha == 2.0 || alpha == 3.0 || alpha == 4.0;
}

}  // namespace qmcforge
