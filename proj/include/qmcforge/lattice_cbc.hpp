#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "qmcforge/detail/parallel.hpp"
#include "qmcforge/korobov_merit.hpp"
#include "qmcforge/lattice.hpp"
#include "qmcforge/weights.hpp"

namespace qmcforge {

/// One CBC step: the chosen component (z_l, or the integer encoding of q_l)
/// and the merit of the rule after fixing it.
struct CbcStep {
  std::int64_t choice;
  double merit;
};

struct CbcTrace {
  std::vector<CbcStep> steps;
  std::int64_t evaluations = 0;
};

/// Relative tolerance under which two candidate merits count as tied.
inline constexpr double kCbcTieTolerance = 1e-12;

/// Index of the smallest value, scanning in order; a later value replaces the
/// running minimum only when it is smaller by more than the tie tolerance.
inline std::size_t tie_break_argmin(const std::vector<double>& values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] < values[best] - kCbcTieTolerance * std::abs(values[best])) best = i;
  }
  return best;
}

namespace detail {

// Merit of a lattice rule under fixed (N, alpha, weights): Bernoulli closed form
// for integer alpha, truncated dual series otherwise.
class LatticeMeritEvaluator {
 public:
  static constexpr std::int64_t kSeriesRadius = std::int64_t{1} << 16;

  LatticeMeritEvaluator(std::int64_t n, const SpaceParams& params) : params_(params) {
    if (has_closed_form(params.alpha)) {
      kernel_ = korobov_kernel_table(n, static_cast<int>(params.alpha));
    } else {
      residues_ = residue_sums(n, params.alpha, std::max(n, kSeriesRadius));
    }
  }

  double operator()(const LatticeRule& rule) const {
    if (!kernel_.empty()) {
      return *closed_form_merit(lattice_points(rule), params_.weights, kernel_, false).p_value;
    }
    return *series_merit(rule, params_.weights, residues_, false).p_value;
  }

 private:
  const SpaceParams& params_;
  std::vector<double> kernel_;
  ResidueSums residues_;
};

}  // namespace detail

/// Component-by-component construction of a rank-1 lattice rule: z_1 = 1,
/// then each z_{l+1} minimizes P over {1..N-1} with earlier components fixed.
/// Ties go to the smallest candidate. Integer alpha in {1..4} uses the
/// Bernoulli closed form; other alpha > 1/2 use the truncated series (s <= 4).
inline std::pair<LatticeRule, CbcTrace> cbc_construct(std::int64_t n, int s, const SpaceParams& params) {
  if (n < 2) throw UsageError("cbc_construct: N must be at least 2");
  params.weights.require_dimension(s);
  if (params.weights.kind() == WeightKind::Explicit && s > 12) {
    throw ResourceError("cbc_construct: explicit weights limited to s <= 12");
  }
  const detail::LatticeMeritEvaluator merit(n, params);

  std::vector<std::int64_t> z{1};
  CbcTrace trace;
  trace.steps.push_back({1, merit(LatticeRule(n, z))});
  trace.evaluations = 1;

  std::vector<double> values(static_cast<std::size_t>(n - 1));
  for (int dim = 2; dim <= s; ++dim) {
    detail::parallel_for(values.size(), [&](std::size_t i) {
      auto candidate = z;
      candidate.push_back(static_cast<std::int64_t>(i) + 1);
      values[i] = merit(LatticeRule(n, std::move(candidate)));
    });
    trace.evaluations += static_cast<std::int64_t>(values.size());
    const std::size_t best = tie_break_argmin(values);
    z.push_back(static_cast<std::int64_t>(best) + 1);
    trace.steps.push_back({z.back(), values[best]});
  }
  return {LatticeRule(n, std::move(z)), std::move(trace)};
}

/// Fast CBC for product weights and prime N.
///
/// With prodstate(n) = prod_{j<=l} (1 + gamma_j omega({n z_j / N})), the merit of
/// candidate z is  mean(prodstate) - 1 + (gamma_{l+1}/N) sum_n omega({n z/N}) prodstate(n).
/// Indexing nonzero n and z by powers of a primitive root turns the sum over
/// n into a circular correlation, evaluated for all z at once by FFT.
/// Candidates whose FFT value lies near the minimum are re-evaluated with the
/// naive construction's evaluator before the tie-break, so both pick the same z.
inline std::pair<LatticeRule, CbcTrace> cbc_construct_fast(std::int64_t n, int s, int alpha,
                                                           const std::vector<double>& gamma) {
  if (!is_prime(n)) throw UsageError("cbc_construct_fast: N must be prime");
  if (s < 1 || static_cast<int>(gamma.size()) < s) throw UsageError("cbc_construct_fast: need gamma_1..gamma_s");
  for (double g : gamma) {
    if (!(g >= 0.0) || !std::isfinite(g)) throw UsageError("cbc_construct_fast: weights must be nonnegative");
  }
  const std::vector<double> omega = korobov_kernel_table(n, detail::integer_alpha(alpha));
  const auto un = static_cast<std::size_t>(n);
  const double inv_n = 1.0 / static_cast<double>(n);

  std::vector<double> state(un);
  for (std::size_t i = 0; i < un; ++i) state[i] = 1.0 + gamma[0] * omega[i];
  auto mean_minus_one = [&] {
    double acc = 0.0;
    for (double v : state) acc += v;
    return acc * inv_n - 1.0;
  };

  const SpaceParams params(static_cast<double>(alpha), WeightSet::product(gamma));
  const detail::LatticeMeritEvaluator direct(n, params);

  std::vector<std::int64_t> z{1};
  CbcTrace trace;
  trace.steps.push_back({1, direct(LatticeRule(n, z))});
  trace.evaluations = 1;
  if (s == 1) return {LatticeRule(n, std::move(z)), std::move(trace)};

  const std::size_t order = un - 1;  // size of the cyclic group
  const std::int64_t g = primitive_root(n);
  std::vector<std::int64_t> power(order);
  power[0] = 1;
  for (std::size_t a = 1; a < order; ++a) power[a] = power[a - 1] * g % n;

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> kernel_in(order), kernel_hat, state_in(order), state_hat, corr_hat(order), corr;
  for (std::size_t a = 0; a < order; ++a) kernel_in[a] = omega[power[a]];
  fft.fwd(kernel_hat, kernel_in);
  double omega_max = 0.0;
  for (double w : omega) omega_max = std::max(omega_max, std::abs(w));

  std::vector<double> values(order);
  for (int dim = 2; dim <= s; ++dim) {
    const double gam = gamma[dim - 1];
    const double base = mean_minus_one();

    for (std::size_t a = 0; a < order; ++a) state_in[a] = state[power[a]];
    fft.fwd(state_hat, state_in);
    for (std::size_t f = 0; f < order; ++f) corr_hat[f] = std::conj(state_hat[f]) * kernel_hat[f];
    fft.inv(corr, corr_hat);

    // values indexed by z - 1
    for (std::size_t b = 0; b < order; ++b) {
      values[power[b] - 1] = base + gam * inv_n * (omega[0] * state[0] + corr[b].real());
    }
    trace.evaluations += static_cast<std::int64_t>(order);

    const double approx_min = *std::min_element(values.begin(), values.end());
    double scale = 0.0;
    for (double v : state) scale += std::abs(v);
    const double window = 1e-8 * (std::abs(approx_min) + gam * omega_max * scale * inv_n) + 1e-300;

    std::vector<std::int64_t> near;
    std::vector<double> exact;
    for (std::size_t i = 0; i < order; ++i) {
      if (values[i] > approx_min + window) continue;
      auto candidate = z;
      candidate.push_back(static_cast<std::int64_t>(i) + 1);
      near.push_back(candidate.back());
      exact.push_back(direct(LatticeRule(n, std::move(candidate))));
    }
    const std::size_t pick = tie_break_argmin(exact);
    const std::int64_t chosen = near[pick];
    z.push_back(chosen);
    trace.steps.push_back({chosen, exact[pick]});
    for (std::int64_t k = 0; k < n; ++k) state[k] *= 1.0 + gam * omega[(k * chosen) % n];
  }
  return {LatticeRule(n, std::move(z)), std::move(trace)};
}

}  // namespace qmcforge
