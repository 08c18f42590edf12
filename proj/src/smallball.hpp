#pragma once

#include <cstdint>
#include <span>

namespace pickands {

struct SmallBallRow {
  double eta = 0.0;
  std::int64_t cutoff = 0;   // K
  double probability = 0.0;  // P{B_alpha(1/k) <= eta, 0 < |k| <= K}
  double std_error = 0.0;
  double scaled = 0.0;  // eta^{-2/alpha} * probability
  double scaled_se = 0.0;
  std::int64_t replications = 0;
  bool stable = false;      // K doubling settled
  bool factorized = false;  // probability is the product of the two one-sided estimates
  // Joint frequency of both sides from the same replications (equals
  // probability when not factorized).
  double direct = 0.0;
  double direct_se = 0.0;
};

// Standard fBm (variance |t|^alpha) on the grid {1/k : 0 < |k| <= K}, K
// doubled from `cutoff` until the estimate moves by less than 0.1 SE.
SmallBallRow est_smallball_prob(double alpha, double eta, std::int64_t cutoff, std::int64_t reps,
                                std::uint64_t seed, std::int64_t max_cutoff = 0);

struct Extrapolation {
  double intercept = 0.0;
  double std_error = 0.0;
  double slope = 0.0;
  bool fit_warning = false;  // scaled values not monotone in eta beyond noise
};

// Weighted least squares of scaled against eta; the intercept estimates
// 2^{1/alpha} H of B_alpha.
Extrapolation smallball_extrapolate(std::span<const SmallBallRow> rows);

}  // namespace pickands
