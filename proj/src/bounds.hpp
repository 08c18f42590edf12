#pragma once

#include "models.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace pickands {

struct BoundResult {
  std::string formula;
  double value = 0.0;              // clamped at 0
  double series = 0.0;             // partial sum over k <= terms, where a series is involved
  double series_tail_bound = 0.0;  // bound on the neglected part of the series
  std::int64_t terms = 0;
  bool clamped = false;
  bool tail_unbounded = false;     // no tail bound available; value forced to 0
};

// (1/delta) max(0, 1 - sum_{k>=1} exp(-sigma^2(delta k) / 8))
BoundResult gaussian_lower_bound(const VarianceFunction& vf, double delta);

// For sigma(t) >= C t^{kappa/2}:
// (1/delta) (1 - (1/delta) Gamma(1/kappa) / (kappa (C^2/8)^{1/kappa})), clamped at 0.
BoundResult gaussian_power_bound(double c, double kappa, double delta);

// (1/delta) max(0, 1 - 2 e^{-lambda delta}) / (1 - e^{-lambda delta}),
// lambda = Phi(1)/2 - Phi(1/2).
BoundResult levy_lower_bound(const LevyModel& model, double delta);

// H^0 >= (Phi(1) - 2 Phi(1/2)) / 8
BoundResult levy_h0_bound(const LevyModel& model);

struct Ln8Row {
  double t = 0.0;
  double ratio = 0.0;       // sigma^2(t) / ln t
  double suffix_min = 0.0;  // min of ratio over the grid from t on
};

struct Ln8Report {
  std::vector<Ln8Row> rows;
  double tail_min_ratio = 0.0;  // suffix minimum from sqrt(horizon) on
  double last_ratio = 0.0;
  bool holds = false;           // advisory: tail_min_ratio > 8
};

Ln8Report check_ln8(const VarianceFunction& vf, double horizon, int points = 200);
Ln8Report check_ln8(const std::function<double(double)>& sigma2, double horizon, int points = 200);

}  // namespace pickands
