#include "bounds.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace pickands {

namespace {

constexpr double kTailTarget = 1e-12;
constexpr std::int64_t kMaxTerms = 1 << 24;

BoundResult finish(BoundResult r, double delta) {
  const double bracket = 1.0 - r.series;
  r.clamped = bracket <= 0.0;
  r.value = r.clamped ? 0.0 : bracket / delta;
  return r;
}

}  // namespace

BoundResult gaussian_lower_bound(const VarianceFunction& vf, double delta) {
  require(delta > 0.0 && std::isfinite(delta), ErrorCode::invalid_argument, "delta must be > 0");
  BoundResult r;
  r.formula = "gaussian_series";

  if (vf.kind() != VarianceKind::tabulated) {
    const double alpha = vf.alpha();
    // sigma^2(delta x) / 8 = a x^alpha
    const double a = vf.scale() * std::pow(delta, alpha) / 8.0;
    if (alpha == 1.0) {
      const double q = std::exp(-a);
      r.series = q / (1.0 - q);
      r.terms = -1;  // closed form
      return finish(r, delta);
    }
    // sum_{k>K} e^{-a k^alpha} <= int_K^inf e^{-a x^alpha} dx
    auto tail = [&](double K) {
      const double s = 1.0 / alpha;
      return s * std::pow(a, -s) * boost::math::tgamma(s, a * std::pow(K, alpha));
    };
    double sum = 0.0;
    std::int64_t k = 0;
    while (k < kMaxTerms) {
      ++k;
      sum += std::exp(-a * std::pow(static_cast<double>(k), alpha));
      if (sum >= 1.0) break;
      if ((k & 63) == 0 || k < 64) {
        if (tail(static_cast<double>(k)) < kTailTarget) break;
      }
    }
    r.series = sum;
    r.terms = k;
    r.series_tail_bound = tail(static_cast<double>(k));
    if (sum < 1.0 && r.series_tail_bound >= kTailTarget) {
      r.tail_unbounded = true;
      r.value = 0.0;
      return r;
    }
    return finish(r, delta);
  }

  // Tabulated: only the table range is known, so the tail cannot be bounded
  // unless the partial sum already reaches 1.
  double sum = 0.0;
  std::int64_t k = 0;
  while (delta * static_cast<double>(k + 1) <= vf.max_time()) {
    ++k;
    sum += std::exp(-vf(delta * static_cast<double>(k)) / 8.0);
    if (sum >= 1.0) break;
  }
  r.series = sum;
  r.terms = k;
  if (sum >= 1.0) return finish(r, delta);
  r.tail_unbounded = true;
  r.series_tail_bound = std::numeric_limits<double>::infinity();
  r.value = 0.0;
  return r;
}

BoundResult gaussian_power_bound(double c, double kappa, double delta) {
  require(c > 0.0 && std::isfinite(c), ErrorCode::invalid_argument, "C must be > 0");
  require(kappa > 0.0 && std::isfinite(kappa), ErrorCode::invalid_argument, "kappa must be > 0");
  require(delta > 0.0 && std::isfinite(delta), ErrorCode::invalid_argument, "delta must be > 0");
  BoundResult r;
  r.formula = "gaussian_power";
  r.series = boost::math::tgamma(1.0 / kappa) /
             (kappa * std::pow(c * c / 8.0, 1.0 / kappa)) / delta;
  return finish(r, delta);
}

BoundResult levy_lower_bound(const LevyModel& model, double delta) {
  require(delta > 0.0 && std::isfinite(delta), ErrorCode::invalid_argument, "delta must be > 0");
  model.validate();
  const double lambda = model.lambda();
  require(lambda > 0.0, ErrorCode::model, "degenerate Levy model: Phi(1)/2 - Phi(1/2) <= 0");
  BoundResult r;
  r.formula = "levy";
  const double q = std::exp(-lambda * delta);
  const double num = 1.0 - 2.0 * q;
  r.clamped = num <= 0.0;
  r.value = r.clamped ? 0.0 : num / (-std::expm1(-lambda * delta)) / delta;
  return r;
}

BoundResult levy_h0_bound(const LevyModel& model) {
  model.validate();
  const double lambda = model.lambda();
  require(lambda > 0.0, ErrorCode::model, "degenerate Levy model: Phi(1)/2 - Phi(1/2) <= 0");
  BoundResult r;
  r.formula = "levy_h0";
  r.value = lambda / 4.0;
  return r;
}

Ln8Report check_ln8(const VarianceFunction& vf, double horizon, int points) {
  return check_ln8([&vf](double t) { return vf(t); }, std::min(horizon, vf.max_time()), points);
}

Ln8Report check_ln8(const std::function<double(double)>& sigma2, double horizon, int points) {
  require(points >= 2, ErrorCode::invalid_argument, "need at least 2 grid points");
  const double end = horizon;
  require(end > 2.0, ErrorCode::invalid_argument, "horizon must exceed 2");
  Ln8Report rep;
  rep.rows.resize(static_cast<std::size_t>(points));
  const double l0 = std::log(2.0);
  const double l1 = std::log(end);
  for (int j = 0; j < points; ++j) {
    const double t = std::exp(l0 + (l1 - l0) * j / (points - 1));
    rep.rows[static_cast<std::size_t>(j)] = {t, sigma2(t) / std::log(t), 0.0};
  }
  double m = std::numeric_limits<double>::infinity();
  for (auto it = rep.rows.rbegin(); it != rep.rows.rend(); ++it) {
    m = std::min(m, it->ratio);
    it->suffix_min = m;
  }
  const double mid = std::sqrt(end);
  const auto it = std::find_if(rep.rows.begin(), rep.rows.end(),
                               [&](const Ln8Row& row) { return row.t >= mid; });
  rep.tail_min_ratio = it->suffix_min;
  rep.last_ratio = rep.rows.back().ratio;
  rep.holds = rep.tail_min_ratio > 8.0;
  return rep;
}

}  // namespace pickands
