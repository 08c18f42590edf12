#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace oracle {

inline double phi(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// W = sqrt(2) B_2 - t^2: B_2(t) = N t, so sup_i (E + W(delta i)) <= 0 reduces to a
// statement about one normal; integrates to (2 Phi(delta / sqrt 2) - 1) / delta.
inline double alpha2(double delta) { return (2.0 * phi(delta / std::numbers::sqrt2) - 1.0) / delta; }

// W = sqrt(2) B_1 - |t| on delta Z: Spitzer's identity for the random walk
// with N(-delta, 2 delta) steps gives
// H = (1/delta) exp(-2 sum_k Phi(-sqrt(k delta / 2)) / k).
inline double brownian(double delta) {
  double s = 0.0;
  for (int k = 1; k < 2000000; ++k) {
    const double term = phi(-std::sqrt(k * delta / 2.0)) / k;
    s += term;
    if (term < 1e-18) break;
  }
  return std::exp(-2.0 * s) / delta;
}

// Mean and standard error of a sample.
struct Stat {
  double mean = 0.0;
  double se = 0.0;
};

inline Stat stat(const std::vector<double>& x) {
  double m = 0.0;
  for (double v : x) m += v;
  m /= static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  const double var = ss / static_cast<double>(x.size() - 1);
  return {m, std::sqrt(var / static_cast<double>(x.size()))};
}

// Sample covariance of (a, b) with a delta-method standard error taken from
// the spread of the centered products.
inline Stat covariance(const std::vector<double>& a, const std::vector<double>& b) {
  const Stat ma = stat(a);
  const Stat mb = stat(b);
  std::vector<double> p(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) p[i] = (a[i] - ma.mean) * (b[i] - mb.mean);
  return stat(p);
}

inline double z(double a, double sa, double b, double sb) {
  return (a - b) / std::sqrt(sa * sa + sb * sb);
}

}  // namespace oracle
