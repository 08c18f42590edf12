#include "doctest.h"
#include "support.hpp"

#include "error.hpp"
#include "smallball.hpp"

#include <cmath>
#include <numbers>
#include <vector>

using namespace pickands;

namespace {

const double kAlpha2Target = std::numbers::sqrt2 / std::sqrt(std::numbers::pi);

SmallBallRow fixed_k(double alpha, double eta, std::int64_t k, std::int64_t reps, std::uint64_t seed) {
  return est_smallball_prob(alpha, eta, k, reps, seed, k);
}

}  // namespace

TEST_CASE("large eta makes the constraints vacuous") {
  for (double a : {0.5, 1.0, 1.5, 2.0}) CHECK(fixed_k(a, 1e3, 32, 5000, 1).probability == 1.0);
}

TEST_CASE("alpha = 2: the event is |N| <= eta for every K") {
  for (double eta : {0.05, 0.2, 1.0}) {
    const double exact = 2.0 * oracle::phi(eta) - 1.0;
    const auto r = est_smallball_prob(2.0, eta, 4, 200000, 3);
    CAPTURE(eta);
    CHECK(std::abs(r.probability - exact) <= 3.0 * r.std_error);
    CHECK(r.stable);
    CHECK_FALSE(r.factorized);
  }
  const auto r = est_smallball_prob(2.0, 0.05, 16, 200000, 4);
  CHECK(std::abs(r.scaled / kAlpha2Target - 1.0) < 0.15);
}

TEST_CASE("alpha = 1 at eta = 0.05 is near 2") {
  const auto r = est_smallball_prob(1.0, 0.05, 64, 100000, 5);
  CHECK(r.factorized);
  CHECK(std::abs(r.scaled / 2.0 - 1.0) < 0.15);
  // independent sides: product of one-sided frequencies against the joint frequency
  CHECK(std::abs(oracle::z(r.probability, r.std_error, r.direct, r.direct_se)) <= 3.0);
}

TEST_CASE("monotone in K and in eta for fixed seeds") {
  for (double a : {0.7, 1.0, 1.6}) {
    CAPTURE(a);
    double prev = 2.0;
    for (std::int64_t k : {1, 2, 4, 8, 16, 32}) {
      const auto r = fixed_k(a, 0.3, k, 4000, 9);
      CHECK(r.probability <= prev);
      prev = r.probability;
    }
    double last = -1.0;
    for (double eta : {0.1, 0.2, 0.4, 0.8}) {
      const auto r = fixed_k(a, eta, 16, 4000, 9);
      CHECK(r.probability >= last);
      last = r.probability;
    }
  }
}

TEST_CASE("extrapolation of exact synthetic rows") {
  for (double a : {1.0, 2.0}) {
    std::vector<SmallBallRow> rows;
    for (double eta : {0.4, 0.2, 0.1, 0.05}) {
      SmallBallRow r;
      r.eta = eta;
      r.probability = 1.7 * std::pow(eta, 2.0 / a);
      r.scaled = 1.7;
      rows.push_back(r);
    }
    const auto x = smallball_extrapolate(rows);
    CHECK(x.intercept == doctest::Approx(1.7).epsilon(1e-12));
    CHECK(std::abs(x.slope) < 1e-10);
    CHECK_FALSE(x.fit_warning);
  }
  std::vector<SmallBallRow> lin;
  for (double eta : {0.3, 0.2, 0.1}) {
    SmallBallRow r;
    r.eta = eta;
    r.scaled = 2.0 - 3.0 * eta;
    r.scaled_se = 0.01;
    lin.push_back(r);
  }
  const auto xl = smallball_extrapolate(lin);
  CHECK(xl.intercept == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(xl.slope == doctest::Approx(-3.0).epsilon(1e-12));
  CHECK(xl.std_error > 0.0);
}

TEST_CASE("extrapolation warns on a non-monotone sequence") {
  std::vector<SmallBallRow> rows;
  const double vals[] = {1.0, 1.5, 1.0};
  const double etas[] = {0.4, 0.2, 0.1};
  for (int i = 0; i < 3; ++i) {
    SmallBallRow r;
    r.eta = etas[i];
    r.scaled = vals[i];
    r.scaled_se = 0.01;
    rows.push_back(r);
  }
  CHECK(smallball_extrapolate(rows).fit_warning);
  rows.pop_back();
  CHECK_THROWS_AS(smallball_extrapolate(rows), Error);
  rows.push_back(rows.back());
  CHECK_THROWS_AS(smallball_extrapolate(rows), Error);
}

TEST_CASE("sweeps recover the constants") {
  std::vector<SmallBallRow> two;
  for (double eta : {0.2, 0.1, 0.05}) two.push_back(est_smallball_prob(2.0, eta, 16, 100000, 11));
  const auto x2 = smallball_extrapolate(two);
  CHECK(std::abs(x2.intercept / kAlpha2Target - 1.0) < 0.10);

  std::vector<SmallBallRow> one;
  for (double eta : {0.2, 0.1, 0.05}) one.push_back(est_smallball_prob(1.0, eta, 64, 100000, 12));
  const auto x1 = smallball_extrapolate(one);
  CHECK(std::abs(x1.intercept / 2.0 - 1.0) < 0.10);
}

TEST_CASE("argument checks") {
  CHECK_THROWS_AS(est_smallball_prob(2.5, 0.1, 4, 100, 1), Error);
  CHECK_THROWS_AS(est_smallball_prob(1.0, 0.0, 4, 100, 1), Error);
  CHECK_THROWS_AS(est_smallball_prob(1.0, 0.1, 0, 100, 1), Error);
  CHECK_THROWS_AS(est_smallball_prob(1.0, 0.1, 4, 1, 1), Error);
  const auto r = fixed_k(1.5, 0.2, 128, 2000, 3);
  CHECK(r.probability >= 0.0);
  CHECK(r.probability <= 1.0);
  CHECK(r.cutoff == 128);
}
