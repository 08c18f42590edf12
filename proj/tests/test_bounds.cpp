#include "doctest.h"
#include "support.hpp"

#include "bounds.hpp"
#include "estimators.hpp"

#include <cmath>

using namespace pickands;

namespace {

double series(double alpha, double delta, int terms) {
  double s = 0.0;
  for (int k = 1; k <= terms; ++k) s += std::exp(-2.0 * std::pow(delta * k, alpha) / 8.0);
  return s;
}

}  // namespace

TEST_CASE("Gaussian bound spot values") {
  const auto b1 = gaussian_lower_bound(VarianceFunction::power(1.0), 10.0);
  const double q = std::exp(-2.5);
  CHECK(b1.value == doctest::Approx((1.0 - q / (1.0 - q)) / 10.0).epsilon(1e-12));
  CHECK(std::abs(b1.value - 0.0910575) < 5e-7);

  const auto b2 = gaussian_lower_bound(VarianceFunction::power(2.0), 4.0);
  CHECK(b2.value == doctest::Approx((1.0 - series(2.0, 4.0, 50)) / 4.0).epsilon(1e-12));
  CHECK(std::abs(b2.value - 0.245421) < 5e-7);
  CHECK(b2.value <= oracle::alpha2(4.0));

  const auto b0 = gaussian_lower_bound(VarianceFunction::power(1.0), 0.5);
  CHECK(b0.value == 0.0);
  CHECK(b0.clamped);
}

TEST_CASE("truncated series plus tail bound brackets the full series") {
  const std::pair<double, double> cases[] = {{1.5, 2.0}, {0.8, 20.0}, {1.2, 6.0}, {2.0, 1.5}};
  for (auto [a, d] : cases) {
    CAPTURE(a);
    CAPTURE(d);
    const auto b = gaussian_lower_bound(VarianceFunction::power(a), d);
    REQUIRE(b.terms > 0);
    REQUIRE(b.series < 1.0);
    const double exact = series(a, d, static_cast<int>(10 * b.terms));
    CHECK(b.series <= exact);
    CHECK(exact <= b.series + b.series_tail_bound);
    CHECK(b.series_tail_bound < 1e-12);
    CHECK(b.value == doctest::Approx(std::max(0.0, 1.0 - b.series) / d).epsilon(1e-10));
  }
}

TEST_CASE("power bound") {
  CHECK(gaussian_power_bound(std::sqrt(2.0), 1.0, 10.0).value == doctest::Approx(0.06));
  const auto neg = gaussian_power_bound(1.0, 1.0, 1.0);
  CHECK(neg.value == 0.0);
  CHECK(neg.clamped);
  // sigma^2 = 2 t^alpha means C = sqrt 2 and kappa = alpha
  for (double a : {1.0, 1.5, 2.0}) {
    for (double d : {2.0, 4.0, 8.0, 16.0, 32.0}) {
      CAPTURE(a);
      CAPTURE(d);
      const double p = gaussian_power_bound(std::sqrt(2.0), a, d).value;
      const double g = gaussian_lower_bound(VarianceFunction::power(a), d).value;
      CHECK(p <= g + 1e-15);
    }
  }
}

TEST_CASE("Levy bounds") {
  const auto bm = LevyModel::brownian();
  const double e = std::exp(-2.0);
  CHECK(levy_lower_bound(bm, 16.0).value == doctest::Approx((1.0 - 2.0 * e) / (1.0 - e) / 16.0));
  CHECK(std::abs(levy_lower_bound(bm, 16.0).value - 0.052718) < 5e-7);
  CHECK(levy_lower_bound(bm, 4.0).value == 0.0);
  CHECK(levy_lower_bound(bm, 1e4).value * 1e4 == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(levy_h0_bound(bm).value == doctest::Approx(1.0 / 32.0));
  const auto cp = LevyModel::brownian_plus_compound_poisson(0.0, 1.0, {JumpKind::constant, 1.0, 0.0});
  const double want = (std::exp(1.0) - 1.0 - 2.0 * (std::exp(0.5) - 1.0)) / 8.0;
  CHECK(levy_h0_bound(cp).value == doctest::Approx(want));
  CHECK(std::abs(levy_h0_bound(cp).value - 0.052605) < 5e-6);
  for (double s : {0.1, 1.0, 3.0}) CHECK(levy_h0_bound(LevyModel::brownian(s)).value > 0.0);

  LevyModel flat;
  flat.diffusion = 0.0;
  flat.jump_rate = 0.0;
  try {
    (void)levy_lower_bound(flat, 10.0);
    FAIL("expected a model error");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::model);
  }
}

TEST_CASE("bounds never exceed Monte Carlo estimates") {
  RunParams p;
  p.replications = 40000;
  p.seed = 13;
  for (double a : {0.5, 1.0, 1.5, 2.0}) {
    for (double d : {0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) {
      const auto vf = VarianceFunction::power(a);
      const double b = gaussian_lower_bound(vf, d).value;
      if (b == 0.0) continue;
      CAPTURE(a);
      CAPTURE(d);
      const auto r = est_exceedance(vf, d, p);
      CHECK(b <= r.estimate + 3.0 * r.std_error);
    }
  }
  for (double d : {8.0, 16.0, 32.0}) {
    const auto r = est_exceedance(LevyModel::brownian(), d, p);
    CHECK(levy_lower_bound(LevyModel::brownian(), d).value <= r.estimate + 3.0 * r.std_error);
  }
}

TEST_CASE("tabulated variance without a tail bound") {
  const auto vf = VarianceFunction::tabulated({0.0, 5.0, 10.0}, {0.0, 60.0, 120.0});
  const auto b = gaussian_lower_bound(vf, 5.0);
  CHECK(b.tail_unbounded);
  CHECK(b.value == 0.0);
}

TEST_CASE("log-growth condition") {
  const auto lin = check_ln8(VarianceFunction::power(1.0), 1e6);
  CHECK(lin.holds);
  CHECK(lin.last_ratio > 1e4);
  const auto four = check_ln8([](double t) { return 4.0 * std::log1p(t); }, 1e6);
  CHECK_FALSE(four.holds);
  CHECK(four.last_ratio == doctest::Approx(4.0).epsilon(0.01));
  const auto nine = check_ln8([](double t) { return 9.0 * std::log1p(t); }, 1e6);
  CHECK(nine.holds);
  CHECK(nine.tail_min_ratio > 8.0);
  for (std::size_t i = 1; i < nine.rows.size(); ++i)
    CHECK(nine.rows[i - 1].suffix_min <= nine.rows[i].suffix_min);
}
