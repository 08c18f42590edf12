#include "doctest.h"
#include "support.hpp"

#include "numeric.hpp"
#include "parallel.hpp"
#include "rng.hpp"

#include <cmath>
#include <numeric>

using namespace pickands;

TEST_CASE("merged moments equal one pass") {
  Rng rng(5);
  std::vector<double> x(10000);
  for (auto& v : x) v = rng.normal() * 3.0 + 1.0;
  Moments all;
  for (double v : x) all.add(v);
  Moments merged;
  for (std::size_t b = 0; b < x.size(); b += 777) {
    Moments part;
    for (std::size_t i = b; i < std::min(x.size(), b + 777); ++i) part.add(x[i]);
    merged.merge(part);
  }
  const auto s = oracle::stat(x);
  CHECK(all.mean == doctest::Approx(s.mean).epsilon(1e-12));
  CHECK(all.std_error() == doctest::Approx(s.se).epsilon(1e-10));
  CHECK(merged.mean == doctest::Approx(all.mean).epsilon(1e-12));
  CHECK(merged.variance() == doctest::Approx(all.variance()).epsilon(1e-10));
  CHECK(merged.count == 10000);
}

TEST_CASE("log-sum-exp") {
  const std::vector<double> small = {0.1, -2.0, 1.5, 0.0};
  double naive = 0.0;
  for (double v : small) naive += std::exp(v);
  CHECK(log_sum_exp(small) == doctest::Approx(std::log(naive)).epsilon(1e-14));
  const std::vector<double> big = {1000.0, 1000.0, 999.0};
  CHECK(log_sum_exp(big) == doctest::Approx(1000.0 + std::log(2.0 + std::exp(-1.0))));
  const std::vector<double> tiny = {-1000.0, -1001.0};
  CHECK(log_sum_exp(tiny) == doctest::Approx(-1000.0 + std::log1p(std::exp(-1.0))));
}

TEST_CASE("Kolmogorov statistics") {
  // uniform grid sample against the uniform CDF: D = 1/n exactly
  std::vector<double> u;
  for (int i = 1; i <= 100; ++i) u.push_back((i - 0.5) / 100.0);
  CHECK(ks_statistic(u, [](double x) { return x; }) == doctest::Approx(0.005));
  std::vector<double> a = {1, 2, 3, 4};
  std::vector<double> b = {3, 4, 5, 6};
  CHECK(ks_distance(a, b) == doctest::Approx(0.5));
  CHECK(ks_distance(a, a) == 0.0);
  // Q(1.36) ~ 0.0494 from the alternating series
  const std::int64_t n = 1000000;
  const double sn = std::sqrt(static_cast<double>(n));
  const double d = 1.36 / (sn + 0.12 + 0.11 / sn);
  CHECK(kolmogorov_pvalue(d, n) == doctest::Approx(0.0494).epsilon(0.01));
  CHECK(kolmogorov_pvalue(0.0, n) == 1.0);
}

TEST_CASE("random streams") {
  Rng a = Rng::stream(1, 0);
  Rng b = Rng::stream(1, 1);
  Rng c = Rng::stream(2, 0);
  Rng d = Rng::stream(1, 0, 99);
  const auto x = a();
  CHECK(x != b());
  CHECK(x != c());
  CHECK(x != d());
  CHECK(Rng::stream(1, 0)() == x);

  Rng r(3);
  std::vector<double> u(200000), z(200000), e(200000);
  for (std::size_t i = 0; i < u.size(); ++i) {
    u[i] = r.uniform();
    REQUIRE(u[i] > 0.0);
    REQUIRE(u[i] < 1.0);
    z[i] = r.normal();
    e[i] = r.exponential();
  }
  const auto su = oracle::stat(u);
  const auto sz = oracle::stat(z);
  const auto se = oracle::stat(e);
  CHECK(std::abs(su.mean - 0.5) <= 4.0 * su.se);
  CHECK(std::abs(sz.mean) <= 4.0 * sz.se);
  CHECK(std::abs(se.mean - 1.0) <= 4.0 * se.se);
  std::vector<double> z2(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) z2[i] = z[i] * z[i];
  const auto sv = oracle::stat(z2);
  CHECK(std::abs(sv.mean - 1.0) <= 4.0 * sv.se);
}

TEST_CASE("block map keeps block order under any worker count") {
  auto run = [](int workers) {
    set_worker_count(workers);
    return map_blocks<std::int64_t>(10000, [](std::int64_t b, std::int64_t e) { return b * 100000 + e; }, 333);
  };
  const auto one = run(1);
  const auto four = run(4);
  set_worker_count(0);
  CHECK(one == four);
  CHECK(one.size() == 31);
  CHECK(one.back() == 9990 * 100000 + 10000);
  set_worker_count(2);
  CHECK_THROWS_AS(map_blocks<int>(5000, [](std::int64_t b, std::int64_t) -> int {
                    if (b >= 2048) throw std::runtime_error("boom");
                    return 0;
                  }),
                  std::runtime_error);
  set_worker_count(0);
}
