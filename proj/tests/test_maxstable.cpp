#include "doctest.h"
#include "support.hpp"

#include "maxstable.hpp"
#include "numeric.hpp"
#include "parallel.hpp"

#include <cmath>

using namespace pickands;

namespace {

// P{zeta(0) <= a, zeta(1) <= b} for sigma^2(1) = 2: with Y = W(1) ~ N(-1, 2),
// E max(1/a, e^Y/b) = Phi((c+1)/sqrt 2)/a + Phi((1-c)/sqrt 2)/b, c = ln(b/a).
double two_point(double a, double b) {
  const double c = std::log(b / a);
  const double s = std::sqrt(2.0);
  return std::exp(-(oracle::phi((c + 1.0) / s) / a + oracle::phi((1.0 - c) / s) / b));
}

Model zero_model() { return VarianceFunction::tabulated({0.0, 1e6}, {0.0, 0.0}); }

}  // namespace

TEST_CASE("unit Frechet marginal at one point") {
  for (const Model& m : {Model{VarianceFunction::power(2.0)}, Model{VarianceFunction::power(1.0)},
                         Model{VarianceFunction::power(0.5)}, Model{LevyModel::brownian()}}) {
    CAPTURE(describe(m));
    const MaxStableSimulator sim(m, GridSpec{1.0, 0, 10}, 1 << 20, 5);
    struct Acc {
      std::int64_t hits = 0;
      std::int64_t bad = 0;
    };
    const auto acc = map_blocks<Acc>(100000, [&](std::int64_t b, std::int64_t e) {
      Acc a;
      for (std::int64_t k = b; k < e; ++k) {
        const auto s = sim.sample(static_cast<std::uint64_t>(k));
        for (double z : s.zeta) a.bad += !(z > 0.0);
        a.hits += s.zeta[0] <= 1.0;
      }
      return a;
    });
    std::int64_t total = 0;
    std::int64_t bad = 0;
    for (auto a : acc) {
      total += a.hits;
      bad += a.bad;
    }
    CHECK(bad == 0);
    const double p = static_cast<double>(total) / 1e5;
    const double target = std::exp(-1.0);
    CHECK(std::abs(p - target) <= 3.0 * std::sqrt(target * (1.0 - target) / 1e5));
  }
}

TEST_CASE("degenerate W = 0 gives one Frechet value everywhere") {
  const MaxStableSimulator sim(zero_model(), GridSpec{1.0, 0, 5}, 1 << 20, 1);
  std::vector<double> first;
  for (std::uint64_t k = 0; k < 20000; ++k) {
    const auto s = sim.sample(k);
    for (double z : s.zeta) REQUIRE(z == doctest::Approx(s.zeta[0]).epsilon(1e-12));
    first.push_back(s.zeta[0]);
  }
  const double d = ks_statistic(first, [](double x) { return std::exp(-1.0 / x); });
  CHECK(kolmogorov_pvalue(d, 20000) > 0.01);

  const auto single = sample_max_stable(VarianceFunction::power(1.0), GridSpec{1.0, 0, 0}, 1 << 20, 3);
  CHECK(single.zeta.size() == 1);
  CHECK(single.zeta[0] > 0.0);
}

TEST_CASE("fdd oracle") {
  const Model m = VarianceFunction::power(1.3);
  const double t0[] = {0.0};
  const double x0[] = {2.5};
  const auto one = fdd_probability(m, t0, x0, 100, 1);
  CHECK(one.probability == doctest::Approx(std::exp(-1.0 / 2.5)).epsilon(1e-14));
  CHECK(one.std_error == 0.0);

  const double t2[] = {0.0, 1.0};
  const double big[] = {1e12, 1e12};
  CHECK(fdd_probability(m, t2, big, 1000, 1).probability == doctest::Approx(1.0).epsilon(1e-9));

  for (double a : {0.5, 1.0, 2.0}) {
    const double x2[] = {2.0, 3.0};
    const auto p = fdd_probability(VarianceFunction::power(a), t2, x2, 400000, 8);
    CHECK(std::abs(p.probability - two_point(2.0, 3.0)) <= 3.0 * p.std_error);
  }
  const double lt[] = {0.0, 1.0};
  const double lx[] = {2.0, 3.0};
  const auto lp = fdd_probability(LevyModel::brownian(std::sqrt(2.0)), lt, lx, 400000, 8);
  CHECK(std::abs(lp.probability - two_point(2.0, 3.0)) <= 3.0 * lp.std_error);
}

TEST_CASE("simulator frequencies match the fdd oracle") {
  struct Case {
    Model model;
    double delta;
    std::vector<double> t;
    std::vector<double> x;
  };
  const std::vector<Case> cases = {
      {VarianceFunction::power(2.0), 1.0, {0.0}, {1.5}},
      {VarianceFunction::power(2.0), 1.0, {0.0, 1.0}, {2.0, 3.0}},
      {VarianceFunction::power(2.0), 0.5, {0.0, 0.5, 1.5}, {1.0, 2.0, 4.0}},
      {VarianceFunction::power(1.0), 1.0, {0.0, 1.0, 3.0}, {2.0, 3.0, 1.0}},
      {VarianceFunction::power(0.6), 1.0, {-2.0, 0.0, 5.0}, {1.0, 2.0, 3.0}},
      {LevyModel::brownian(), 1.0, {0.0, 2.0, 3.0}, {2.0, 1.0, 3.0}},
      {LevyModel::brownian_plus_compound_poisson(0.5, 1.0, {JumpKind::exponential, 3.0, 0.0}), 1.0,
       {1.0, 4.0}, {1.5, 2.5}},
      {LevyModel::brownian_plus_compound_poisson(0.8, 2.0, {JumpKind::normal, -0.3, 0.5}), 0.5,
       {0.0, 0.5, 2.0}, {2.0, 1.5, 3.0}},
  };
  for (const auto& c : cases) {
    CAPTURE(describe(c.model));
    CAPTURE(c.t.size());
    const auto r = check_fdd(c.model, c.delta, c.t, c.x, 100000, 200000, 17);
    CHECK(r.pass);
    CHECK(std::abs(r.z_score) <= 3.0);
    CHECK_FALSE(r.truncation_bias);
  }
  const double t[] = {0.0, 1.0};
  const double x[] = {2.0, 3.0};
  const auto r = check_fdd(VarianceFunction::power(2.0), 1.0, t, x, 200000, 1000, 4);
  CHECK(std::abs(r.empirical - two_point(2.0, 3.0)) <= 3.0 * r.empirical_se);
  const double bad[] = {0.0, 0.7};
  CHECK_THROWS_AS(check_fdd(VarianceFunction::power(2.0), 1.0, bad, x, 100, 100, 1), Error);
}

TEST_CASE("marginal KS check") {
  for (const Model& m :
       {Model{VarianceFunction::power(2.0)}, Model{VarianceFunction::power(0.7)},
        Model{LevyModel::brownian()},
        Model{LevyModel::brownian_plus_compound_poisson(0.0, 1.5, {JumpKind::constant, 0.4, 0.0})}}) {
    CAPTURE(describe(m));
    const auto r = check_marginal(m, 1.0, 8, 5, 100000, 23);
    CHECK(r.pass);
    CHECK(r.p_value >= 0.01);
    CHECK_FALSE(r.truncation_bias);
  }
}

TEST_CASE("atom cap surfaces truncation bias") {
  const MaxStableSimulator sim(VarianceFunction::power(1.0), GridSpec{1.0, 0, 20}, 1, 2);
  bool any = false;
  for (std::uint64_t k = 0; k < 50; ++k) {
    const auto s = sim.sample(k);
    CHECK(s.atoms_used <= 1);
    any = any || s.truncation_bias;
  }
  CHECK(any);
  const MaxStableSimulator lsim(LevyModel::brownian(), GridSpec{1.0, 0, 20}, 1, 2);
  bool lany = false;
  for (std::uint64_t k = 0; k < 50; ++k) lany = lany || lsim.sample(k).truncation_bias;
  CHECK(lany);
}

TEST_CASE("samples are reproducible and schedule free") {
  const MaxStableSimulator sim(VarianceFunction::power(0.8), GridSpec{0.5, -3, 12}, 1 << 20, 77);
  CHECK(sim.sample(5).zeta == sim.sample(5).zeta);
  CHECK(sim.sample(5).zeta != sim.sample(6).zeta);
  set_worker_count(1);
  const auto a = est_extremal_index_blocks(VarianceFunction::power(1.0), 1.0, 100, 10, 20000, 3);
  set_worker_count(3);
  const auto b = est_extremal_index_blocks(VarianceFunction::power(1.0), 1.0, 100, 10, 20000, 3);
  set_worker_count(0);
  CHECK(a.estimate == b.estimate);
  CHECK(a.events == b.events);
}

TEST_CASE("block estimator of the extremal index") {
  const auto r = est_extremal_index_blocks(VarianceFunction::power(2.0), 1.0, 10000, 100, 200000, 6);
  CHECK(r.estimate >= -3.0 * r.std_error);
  CHECK(r.estimate <= 1.0 + 3.0 * r.std_error);
  CHECK(std::abs(r.estimate - oracle::alpha2(1.0)) <= 3.0 * r.std_error);
  CHECK(r.horizon == 100);

  // fully dependent block: (n/r) P{zeta > n} = (n/r)(1 - e^{-1/n})
  const auto z = est_extremal_index_blocks(zero_model(), 1.0, 1000, 10, 200000, 2);
  const double want = 100.0 * (1.0 - std::exp(-1.0 / 1000.0));
  CHECK(std::abs(z.estimate - want) <= 3.0 * z.std_error);

  const auto low = est_extremal_index_blocks(VarianceFunction::power(2.0), 1.0, 10000, 100, 100, 1);
  CHECK((low.flags & flag_low_count) != 0);
}

TEST_CASE("tail process") {
  const Model m = VarianceFunction::power(1.0);
  const GridSpec g{1.0, 0, 16};
  std::vector<double> ind[3];
  const double ys[] = {2.0, 5.0, 10.0};
  std::vector<double> cand;
  for (int r = 0; r < 100000; ++r) {
    Rng rng = Rng::stream(31, static_cast<std::uint64_t>(r));
    const auto s = sample_tail_process(m, g, rng);
    REQUIRE(s.pareto > 1.0);
    REQUIRE(s.y[0] == doctest::Approx(s.pareto).epsilon(1e-15));
    for (int k = 0; k < 3; ++k) ind[k].push_back(s.y[0] > ys[k] ? 1.0 : 0.0);
    double mx = 0.0;
    for (std::size_t i = 1; i < s.y.size(); ++i) mx = std::max(mx, s.y[i]);
    cand.push_back(mx <= 1.0 ? 1.0 : 0.0);
  }
  for (int k = 0; k < 3; ++k) {
    const auto st = oracle::stat(ind[k]);
    CHECK(std::abs(st.mean - 1.0 / ys[k]) <= 3.0 * st.se);
  }
  // same event as the candidate formula at m = 16
  RunParams p;
  p.replications = 100000;
  p.seed = 32;
  p.policy.initial_horizon = 16;
  p.policy.max_horizon = 16;
  const auto theta = est_candidate_theta(m, 1.0, p);
  const auto st = oracle::stat(cand);
  CHECK(std::abs(oracle::z(st.mean, st.se, theta.estimate, theta.std_error)) <= 3.0);
}

TEST_CASE("conditional law of the max-stable process matches the tail process") {
  for (const Model& m : {Model{VarianceFunction::power(2.0)}, Model{VarianceFunction::power(1.0)}}) {
    CAPTURE(describe(m));
    const auto r = check_tail_process(m, 1.0, 200.0, 100000, 41);
    CHECK(r.pass);
    CHECK(r.ks_distance < 0.02);
    CHECK(r.samples == 100000);
    CHECK(r.trials > 100000);
  }
}
