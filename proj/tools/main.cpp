// pickands: command-line front end to libpickands.
//
//   pickands estimate   --family fbm --alpha 2 --delta 1 --method albinA --reps 1000000
//   pickands crosscheck --family fbm --alpha 1.5 --delta 1
//   pickands bound      --family levy --brownian --delta 16
//   pickands maxstable  --family fbm --alpha 2 --delta 1 --check fdd
//   pickands smallball  --alpha 2 --etas 0.2,0.1,0.05
//
// Exit codes: 0 success, 1 failed check or discordant crosscheck, 2 invalid
// input or unsupported model/method combination, 3 internal or I/O failure.

#include "report.hpp"
#include "run_config.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

namespace pkcli {
namespace {

constexpr double kZ95 = 1.959963984540054;
constexpr std::int64_t kUnderpowered = 1000;

std::string flag_names(std::uint32_t flags) {
  std::string s;
  auto add = [&](std::uint32_t bit, const char* name) {
    if (flags & bit) s += (s.empty() ? "" : "|") + std::string(name);
  };
  add(PK_FLAG_UNSTABLE, "unstable");
  add(PK_FLAG_LOW_COUNT, "low_count");
  add(PK_FLAG_TRUNCATION_BIAS, "truncation_bias");
  add(PK_FLAG_WINDOW, "window");
  return s;
}

Json estimate_record(const pk_estimate& e) {
  Json r;
  r["method"] = pk_method_name(static_cast<pk_method>(e.method));
  r["delta"] = e.delta;
  r["estimate"] = e.estimate;
  r["stderr"] = e.std_error;
  r["reps"] = e.replications;
  r["horizon"] = e.horizon;
  r["flags"] = e.flags;
  r["flag_names"] = flag_names(e.flags);
  r["stable"] = e.stable != 0;
  r["events"] = e.events;
  r["previous_estimate"] = e.previous_estimate;
  return r;
}

void warn_flags(const pk_estimate& e) {
  if (e.flags)
    std::cerr << "warning: " << pk_method_name(static_cast<pk_method>(e.method))
              << " flags: " << flag_names(e.flags) << "\n";
}

bool alpha2_family(const RunConfig& c) {
  return c.family == "fbm" && c.alpha == 2.0;
}

// (Phi(d / sqrt 2) - Phi(-d / sqrt 2)) / d
double alpha2_constant(double delta) {
  return delta == 0.0 ? 1.0 / std::sqrt(std::numbers::pi) : std::erf(0.5 * delta) / delta;
}

int run_estimate(const RunConfig& c, Report& rep) {
  auto model = make_model(c);
  const pk_run_params p = run_params(c);
  for (pk_method m : parse_methods(c.method)) {
    pk_estimate e{};
    if (m == PK_METHOD_EXTREMAL_BLOCKS) {
      const std::int64_t block =
          c.block > 0 ? c.block : static_cast<std::int64_t>(std::sqrt(static_cast<double>(c.n)));
      check(pk_extremal_index_blocks(model.get(), c.delta, c.n, block, c.reps, c.seed, &e));
    } else {
      check(pk_estimate_run(model.get(), m, c.delta, &p, &e));
    }
    warn_flags(e);
    auto& r = rep.add(estimate_record(e));
    if (m == PK_METHOD_CONTINUOUS_DY) r["mesh"] = c.mesh;
  }
  return 0;
}

int run_crosscheck(const RunConfig& c, Report& rep) {
  auto model = make_model(c);
  std::vector<pk_method> methods;
  if (pk_model_is_gaussian(model.get())) {
    methods = {PK_METHOD_EXCEEDANCE,      PK_METHOD_DIFFERENCE,     PK_METHOD_ARGMAX,
               PK_METHOD_ARGMAX_ATOMLESS, PK_METHOD_DIEKER_YAKIR, PK_METHOD_TIME_REVERSED};
  } else {
    methods = {PK_METHOD_EXCEEDANCE, PK_METHOD_DIFFERENCE};
  }
  const pk_run_params p = run_params(c);
  std::vector<pk_estimate> res(methods.size());
  check(pk_estimate_shared(model.get(), methods.data(), methods.size(), c.delta, &p, res.data()));

  const bool truth = alpha2_family(c);
  const double target = alpha2_constant(c.delta);
  for (const auto& e : res) {
    warn_flags(e);
    auto& r = rep.add(estimate_record(e));
    r["ci_low"] = e.estimate - kZ95 * e.std_error;
    r["ci_high"] = e.estimate + kZ95 * e.std_error;
    if (truth) r["covers_closed_form"] = std::abs(e.estimate - target) <= kZ95 * e.std_error;
  }

  Json pairs = Json::array();
  Json discordant = Json::array();
  for (std::size_t a = 0; a < res.size(); ++a) {
    for (std::size_t b = a + 1; b < res.size(); ++b) {
      const double gap = std::abs(res[a].estimate - res[b].estimate);
      const bool overlap = gap <= kZ95 * (res[a].std_error + res[b].std_error);
      Json pr;
      pr["a"] = pk_method_name(methods[a]);
      pr["b"] = pk_method_name(methods[b]);
      pr["overlap"] = overlap;
      pairs.push_back(pr);
      if (!overlap) discordant.push_back(pr["a"].get<std::string>() + "/" + pr["b"].get<std::string>());
    }
  }
  const bool underpowered = c.reps < kUnderpowered;
  rep.summary["pairs"] = pairs;
  rep.summary["discordant"] = discordant;
  rep.summary["underpowered"] = underpowered;
  if (truth) rep.summary["closed_form"] = target;
  rep.summary["pass"] = discordant.empty();
  if (underpowered)
    std::cerr << "warning: " << c.reps << " replications; comparison is underpowered\n";
  for (const auto& d : discordant) std::cerr << "discordant pair: " << d.get<std::string>() << "\n";
  return discordant.empty() ? 0 : 1;
}

Json bound_record(const char* formula, double delta, const pk_bound& b) {
  Json r;
  r["method"] = formula;
  r["delta"] = delta;
  r["value"] = b.value;
  r["series"] = b.series;
  r["series_tail_bound"] = b.series_tail_bound;
  r["terms"] = b.terms;
  r["clamped"] = b.clamped != 0;
  r["tail_unbounded"] = b.tail_unbounded != 0;
  return r;
}

int run_bound(const RunConfig& c, Report& rep) {
  auto model = make_model(c);
  pk_bound b{};
  if (pk_model_is_gaussian(model.get())) {
    check(pk_bound_gaussian(model.get(), c.delta, &b));
    rep.add(bound_record("gaussian_lower_bound", c.delta, b));
    if (b.tail_unbounded) std::cerr << "warning: series tail could not be bounded; value set to 0\n";
    pk_ln8_report ln8{};
    check(pk_check_ln8(model.get(), c.horizon, &ln8));
    Json r;
    r["method"] = "ln8";
    r["horizon"] = c.horizon;
    r["tail_min_ratio"] = ln8.tail_min_ratio;
    r["last_ratio"] = ln8.last_ratio;
    r["holds"] = ln8.holds != 0;
    rep.add(r);
  } else {
    check(pk_bound_levy(model.get(), c.delta, &b));
    rep.add(bound_record("levy_lower_bound", c.delta, b));
    check(pk_bound_levy_h0(model.get(), &b));
    rep.add(bound_record("levy_h0_bound", 0.0, b));
  }
  if (c.power_c > 0.0) {
    check(pk_bound_power(c.power_c, c.power_kappa, c.delta, &b));
    auto& r = rep.add(bound_record("gaussian_power_bound", c.delta, b));
    r["c"] = c.power_c;
    r["kappa"] = c.power_kappa;
  }
  return 0;
}

int run_maxstable(const RunConfig& c, Report& rep, std::int64_t samples) {
  auto model = make_model(c);
  if (c.check == "fdd") {
    std::vector<double> t = c.times.empty() ? std::vector<double>{0.0, c.delta} : c.times;
    std::vector<double> x = c.thresholds.empty() ? std::vector<double>{2.0, 3.0} : c.thresholds;
    if (t.size() != x.size())
      throw ApiError{PK_ERR_INVALID_ARGUMENT, "--times and --thresholds differ in length"};
    pk_fdd_check f{};
    check(pk_maxstable_check_fdd(model.get(), c.delta, t.data(), x.data(), t.size(), c.reps,
                                 c.oracle_reps > 0 ? c.oracle_reps : c.reps, c.seed, &f));
    Json r;
    r["check"] = "fdd";
    r["delta"] = c.delta;
    r["points"] = t.size();
    r["empirical"] = f.empirical;
    r["empirical_se"] = f.empirical_se;
    r["oracle"] = f.oracle;
    r["oracle_se"] = f.oracle_se;
    r["z_score"] = f.z_score;
    r["truncation_bias"] = f.truncation_bias != 0;
    r["pass"] = f.pass != 0;
    rep.add(r);
    return f.pass ? 0 : 1;
  }
  if (c.check == "marginal") {
    pk_ks_report k{};
    check(pk_maxstable_check_marginal(model.get(), c.delta, c.i_max, c.point, c.reps, c.seed, &k));
    Json r;
    r["check"] = "marginal";
    r["delta"] = c.delta;
    r["point"] = c.point;
    r["statistic"] = k.statistic;
    r["p_value"] = k.p_value;
    r["samples"] = k.samples;
    r["truncation_bias"] = k.truncation_bias != 0;
    r["pass"] = k.pass != 0;
    rep.add(r);
    return k.pass ? 0 : 1;
  }
  if (c.check == "blocks" || c.check == "candidate") {
    pk_estimate e{};
    if (c.check == "blocks") {
      const std::int64_t block =
          c.block > 0 ? c.block : static_cast<std::int64_t>(std::sqrt(static_cast<double>(c.n)));
      check(pk_extremal_index_blocks(model.get(), c.delta, c.n, block, c.reps, c.seed, &e));
    } else {
      const pk_run_params p = run_params(c);
      check(pk_estimate_run(model.get(), PK_METHOD_CANDIDATE_THETA, c.delta, &p, &e));
    }
    warn_flags(e);
    auto& r = rep.add(estimate_record(e));
    r["check"] = c.check;
    if (alpha2_family(c)) r["closed_form_theta"] = c.delta * alpha2_constant(c.delta);
    return 0;
  }
  if (c.check == "tail") {
    pk_tail_check t{};
    check(pk_maxstable_check_tail(model.get(), c.delta, c.threshold, c.reps, c.seed, &t));
    Json r;
    r["check"] = "tail";
    r["delta"] = c.delta;
    r["threshold"] = c.threshold;
    r["ks_distance"] = t.ks_distance;
    r["samples"] = t.samples;
    r["trials"] = t.trials;
    r["pass"] = t.pass != 0;
    rep.add(r);
    return t.pass ? 0 : 1;
  }
  if (c.check == "sample") {
    pk_maxstable_sim* raw = nullptr;
    check(pk_maxstable_create(model.get(), c.delta, c.i_min, c.i_max, c.atom_cap, c.seed, &raw));
    std::unique_ptr<pk_maxstable_sim, void (*)(pk_maxstable_sim*)> sim(raw, pk_maxstable_destroy);
    std::vector<double> zeta(static_cast<std::size_t>(c.i_max - c.i_min + 1));
    for (std::int64_t s = 0; s < samples; ++s) {
      pk_maxstable_info info{};
      check(pk_maxstable_sample(sim.get(), static_cast<std::uint64_t>(s), zeta.data(), zeta.size(),
                                &info));
      if (info.truncation_bias) std::cerr << "warning: sample " << s << " hit the atom cap\n";
      for (std::size_t k = 0; k < zeta.size(); ++k) {
        const std::int64_t i = c.i_min + static_cast<std::int64_t>(k);
        Json r;
        r["sample"] = s;
        r["index"] = i;
        r["t"] = c.delta * static_cast<double>(i);
        r["zeta"] = zeta[k];
        r["atoms_used"] = info.atoms_used;
        rep.add(r);
      }
    }
    return 0;
  }
  throw ApiError{PK_ERR_INVALID_ARGUMENT, "unknown check '" + c.check + "'"};
}

int run_smallball(const RunConfig& c, Report& rep) {
  if (c.etas.empty()) throw ApiError{PK_ERR_INVALID_ARGUMENT, "no eta given"};
  std::vector<pk_smallball_row> rows(c.etas.size());
  for (std::size_t i = 0; i < c.etas.size(); ++i) {
    check(pk_smallball_prob(c.alpha, c.etas[i], c.cutoff, c.max_cutoff, c.reps, c.seed, &rows[i]));
    const auto& row = rows[i];
    if (row.probability == 0.0)
      std::cerr << "warning: no replication stayed below eta=" << row.eta
                << "; increase --reps or eta\n";
    if (!row.stable) std::cerr << "warning: cutoff doubling did not settle at eta=" << row.eta << "\n";
    Json r;
    r["row"] = "eta";
    r["alpha"] = c.alpha;
    r["eta"] = row.eta;
    r["K"] = row.cutoff;
    r["probability"] = row.probability;
    r["stderr"] = row.std_error;
    r["scaled"] = row.scaled;
    r["scaled_se"] = row.scaled_se;
    r["reps"] = row.replications;
    r["stable"] = row.stable != 0;
    r["factorized"] = row.factorized != 0;
    r["direct"] = row.direct;
    r["direct_se"] = row.direct_se;
    rep.add(r);
  }
  if (rows.size() >= 3) {
    pk_extrapolation x{};
    check(pk_smallball_extrapolate(rows.data(), rows.size(), &x));
    if (x.fit_warning) std::cerr << "warning: scaled values are not monotone in eta beyond noise\n";
    Json r;
    r["row"] = "extrapolated";
    r["alpha"] = c.alpha;
    r["eta"] = 0.0;
    r["scaled"] = x.intercept;
    r["scaled_se"] = x.std_error;
    r["slope"] = x.slope;
    r["fit_warning"] = x.fit_warning != 0;
    r["model"] = "linear in eta";
    rep.add(r);
  }
  return 0;
}

}  // namespace
}  // namespace pkcli

int main(int argc, char** argv) {
  using namespace pkcli;
  RunConfig c;
  std::int64_t samples = 1;
  double eta = 0.0;

  CLI::App app{"Monte Carlo estimation of Pickands constants and extremal indices"};
  app.set_config("--config", "", "flat key=value file; command-line flags take precedence");
  app.fallthrough();
  app.require_subcommand(1);

  app.add_option("--family", c.family, "fbm | gaussian | levy")
      ->check(CLI::IsMember({"fbm", "gaussian", "levy"}));
  app.add_option("--alpha", c.alpha, "exponent in (0, 2]");
  app.add_option("--scale", c.scale, "gaussian family: sigma^2(t) = scale |t|^alpha");
  app.add_option("--table", c.table, "gaussian family: file of 't sigma2' rows");
  app.add_flag("--brownian", c.brownian, "levy family: standard Brownian input");
  app.add_option("--phi-sigma", c.phi_sigma, "levy diffusion coefficient");
  app.add_option("--phi-rate", c.phi_rate, "levy jump rate");
  app.add_option("--phi-jump", c.phi_jump, "none | constant | normal | exponential");
  app.add_option("--phi-jump-a", c.phi_jump_a, "jump parameter a");
  app.add_option("--phi-jump-b", c.phi_jump_b, "jump parameter b");
  app.add_option("--delta", c.delta, "grid step");
  app.add_option("--mesh", c.mesh, "mesh for the continuous estimator");
  app.add_option("--window", c.window, "half-width of the continuous window");
  app.add_option("--refine", c.refine, "numerator refinement of the continuous estimator");
  app.add_option("--method", c.method, "comma-separated estimator names or aliases");
  app.add_option("--reps", c.reps, "replications");
  app.add_option("--seed", c.seed, "master seed");
  app.add_option("--horizon", c.horizon, "T for the definitional estimator, t_max for ln8");
  app.add_option("--initial-horizon", c.initial_horizon, "first truncation horizon N");
  app.add_option("--max-horizon", c.max_horizon, "largest truncation horizon");
  app.add_option("--growth", c.growth, "horizon growth factor");
  app.add_option("--stability", c.stability, "stability tolerance in standard errors");
  app.add_option("--power-c", c.power_c, "bound: C in sigma(t) >= C t^{kappa/2}");
  app.add_option("--power-kappa", c.power_kappa, "bound: kappa");
  app.add_option("--check", c.check, "maxstable: fdd | marginal | blocks | candidate | tail | sample")
      ->check(CLI::IsMember({"fdd", "marginal", "blocks", "candidate", "tail", "sample"}));
  app.add_option("--times", c.times, "maxstable fdd times")->delimiter(',');
  app.add_option("--thresholds", c.thresholds, "maxstable fdd thresholds")->delimiter(',');
  app.add_option("--n", c.n, "block estimator level n");
  app.add_option("--block", c.block, "block length r_n (0: floor(sqrt n))");
  app.add_option("--point", c.point, "marginal check grid index");
  app.add_option("--i-min", c.i_min, "first grid index");
  app.add_option("--i-max", c.i_max, "last grid index");
  app.add_option("--atom-cap", c.atom_cap, "maximum Poisson atoms per sample");
  app.add_option("--oracle-reps", c.oracle_reps, "fdd oracle replications (0: --reps)");
  app.add_option("--threshold", c.threshold, "tail check threshold T");
  app.add_option("--samples", samples, "maxstable sample count for --check sample");
  app.add_option("--eta", eta, "smallball: single eta");
  app.add_option("--etas", c.etas, "smallball: comma-separated eta values")->delimiter(',');
  app.add_option("--cutoff", c.cutoff, "smallball initial K");
  app.add_option("--max-cutoff", c.max_cutoff, "smallball largest K (0: default)");
  app.add_option("--out", c.out, "output file (default stdout)");
  app.add_option("--format", c.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--threads", c.threads, "worker threads (0: PICKANDS_THREADS or hardware)");

  auto* estimate = app.add_subcommand("estimate", "estimate H^delta with the selected methods");
  auto* crosscheck = app.add_subcommand("crosscheck", "all grid formulas on shared paths");
  auto* bound = app.add_subcommand("bound", "closed-form lower bounds");
  auto* maxstable = app.add_subcommand("maxstable", "max-stable simulation and checks");
  auto* smallball = app.add_subcommand("smallball", "small-ball probabilities");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (eta > 0.0) c.etas.insert(c.etas.begin(), eta);
  c.command = app.get_subcommands().front()->get_name();

  Report rep;
  rep.command = c.command;
  rep.seed = c.seed;
  rep.config_hash = config_hash(c);
  int status = 0;
  try {
    check(pk_set_threads(c.threads));
    if (estimate->parsed()) status = run_estimate(c, rep);
    else if (crosscheck->parsed()) status = run_crosscheck(c, rep);
    else if (bound->parsed()) status = run_bound(c, rep);
    else if (maxstable->parsed()) status = run_maxstable(c, rep, samples);
    else if (smallball->parsed()) status = run_smallball(c, rep);
  } catch (const ApiError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.status == PK_ERR_INTERNAL ? 3 : 2;
  }

  std::ofstream file;
  if (!c.out.empty()) {
    file.open(c.out);
    if (!file) {
      std::cerr << "error: cannot write '" << c.out << "'\n";
      return 3;
    }
  }
  std::ostream& os = c.out.empty() ? std::cout : file;
  if (c.format == "csv") write_csv(os, rep);
  else write_json(os, rep);
  return status;
}
