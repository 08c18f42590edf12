#include "pickands/pickands.h"

#include "bounds.hpp"
#include "estimators.hpp"
#include "maxstable.hpp"
#include "models.hpp"
#include "parallel.hpp"
#include "path_sampler.hpp"
#include "smallball.hpp"

#include <memory>
#include <new>
#include <string>
#include <vector>

struct pk_model {
  pickands::Model model;
};

struct pk_maxstable_sim {
  std::unique_ptr<pickands::MaxStableSimulator> sim;
};

namespace {

using namespace pickands;

thread_local std::string g_last_error;

pk_status fail(pk_status status, const char* msg) {
  g_last_error = msg;
  return status;
}

pk_status to_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument:
      return PK_ERR_INVALID_ARGUMENT;
    case ErrorCode::out_of_range:
      return PK_ERR_OUT_OF_RANGE;
    case ErrorCode::domain:
      return PK_ERR_DOMAIN;
    case ErrorCode::model:
      return PK_ERR_MODEL;
    case ErrorCode::unsupported:
      return PK_ERR_UNSUPPORTED;
    case ErrorCode::insufficient_data:
      return PK_ERR_INSUFFICIENT_DATA;
  }
  return PK_ERR_INTERNAL;
}

template <class Fn>
pk_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return PK_OK;
  } catch (const Error& e) {
    return fail(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(PK_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(PK_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(PK_ERR_INTERNAL, "unknown error");
  }
}

#define PK_REQUIRE_PTR(p)                                                 \
  do {                                                                    \
    if (!(p)) return fail(PK_ERR_INVALID_ARGUMENT, #p " must not be null"); \
  } while (0)

TruncationPolicy to_policy(const pk_policy& p) {
  TruncationPolicy t;
  t.initial_horizon = p.initial_horizon;
  t.growth = p.growth;
  t.stability = p.stability;
  t.max_horizon = p.max_horizon;
  return t;
}

RunParams to_params(const pk_run_params& p) {
  RunParams r;
  r.replications = p.replications;
  r.seed = p.seed;
  r.policy = to_policy(p.policy);
  r.horizon_time = p.horizon_time;
  r.mesh = p.mesh;
  r.window = p.window;
  r.refine = p.refine;
  return r;
}

pk_estimate to_c(const EstimateResult& r) {
  pk_estimate e{};
  e.method = static_cast<int32_t>(r.method);
  e.delta = r.delta;
  e.estimate = r.estimate;
  e.std_error = r.std_error;
  e.replications = r.replications;
  e.horizon = r.horizon;
  e.stable = r.stable ? 1 : 0;
  e.seed = r.seed;
  e.flags = r.flags;
  e.events = r.events;
  e.previous_estimate = r.previous_estimate;
  return e;
}

pk_bound to_c(const BoundResult& b) {
  pk_bound o{};
  o.value = b.value;
  o.series = b.series;
  o.series_tail_bound = b.series_tail_bound;
  o.terms = b.terms;
  o.clamped = b.clamped ? 1 : 0;
  o.tail_unbounded = b.tail_unbounded ? 1 : 0;
  return o;
}

pk_smallball_row to_c(const SmallBallRow& r) {
  pk_smallball_row o{};
  o.eta = r.eta;
  o.cutoff = r.cutoff;
  o.probability = r.probability;
  o.std_error = r.std_error;
  o.scaled = r.scaled;
  o.scaled_se = r.scaled_se;
  o.replications = r.replications;
  o.stable = r.stable ? 1 : 0;
  o.factorized = r.factorized ? 1 : 0;
  o.direct = r.direct;
  o.direct_se = r.direct_se;
  return o;
}

SmallBallRow from_c(const pk_smallball_row& r) {
  SmallBallRow o;
  o.eta = r.eta;
  o.cutoff = r.cutoff;
  o.probability = r.probability;
  o.std_error = r.std_error;
  o.scaled = r.scaled;
  o.scaled_se = r.scaled_se;
  o.replications = r.replications;
  o.stable = r.stable != 0;
  o.factorized = r.factorized != 0;
  o.direct = r.direct;
  o.direct_se = r.direct_se;
  return o;
}

const VarianceFunction& gaussian_of(const pk_model* m) {
  const auto* vf = std::get_if<VarianceFunction>(&m->model);
  require(vf != nullptr, ErrorCode::invalid_argument, "model is not Gaussian");
  return *vf;
}

const LevyModel& levy_of(const pk_model* m) {
  const auto* lm = std::get_if<LevyModel>(&m->model);
  require(lm != nullptr, ErrorCode::invalid_argument, "model is not a Levy model");
  return *lm;
}

void make_model(Model model, pk_model** out) { *out = new pk_model{std::move(model)}; }

}  // namespace

extern "C" {

const char* pk_version(void) { return "0.1.0"; }

const char* pk_last_error_message(void) { return g_last_error.c_str(); }

pk_status pk_set_threads(int32_t threads) {
  if (threads < 0) return fail(PK_ERR_INVALID_ARGUMENT, "threads must be >= 0");
  set_worker_count(threads);
  return PK_OK;
}

const char* pk_method_name(pk_method method) {
  return method_name(static_cast<Method>(method)).data();
}

pk_status pk_method_parse(const char* name, pk_method* out) {
  PK_REQUIRE_PTR(name);
  PK_REQUIRE_PTR(out);
  const auto m = parse_method(name);
  if (!m) return fail(PK_ERR_INVALID_ARGUMENT, "unknown method name");
  *out = static_cast<pk_method>(*m);
  return PK_OK;
}

pk_policy pk_policy_default(void) {
  const TruncationPolicy t;
  return pk_policy{t.initial_horizon, t.growth, t.stability, t.max_horizon};
}

pk_run_params pk_run_params_default(void) {
  const RunParams r;
  pk_run_params p{};
  p.replications = r.replications;
  p.seed = r.seed;
  p.policy = pk_policy_default();
  p.horizon_time = r.horizon_time;
  p.mesh = r.mesh;
  p.window = r.window;
  p.refine = r.refine;
  return p;
}

pk_status pk_model_create_power(double alpha, pk_model** out) {
  PK_REQUIRE_PTR(out);
  return guarded([&] { make_model(VarianceFunction::power(alpha), out); });
}

pk_status pk_model_create_scaled_power(double alpha, double scale, pk_model** out) {
  PK_REQUIRE_PTR(out);
  return guarded([&] { make_model(VarianceFunction::scaled_power(alpha, scale), out); });
}

pk_status pk_model_create_tabulated(const double* times, const double* values, size_t count,
                                    pk_model** out) {
  PK_REQUIRE_PTR(times);
  PK_REQUIRE_PTR(values);
  PK_REQUIRE_PTR(out);
  return guarded([&] {
    make_model(VarianceFunction::tabulated(std::vector<double>(times, times + count),
                                           std::vector<double>(values, values + count)),
               out);
  });
}

pk_status pk_model_create_levy(double diffusion, double jump_rate, pk_jump_kind jump,
                               double jump_a, double jump_b, pk_model** out) {
  PK_REQUIRE_PTR(out);
  return guarded([&] {
    JumpLaw law;
    switch (jump) {
      case PK_JUMP_NONE:
        law.kind = JumpKind::none;
        break;
      case PK_JUMP_CONSTANT:
        law.kind = JumpKind::constant;
        break;
      case PK_JUMP_NORMAL:
        law.kind = JumpKind::normal;
        break;
      case PK_JUMP_EXPONENTIAL:
        law.kind = JumpKind::exponential;
        break;
      default:
        throw Error(ErrorCode::invalid_argument, "unknown jump kind");
    }
    law.a = jump_a;
    law.b = jump_b;
    make_model(LevyModel::brownian_plus_compound_poisson(diffusion, jump_rate, law), out);
  });
}

void pk_model_destroy(pk_model* model) { delete model; }

int32_t pk_model_is_gaussian(const pk_model* model) {
  return model != nullptr && is_gaussian(model->model) ? 1 : 0;
}

pk_status pk_model_variance_at(const pk_model* model, double t, double* out) {
  PK_REQUIRE_PTR(model);
  PK_REQUIRE_PTR(out);
  return guarded([&] { *out = variance_at(gaussian_of(model), t); });
}

pk_status pk_model_laplace_exponent(const pk_model* model, double theta, double* out) {
  PK_REQUIRE_PTR(model);
  PK_REQUIRE_PTR(out);
  return guarded([&] { *out = laplace_exponent(levy_of(model), theta); });
}

pk_status pk_model_sample_path(const pk_model* model, double delta, int64_t i_min, int64_t i_max,
                               uint64_t seed, uint64_t index, double* w, size_t len) {
  PK_REQUIRE_PTR(model);
  PK_REQUIRE_PTR(w);
  return guarded([&] {
    const PathSampler sampler(model->model, GridSpec{delta, i_min, i_max});
    require(len == sampler.size(), ErrorCode::invalid_argument,
            "output length must equal i_max - i_min + 1");
    Rng rng = Rng::stream(seed, index);
    auto ws = sampler.workspace();
    sampler.sample(rng, ws, std::span<double>(w, len));
  });
}

pk_status pk_estimate_run(const pk_model* model, pk_method method, double delta,
                          const pk_run_params* params, pk_estimate* out) {
  PK_REQUIRE_PTR(model);
  PK_REQUIRE_PTR(params);
  PK_REQUIRE_PTR(out);
  return guarded([&] {
    *out = to_c(estimate(model->model, static_cast<Method>(method), delta, to_params(*params)));
  });
}

pk_status pk_estimate_shared(const pk_model* model, const pk_method* methods, size_t count,
                             double delta, const pk_run_params* params, pk_estimate* out) {
  PK_REQUIRE_PTR(model);
  PK_REQUIRE_PTR(methods);
  PK_REQUIRE_PTR(params);
  PK_REQUIRE_PTR(out);
  return guarded([&] {
    std::vector<Method> ms;
    for (size_t j = 0; j < count; ++j) ms.push_back(static_cast<Method>(methods[j]));
    const auto res = estimate_shared(model->model, ms, delta, to_params(*params));
    for (size_t j = 0; j < count; ++j) out[j] = to_c(res[j]);
  });
}

pk_status pk_bound_gaussian(const pk_model* model, double delta, pk_bound* out) {
  PK_REQUIRE_PTR(model);
  PK_REQUIRE_PTR(out);
  return guarded([&] { *out = to_c(gaussian_lower_bound(gaussian_of(model), delta)); });
}

pk_status pk_bound_power(double c, double kappa, double delta, pk_bound* out) {
  PK_REQUIRE_PTR(out);
  return guarded([&] { *out = to_c(gaussian_power_bound(c, kappa, delta)); });
}

pk_status pk_bound_levy(const pk_model* model, double delta, pk_bound* out) {
  PK_REQUIRE_PTR(model);
  PK_REQUIRE_PTR(out);
  return guarded([&] { *out = to_c(levy_lower_bound(levy_of(model), delta)); });
}

pk_status pk_bound_levy_h0(const pk_model* model, pk_bound* out) {
  PK_REQUIRE_PTR(model);
  PK_REQUIRE_PTR(out);
  return guarded([&] { *out = to_c(levy_h0_bound(levy_of(model))); });
}

pk_status pk_check_ln8(const pk_model* model, double horizon, pk_ln8_report* out) {
  PK_REQUIRE_PTR(model);
  PK_REQUIRE_PTR(out);
  return guarded([&] {
    const auto rep = check_ln8(gaussian_of(model), horizon);
    out->tail_min_ratio = rep.tail_min_ratio;
    out->last_ratio = rep.last_ratio;
    out->holds = rep.holds ? 1 : 0;
  });
}

pk_status pk_maxstable_create(const pk_model* model, double delta, int64_t i_min, int64_t i_max,
                              int64_t atom_cap, uint64_t seed, pk_maxstable_sim** out) {
  PK_REQUIRE_PTR(model);
  PK_REQUIRE_PTR(out);
  return guarded([&] {
    auto sim = std::make_unique<MaxStableSimulator>(model->model, GridSpec{delta, i_min, i_max},
                                                    atom_cap, seed);
    *out = new pk_maxstable_sim{std::move(sim)};
  });
}

void pk_maxstable_destroy(pk_maxstable_sim* sim) { delete sim; }

pk_status pk_maxstable_sample(const pk_maxstable_sim* sim, uint64_t index, double* zeta,
                              size_t len, pk_maxstable_info* info) {
  PK_REQUIRE_PTR(sim);
  PK_REQUIRE_PTR(zeta);
  return guarded([&] {
    require(len == static_cast<size_t>(sim->sim->grid().size()), ErrorCode::invalid_argument,
            "output length must equal the grid size");
    const auto s = sim->sim->sample(index);
    std::copy(s.zeta.begin(), s.zeta.end(), zeta);
    if (info) {
      info->atoms_used = s.atoms_used;
      info->truncation_bias = s.truncation_bias ? 1 : 0;
    }
  });
}

pk_status pk_fdd_probability(const pk_model* model, const double* times, const double* thresholds,
                             size_t count, int64_t replications, uint64_t seed,
                             pk_probability* out) {
  PK_REQUIRE_PTR(model);
  PK_REQUIRE_PTR(times);
  PK_REQUIRE_PTR(thresholds);
  PK_REQUIRE_PTR(out);
  return guarded([&] {
    const auto p = fdd_probability(model->model, std::span<const double>(times, count),
                                   std::span<const double>(thresholds, count), replications, seed);
    *out = pk_probability{p.probability, p.std_error, p.replications};
  });
}

pk_status pk_maxstable_check_fdd(const pk_model* model, double delta, const double* times,
                                 const double* thresholds, size_t count, int64_t samples,
                                 int64_t oracle_replications, uint64_t seed, pk_fdd_check* out) {
  PK_REQUIRE_PTR(model);
  PK_REQUIRE_PTR(times);
  PK_REQUIRE_PTR(thresholds);
  PK_REQUIRE_PTR(out);
  return guarded([&] {
    const auto c = check_fdd(model->model, delta, std::span<const double>(times, count),
                             std::span<const double>(thresholds, count), samples,
                             oracle_replications, seed);
    out->empirical = c.empirical;
    out->empirical_se = c.empirical_se;
    out->oracle = c.oracle;
    out->oracle_se = c.oracle_se;
    out->z_score = c.z_score;
    out->pass = c.pass ? 1 : 0;
    out->truncation_bias = c.truncation_bias ? 1 : 0;
  });
}

pk_status pk_maxstable_check_marginal(const pk_model* model, double delta, int64_t i_max,
                                      int64_t point, int64_t samples, uint64_t seed,
                                      pk_ks_report* out) {
  PK_REQUIRE_PTR(model);
  PK_REQUIRE_PTR(out);
  return guarded([&] {
    const auto r = check_marginal(model->model, delta, i_max, point, samples, seed);
    out->statistic = r.statistic;
    out->p_value = r.p_value;
    out->samples = r.samples;
    out->pass = r.pass ? 1 : 0;
    out->truncation_bias = r.truncation_bias ? 1 : 0;
  });
}

pk_status pk_maxstable_check_tail(const pk_model* model, double delta, double threshold,
                                  int64_t samples, uint64_t seed, pk_tail_check* out) {
  PK_REQUIRE_PTR(model);
  PK_REQUIRE_PTR(out);
  return guarded([&] {
    const auto r = check_tail_process(model->model, delta, threshold, samples, seed);
    out->ks_distance = r.ks_distance;
    out->samples = r.samples;
    out->trials = r.trials;
    out->pass = r.pass ? 1 : 0;
  });
}

pk_status pk_extremal_index_blocks(const pk_model* model, double delta, int64_t n, int64_t block,
                                   int64_t replications, uint64_t seed, pk_estimate* out) {
  PK_REQUIRE_PTR(model);
  PK_REQUIRE_PTR(out);
  return guarded([&] {
    *out = to_c(est_extremal_index_blocks(model->model, delta, n, block, replications, seed));
  });
}

pk_status pk_smallball_prob(double alpha, double eta, int64_t cutoff, int64_t max_cutoff,
                            int64_t replications, uint64_t seed, pk_smallball_row* out) {
  PK_REQUIRE_PTR(out);
  return guarded([&] {
    *out = to_c(est_smallball_prob(alpha, eta, cutoff, replications, seed, max_cutoff));
  });
}

pk_status pk_smallball_extrapolate(const pk_smallball_row* rows, size_t count,
                                   pk_extrapolation* out) {
  PK_REQUIRE_PTR(rows);
  PK_REQUIRE_PTR(out);
  return guarded([&] {
    std::vector<SmallBallRow> rs;
    for (size_t j = 0; j < count; ++j) rs.push_back(from_c(rows[j]));
    const auto e = smallball_extrapolate(rs);
    *out = pk_extrapolation{e.intercept, e.std_error, e.slope, e.fit_warning ? 1 : 0};
  });
}

}  // extern "C"
