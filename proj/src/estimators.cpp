#include "estimators.hpp"

#include "numeric.hpp"
#include "parallel.hpp"
#include "path_sampler.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <limits>

namespace pickands {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct MethodInfo {
  Method method;
  std::string_view name;
  std::string_view alias;
};

constexpr std::array<MethodInfo, 10> kMethods{{
    {Method::definitional, "definitional", "defP"},
    {Method::exceedance, "exceedance", "albinA"},
    {Method::difference, "difference", "albinB"},
    {Method::argmax, "argmax", "formulaAB"},
    {Method::argmax_atomless, "argmax_atomless", "formulaABC"},
    {Method::dieker_yakir, "dieker_yakir", "seb"},
    {Method::time_reversed, "time_reversed", "kabWang"},
    {Method::continuous_dy, "continuous_dy", "ow"},
    {Method::candidate_theta, "candidate_theta", "formulaA"},
    {Method::extremal_blocks, "extremal_blocks", "candidat"},
}};

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto ca = static_cast<unsigned char>(a[i]);
    const auto cb = static_cast<unsigned char>(b[i]);
    if (std::tolower(ca) != std::tolower(cb)) return false;
  }
  return true;
}

bool is_grid_method(Method m) {
  switch (m) {
    case Method::exceedance:
    case Method::difference:
    case Method::argmax:
    case Method::argmax_atomless:
    case Method::dieker_yakir:
    case Method::time_reversed:
    case Method::candidate_theta:
      return true;
    default:
      return false;
  }
}

bool is_indicator(Method m) { return m != Method::difference && m != Method::dieker_yakir; }

void check_support(const Model& model, Method m) {
  if (!is_gaussian(model) && is_two_sided(m)) {
    throw Error(ErrorCode::unsupported,
                std::string(method_name(m)) +
                    " needs W on negative times; the Levy construction is one-sided");
  }
}

void check_reps(std::int64_t reps) {
  require(reps >= 2, ErrorCode::insufficient_data,
          "at least 2 replications are needed for a standard error");
}

// Extremes of one path restricted to |i| <= level.
struct LevelStats {
  double pos_max = kNegInf;  // max_{1<=i<=level} W(delta i)
  double neg_max = kNegInf;  // max_{-level<=i<=-1} W(delta i)
  double pos_lse = kNegInf;  // log sum_{1<=i<=level} e^W
  double neg_lse = kNegInf;
};

double method_value(Method m, const LevelStats& s, double e, double delta) {
  const double inv = 1.0 / delta;
  switch (m) {
    case Method::exceedance:
      return e + s.pos_max <= 0.0 ? inv : 0.0;
    case Method::difference:
      return s.pos_max >= 0.0 ? 0.0 : inv * -std::expm1(s.pos_max);
    case Method::argmax:
      return (s.neg_max < 0.0 && s.pos_max <= 0.0) ? inv : 0.0;
    case Method::argmax_atomless:
      return (s.neg_max <= 0.0 && s.pos_max <= 0.0) ? inv : 0.0;
    case Method::dieker_yakir: {
      const double log_m = std::max({0.0, s.pos_max, s.neg_max});
      LogSumExp lse;
      lse.add(0.0);
      if (s.pos_lse > kNegInf) lse.add(s.pos_lse);
      if (s.neg_lse > kNegInf) lse.add(s.neg_lse);
      return std::exp(log_m - lse.value()) * inv;
    }
    case Method::time_reversed:
      return e + s.neg_max <= 0.0 ? inv : 0.0;
    case Method::candidate_theta:
      return e + s.pos_max <= 0.0 ? 1.0 : 0.0;
    default:
      return 0.0;
  }
}

struct PassAcc {
  std::vector<Moments> at_level;     // [method] at horizon L
  std::vector<Moments> at_previous;  // [method] at the previous horizon
  std::vector<std::int64_t> hits;

  explicit PassAcc(std::size_t k = 0) : at_level(k), at_previous(k), hits(k, 0) {}
  void merge(const PassAcc& o) {
    for (std::size_t j = 0; j < at_level.size(); ++j) {
      at_level[j].merge(o.at_level[j]);
      at_previous[j].merge(o.at_previous[j]);
      hits[j] += o.hits[j];
    }
  }
};

PassAcc run_pass(const Model& model, std::span<const Method> methods, double delta,
                 std::int64_t horizon, std::int64_t previous, bool two_sided, std::int64_t reps,
                 std::uint64_t seed) {
  GridSpec grid{delta, two_sided ? -horizon : 0, horizon};
  const PathSampler sampler(model, grid);
  const std::size_t zero = static_cast<std::size_t>(-grid.i_min);
  const std::size_t k = methods.size();

  auto blocks = map_blocks<PassAcc>(reps, [&](std::int64_t begin, std::int64_t end) {
    PassAcc acc(k);
    auto ws = sampler.workspace();
    std::vector<double> w(sampler.size());
    for (std::int64_t r = begin; r < end; ++r) {
      Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(r));
      const double e = rng.exponential();
      sampler.sample(rng, ws, w);

      LevelStats full;
      LevelStats prev;
      LogSumExp lse;
      for (std::int64_t i = 1; i <= horizon; ++i) {
        const double x = w[zero + static_cast<std::size_t>(i)];
        full.pos_max = std::max(full.pos_max, x);
        lse.add(x);
        if (i == previous) {
          prev.pos_max = full.pos_max;
          prev.pos_lse = lse.value();
        }
      }
      full.pos_lse = lse.value();
      if (two_sided) {
        LogSumExp nlse;
        for (std::int64_t i = 1; i <= horizon; ++i) {
          const double x = w[zero - static_cast<std::size_t>(i)];
          full.neg_max = std::max(full.neg_max, x);
          nlse.add(x);
          if (i == previous) {
            prev.neg_max = full.neg_max;
            prev.neg_lse = nlse.value();
          }
        }
        full.neg_lse = nlse.value();
      }

      for (std::size_t j = 0; j < k; ++j) {
        const double v = method_value(methods[j], full, e, delta);
        acc.at_level[j].add(v);
        acc.at_previous[j].add(method_value(methods[j], prev, e, delta));
        if (v > 0.0) ++acc.hits[j];
      }
    }
    return acc;
  });

  PassAcc total(k);
  for (const auto& b : blocks) total.merge(b);
  return total;
}

}  // namespace

std::string_view method_name(Method m) {
  for (const auto& info : kMethods) {
    if (info.method == m) return info.name;
  }
  return "unknown";
}

std::optional<Method> parse_method(std::string_view name) {
  for (const auto& info : kMethods) {
    if (iequals(name, info.name) || iequals(name, info.alias)) return info.method;
  }
  return std::nullopt;
}

bool is_two_sided(Method m) {
  switch (m) {
    case Method::argmax:
    case Method::argmax_atomless:
    case Method::dieker_yakir:
    case Method::time_reversed:
    case Method::continuous_dy:
      return true;
    default:
      return false;
  }
}

void TruncationPolicy::validate() const {
  require(initial_horizon >= 1, ErrorCode::invalid_argument, "initial horizon must be >= 1");
  require(growth > 1.0, ErrorCode::invalid_argument, "growth factor must exceed 1");
  require(stability > 0.0, ErrorCode::invalid_argument, "stability tolerance must be positive");
  require(max_horizon >= initial_horizon, ErrorCode::invalid_argument,
          "max horizon must be >= initial horizon");
}

std::vector<EstimateResult> estimate_shared(const Model& model, std::span<const Method> methods,
                                            double delta, const RunParams& params) {
  require(!methods.empty(), ErrorCode::invalid_argument, "no methods selected");
  require(delta > 0.0 && std::isfinite(delta), ErrorCode::invalid_argument,
          "grid formulas need delta > 0");
  check_reps(params.replications);
  params.policy.validate();
  bool two_sided = false;
  for (Method m : methods) {
    require(is_grid_method(m), ErrorCode::invalid_argument,
            std::string(method_name(m)) + " cannot run on a shared grid path");
    check_support(model, m);
    two_sided = two_sided || is_two_sided(m);
  }

  const auto& pol = params.policy;
  std::int64_t horizon = pol.initial_horizon;
  std::vector<EstimateResult> out(methods.size());
  for (;;) {
    const auto previous =
        std::min(horizon - 1, static_cast<std::int64_t>(std::floor(static_cast<double>(horizon) /
                                                                   pol.growth)));
    const PassAcc acc = run_pass(model, methods, delta, horizon, previous, two_sided,
                                 params.replications, params.seed);
    bool all_stable = true;
    for (std::size_t j = 0; j < methods.size(); ++j) {
      auto& r = out[j];
      r.method = methods[j];
      r.delta = delta;
      r.estimate = acc.at_level[j].mean;
      r.std_error = acc.at_level[j].std_error();
      r.previous_estimate = acc.at_previous[j].mean;
      r.replications = params.replications;
      r.horizon = horizon;
      r.seed = params.seed;
      r.events = is_indicator(methods[j]) ? acc.hits[j] : -1;
      r.stable = std::abs(r.estimate - r.previous_estimate) <= pol.stability * r.std_error;
      r.flags = 0;
      if (is_indicator(methods[j]) && r.events < 30) r.flags |= flag_low_count;
      all_stable = all_stable && r.stable;
    }
    if (all_stable || horizon >= pol.max_horizon) break;
    horizon = std::min(pol.max_horizon,
                       static_cast<std::int64_t>(std::ceil(static_cast<double>(horizon) * pol.growth)));
  }
  for (auto& r : out) {
    if (!r.stable) r.flags |= flag_unstable;
  }
  return out;
}

EstimateResult est_definitional(const Model& model, double delta, double T, std::int64_t reps,
                                std::uint64_t seed) {
  require(delta > 0.0 && std::isfinite(delta), ErrorCode::invalid_argument, "delta must be > 0");
  require(T > 0.0 && std::isfinite(T), ErrorCode::invalid_argument, "T must be > 0");
  check_reps(reps);
  const auto n = static_cast<std::int64_t>(std::floor(T / delta * (1.0 + 1e-12)));
  const PathSampler sampler(model, GridSpec{delta, 0, n});

  auto blocks = map_blocks<Moments>(reps, [&](std::int64_t begin, std::int64_t end) {
    Moments acc;
    auto ws = sampler.workspace();
    std::vector<double> w(sampler.size());
    for (std::int64_t r = begin; r < end; ++r) {
      Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(r));
      sampler.sample(rng, ws, w);
      acc.add(std::exp(*std::max_element(w.begin(), w.end())) / T);
    }
    return acc;
  });
  Moments total;
  for (const auto& b : blocks) total.merge(b);

  EstimateResult r;
  r.method = Method::definitional;
  r.delta = delta;
  r.estimate = total.mean;
  r.std_error = total.std_error();
  r.replications = reps;
  r.horizon = n;
  r.seed = seed;
  return r;
}

EstimateResult est_continuous_dy(const Model& model, double eta, double window, std::int64_t reps,
                                 std::uint64_t seed, int refine) {
  require(is_gaussian(model), ErrorCode::unsupported,
          "the continuous estimator needs a two-sided Gaussian input");
  require(eta > 0.0 && std::isfinite(eta), ErrorCode::invalid_argument, "mesh must be > 0");
  require(window >= eta, ErrorCode::invalid_argument, "window must be at least one mesh step");
  require(refine >= 1, ErrorCode::invalid_argument, "refine must be >= 1");
  check_reps(reps);
  const auto& vf = std::get<VarianceFunction>(model);

  const auto k = static_cast<std::int64_t>(std::llround(window / eta));
  const std::int64_t half = std::max<std::int64_t>(1, k / 2);

  // Numerator on the continuum: exact for W linear in a single normal and for
  // independent increments (Brownian-bridge maximum per mesh interval);
  // otherwise the supremum over a refined mesh.
  const bool quadratic = vf.kind() != VarianceKind::tabulated && vf.alpha() == 2.0;
  const bool bridge = !quadratic && vf.independent_increments();
  const int sub = (quadratic || bridge) ? 1 : refine;
  const PathSampler sampler(model, GridSpec{eta / sub, -k * sub, k * sub});
  const std::size_t zero = static_cast<std::size_t>(k * sub);
  const double log_eta = std::log(eta);
  const double step_var = bridge ? sampler.increment_variance() : 0.0;
  const double c2 = quadratic ? vf.scale() : 0.0;  // sigma^2(t) = c2 t^2

  struct Acc {
    Moments full;
    Moments part;
  };
  auto blocks = map_blocks<Acc>(reps, [&](std::int64_t begin, std::int64_t end) {
    Acc acc;
    auto ws = sampler.workspace();
    std::vector<double> w(sampler.size());
    for (std::int64_t r = begin; r < end; ++r) {
      Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(r));
      sampler.sample(rng, ws, w);

      double sup_full = 0.0;
      double sup_part = 0.0;
      LogSumExp den_full;
      LogSumExp den_part;
      for (std::int64_t i = -k; i <= k; ++i) {
        const double x = w[zero + static_cast<std::size_t>(i * sub)];
        den_full.add(x);
        if (std::abs(i) <= half) den_part.add(x);
      }
      if (quadratic) {
        // W(t) = v t - c2 t^2 / 2 with v = (W(eta) + c2 eta^2 / 2) / eta
        const double v = (w[zero + 1] + 0.5 * c2 * eta * eta) / eta;
        auto sup_on = [&](double a) {
          const double t = std::clamp(v / c2, -a, a);
          return v * t - 0.5 * c2 * t * t;
        };
        sup_full = sup_on(eta * static_cast<double>(k));
        sup_part = sup_on(eta * static_cast<double>(half));
      } else if (bridge) {
        for (std::int64_t i = -k; i < k; ++i) {
          const double a = w[zero + static_cast<std::size_t>(i)];
          const double b = w[zero + static_cast<std::size_t>(i + 1)];
          const double d = b - a;
          const double m = 0.5 * (a + b + std::sqrt(d * d - 2.0 * step_var * std::log(rng.uniform())));
          sup_full = std::max(sup_full, m);
          if (i >= -half && i < half) sup_part = std::max(sup_part, m);
        }
      } else {
        for (std::int64_t j = -k * sub; j <= k * sub; ++j) {
          const double x = w[zero + static_cast<std::size_t>(j)];
          sup_full = std::max(sup_full, x);
          if (std::abs(j) <= half * sub) sup_part = std::max(sup_part, x);
        }
      }
      acc.full.add(std::exp(sup_full - log_eta - den_full.value()));
      acc.part.add(std::exp(sup_part - log_eta - den_part.value()));
    }
    return acc;
  });
  Moments full;
  Moments part;
  for (const auto& b : blocks) {
    full.merge(b.full);
    part.merge(b.part);
  }

  EstimateResult r;
  r.method = Method::continuous_dy;
  r.delta = 0.0;
  r.estimate = full.mean;
  r.std_error = full.std_error();
  r.previous_estimate = part.mean;
  r.replications = reps;
  r.horizon = k;
  r.seed = seed;
  // relative floor for near-deterministic ratios (alpha = 2)
  const double tol = std::max(TruncationPolicy{}.stability * r.std_error, 1e-6 * std::abs(full.mean));
  r.stable = std::abs(full.mean - part.mean) <= tol;
  if (!r.stable) r.flags |= flag_window;
  return r;
}

EstimateResult estimate(const Model& model, Method method, double delta, const RunParams& params) {
  switch (method) {
    case Method::definitional:
      return est_definitional(model, delta, params.horizon_time, params.replications, params.seed);
    case Method::continuous_dy:
      return est_continuous_dy(model, params.mesh, params.window, params.replications, params.seed,
                               params.refine);
    case Method::extremal_blocks:
      throw Error(ErrorCode::invalid_argument,
                  "the block estimator runs on the max-stable simulator, not on a single path");
    default: {
      const Method one[] = {method};
      return estimate_shared(model, one, delta, params).front();
    }
  }
}

EstimateResult est_exceedance(const Model& model, double delta, const RunParams& params) {
  return estimate(model, Method::exceedance, delta, params);
}
EstimateResult est_difference(const Model& model, double delta, const RunParams& params) {
  return estimate(model, Method::difference, delta, params);
}
EstimateResult est_argmax(const Model& model, double delta, const RunParams& params) {
  return estimate(model, Method::argmax, delta, params);
}
EstimateResult est_argmax_atomless(const Model& model, double delta, const RunParams& params) {
  return estimate(model, Method::argmax_atomless, delta, params);
}
EstimateResult est_dieker_yakir(const Model& model, double delta, const RunParams& params) {
  return estimate(model, Method::dieker_yakir, delta, params);
}
EstimateResult est_time_reversed(const Model& model, double delta, const RunParams& params) {
  return estimate(model, Method::time_reversed, delta, params);
}
EstimateResult est_candidate_theta(const Model& model, double delta, const RunParams& params) {
  return estimate(model, Method::candidate_theta, delta, params);
}

double gaussian_alpha2_constant(double delta) {
  return (normal_cdf(delta / std::sqrt(2.0)) - normal_cdf(-delta / std::sqrt(2.0))) / delta;
}

}  // namespace pickands
