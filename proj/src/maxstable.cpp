#include "maxstable.hpp"

#include "numeric.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace pickands {

namespace {

constexpr std::uint64_t kSaltAtoms = 0x61746f6d;
constexpr std::uint64_t kSaltOracle = 0x6f72636c;
constexpr std::uint64_t kSaltTail = 0x7461696c;
constexpr std::int64_t kDefaultAtomCap = 1 << 20;

std::vector<std::int64_t> indices_of(std::span<const double> times, double delta) {
  std::vector<std::int64_t> idx;
  idx.reserve(times.size());
  for (double t : times) {
    const auto i = static_cast<std::int64_t>(std::llround(t / delta));
    require(std::abs(static_cast<double>(i) * delta - t) <= 1e-9 * std::max(1.0, std::abs(t)),
            ErrorCode::invalid_argument, "fdd times must be multiples of delta");
    idx.push_back(i);
  }
  return idx;
}

// Law of the Levy input under the measure e^{B(1) - Phi(1)} dP, without the
// extra diffusion drift.
LevyModel esscher(const LevyModel& m) {
  LevyModel t = m;
  if (m.jump_rate <= 0.0) return t;
  t.jump_rate = m.jump_rate * m.jump.mgf(1.0);
  switch (m.jump.kind) {
    case JumpKind::normal:
      t.jump.a = m.jump.a + m.jump.b * m.jump.b;
      break;
    case JumpKind::exponential:
      t.jump.a = m.jump.a - 1.0;
      break;
    default:
      break;
  }
  return t;
}

}  // namespace

MaxStableSimulator::MaxStableSimulator(const Model& model, GridSpec grid, std::int64_t atom_cap,
                                       std::uint64_t seed)
    : model_(model), grid_(grid), atom_cap_(atom_cap), seed_(seed) {
  grid_.validate();
  require(atom_cap_ >= 1, ErrorCode::invalid_argument, "atom cap must be >= 1");
  const std::int64_t span = grid_.i_max - grid_.i_min;
  if (is_gaussian(model_)) {
    sampler_ = std::make_unique<PathSampler>(model_, GridSpec{grid_.delta, -span, span});
    return;
  }
  const auto& levy = std::get<LevyModel>(model_);
  sampler_ = std::make_unique<PathSampler>(model_, grid_);
  tilted_ = esscher(levy);
  const double phi1 = laplace_exponent(levy, 1.0);
  untilted_drift_ = -phi1;
  tilted_drift_ = levy.diffusion * levy.diffusion - phi1;
}

MaxStableSimulator::State MaxStableSimulator::start(std::uint64_t index) const {
  State s;
  s.rng = Rng::stream(seed_, index, kSaltAtoms);
  s.gamma = s.rng.exponential();
  s.zeta.assign(static_cast<std::size_t>(grid_.size()), 0.0);
  s.ws = sampler_->workspace();
  s.path.resize(sampler_->size());
  return s;
}

void MaxStableSimulator::draw_tilted(State& s, std::size_t k) const {
  const std::size_t n = s.zeta.size();
  if (is_gaussian(model_)) {
    sampler_->sample(s.rng, s.ws, s.path);
    // W(t_j - t_k) sits at index j - k + n - 1
    if (k + 1 < n) std::copy_n(s.path.begin() + static_cast<std::ptrdiff_t>(n - 1 - k), n, s.path.begin());
    return;
  }
  const auto& levy = std::get<LevyModel>(model_);
  const double dt = grid_.delta;
  s.path[k] = 0.0;
  for (std::size_t j = k + 1; j < n; ++j) {
    s.path[j] = s.path[j - 1] + sample_levy_increment(levy, dt, s.rng) + untilted_drift_ * dt;
  }
  for (std::size_t j = k; j-- > 0;) {
    s.path[j] = s.path[j + 1] - sample_levy_increment(tilted_, dt, s.rng) - tilted_drift_ * dt;
  }
}

void MaxStableSimulator::refine(State& s, double floor) const {
  const std::size_t n = s.zeta.size();
  const double points = static_cast<double>(n);
  for (;;) {
    const double level = std::max(floor, *std::min_element(s.zeta.begin(), s.zeta.end()));
    const double u = points / s.gamma;
    if (u <= level) return;
    if (s.atoms >= atom_cap_) {
      s.truncation_bias = true;
      return;
    }
    const auto k = std::min<std::size_t>(n - 1, static_cast<std::size_t>(s.rng.uniform() * points));
    draw_tilted(s, k);
    const std::span<const double> v(s.path.data(), n);
    const double log_scale = std::log(u) - log_sum_exp(v);
    for (std::size_t p = 0; p < n; ++p) s.zeta[p] = std::max(s.zeta[p], std::exp(log_scale + v[p]));
    ++s.atoms;
    s.gamma += s.rng.exponential();
  }
}

MaxStableSample MaxStableSimulator::sample(std::uint64_t index) const {
  State s = start(index);
  refine(s, 0.0);
  return {grid_, std::move(s.zeta), s.atoms, s.truncation_bias};
}

MaxStableSample sample_max_stable(const Model& model, const GridSpec& grid, std::int64_t atom_cap,
                                  std::uint64_t seed, std::uint64_t index) {
  return MaxStableSimulator(model, grid, atom_cap, seed).sample(index);
}

Probability fdd_probability(const Model& model, std::span<const double> times,
                            std::span<const double> thresholds, std::int64_t reps,
                            std::uint64_t seed) {
  require(!times.empty() && times.size() == thresholds.size(), ErrorCode::invalid_argument,
          "times and thresholds must be non-empty and of equal length");
  for (double x : thresholds) {
    require(x > 0.0, ErrorCode::invalid_argument, "thresholds must be positive");
  }
  require(reps >= 2, ErrorCode::insufficient_data, "at least 2 replications are needed");
  const std::size_t k = times.size();
  std::vector<double> log_x(k);
  for (std::size_t j = 0; j < k; ++j) log_x[j] = std::log(thresholds[j]);

  std::function<void(Rng&, std::vector<double>&)> draw;
  Eigen::MatrixXd root;
  std::vector<double> drift(k);
  std::vector<std::size_t> order(k);
  std::vector<double> t(times.begin(), times.end());

  if (const auto* vf = std::get_if<VarianceFunction>(&model)) {
    const Eigen::MatrixXd cov = gaussian_cov(*vf, t);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    const Eigen::VectorXd s = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    root = es.eigenvectors() * s.asDiagonal();
    for (std::size_t j = 0; j < k; ++j) drift[j] = 0.5 * (*vf)(t[j]);
    draw = [&](Rng& rng, std::vector<double>& w) {
      Eigen::VectorXd z(static_cast<Eigen::Index>(k));
      for (Eigen::Index j = 0; j < z.size(); ++j) z[j] = rng.normal();
      const Eigen::VectorXd b = root * z;
      for (std::size_t j = 0; j < k; ++j) w[j] = b[static_cast<Eigen::Index>(j)] - drift[j];
    };
  } else {
    const auto& levy = std::get<LevyModel>(model);
    for (double x : t) {
      require(x >= 0.0, ErrorCode::unsupported, "Levy-based W is defined for t >= 0 only");
    }
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return t[a] < t[b]; });
    const double phi1 = laplace_exponent(levy, 1.0);
    draw = [&, phi1](Rng& rng, std::vector<double>& w) {
      double b = 0.0;
      double prev = 0.0;
      for (std::size_t j : order) {
        if (t[j] > prev) b += sample_levy_increment(levy, t[j] - prev, rng);
        prev = t[j];
        w[j] = b - phi1 * t[j];
      }
    };
  }

  auto blocks = map_blocks<Moments>(reps, [&](std::int64_t begin, std::int64_t end) {
    Moments acc;
    std::vector<double> w(k);
    for (std::int64_t r = begin; r < end; ++r) {
      Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(r), kSaltOracle);
      draw(rng, w);
      double m = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < k; ++j) m = std::max(m, w[j] - log_x[j]);
      acc.add(std::exp(m));
    }
    return acc;
  });
  Moments total;
  for (const auto& b : blocks) total.merge(b);
  Probability p;
  p.probability = std::exp(-total.mean);
  p.std_error = p.probability * total.std_error();
  p.replications = reps;
  return p;
}

FddCheck check_fdd(const Model& model, double delta, std::span<const double> times,
                   std::span<const double> thresholds, std::int64_t samples,
                   std::int64_t oracle_reps, std::uint64_t seed) {
  require(delta > 0.0, ErrorCode::invalid_argument, "delta must be > 0");
  require(!times.empty() && times.size() == thresholds.size(), ErrorCode::invalid_argument,
          "times and thresholds must be non-empty and of equal length");
  require(samples >= 2, ErrorCode::insufficient_data, "at least 2 samples are needed");
  const auto idx = indices_of(times, delta);
  GridSpec grid{delta, std::min<std::int64_t>(0, *std::min_element(idx.begin(), idx.end())),
                std::max<std::int64_t>(0, *std::max_element(idx.begin(), idx.end()))};
  const MaxStableSimulator sim(model, grid, kDefaultAtomCap, seed);
  const double floor = *std::min_element(thresholds.begin(), thresholds.end());

  struct Acc {
    std::int64_t hits = 0;
    bool bias = false;
  };
  auto blocks = map_blocks<Acc>(samples, [&](std::int64_t begin, std::int64_t end) {
    Acc acc;
    for (std::int64_t r = begin; r < end; ++r) {
      auto s = sim.start(static_cast<std::uint64_t>(r));
      sim.refine(s, floor);
      bool inside = true;
      for (std::size_t j = 0; j < idx.size(); ++j) {
        inside = inside && s.zeta[static_cast<std::size_t>(idx[j] - grid.i_min)] <= thresholds[j];
      }
      if (inside) ++acc.hits;
      acc.bias = acc.bias || s.truncation_bias;
    }
    return acc;
  });
  FddCheck out;
  std::int64_t hits = 0;
  for (const auto& b : blocks) {
    hits += b.hits;
    out.truncation_bias = out.truncation_bias || b.bias;
  }
  const double n = static_cast<double>(samples);
  out.empirical = static_cast<double>(hits) / n;
  out.empirical_se = std::sqrt(out.empirical * (1.0 - out.empirical) / n);
  std::uint64_t oracle_seed = seed;
  oracle_seed = splitmix64(oracle_seed);
  const auto oracle = fdd_probability(model, times, thresholds, oracle_reps, oracle_seed);
  out.oracle = oracle.probability;
  out.oracle_se = oracle.std_error;
  const double se = std::hypot(out.empirical_se, out.oracle_se);
  const double diff = out.empirical - out.oracle;
  out.z_score = se > 0.0 ? diff / se : (diff == 0.0 ? 0.0 : std::copysign(INFINITY, diff));
  out.pass = std::abs(out.z_score) <= 3.0;
  return out;
}

KsReport check_marginal(const Model& model, double delta, std::int64_t i_max, std::int64_t point,
                        std::int64_t samples, std::uint64_t seed, double level) {
  require(point >= 0 && point <= i_max, ErrorCode::invalid_argument,
          "point must lie in [0, i_max]");
  require(samples >= 2, ErrorCode::insufficient_data, "at least 2 samples are needed");
  const MaxStableSimulator sim(model, GridSpec{delta, 0, i_max}, kDefaultAtomCap, seed);

  struct Acc {
    std::vector<double> values;
    bool bias = false;
  };
  auto blocks = map_blocks<Acc>(samples, [&](std::int64_t begin, std::int64_t end) {
    Acc acc;
    acc.values.reserve(static_cast<std::size_t>(end - begin));
    for (std::int64_t r = begin; r < end; ++r) {
      const auto s = sim.sample(static_cast<std::uint64_t>(r));
      acc.values.push_back(s.zeta[static_cast<std::size_t>(point)]);
      acc.bias = acc.bias || s.truncation_bias;
    }
    return acc;
  });
  KsReport rep;
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(samples));
  for (const auto& b : blocks) {
    values.insert(values.end(), b.values.begin(), b.values.end());
    rep.truncation_bias = rep.truncation_bias || b.bias;
  }
  rep.samples = samples;
  rep.statistic = ks_statistic(std::move(values), [](double x) { return std::exp(-1.0 / x); });
  rep.p_value = kolmogorov_pvalue(rep.statistic, samples);
  rep.pass = rep.p_value >= level && !rep.truncation_bias;
  return rep;
}

EstimateResult est_extremal_index_blocks(const Model& model, double delta, std::int64_t n,
                                         std::int64_t r, std::int64_t reps, std::uint64_t seed) {
  require(delta > 0.0, ErrorCode::invalid_argument, "delta must be > 0");
  require(n >= 1 && r >= 1, ErrorCode::invalid_argument, "n and r must be >= 1");
  require(reps >= 2, ErrorCode::insufficient_data, "at least 2 replications are needed");
  const MaxStableSimulator sim(model, GridSpec{delta, 0, r}, kDefaultAtomCap, seed);
  const double level = static_cast<double>(n);

  struct Acc {
    std::int64_t hits = 0;
    bool bias = false;
  };
  auto blocks = map_blocks<Acc>(reps, [&](std::int64_t begin, std::int64_t end) {
    Acc acc;
    for (std::int64_t k = begin; k < end; ++k) {
      auto s = sim.start(static_cast<std::uint64_t>(k));
      sim.refine(s, level);
      if (*std::max_element(s.zeta.begin(), s.zeta.end()) > level) ++acc.hits;
      acc.bias = acc.bias || s.truncation_bias;
    }
    return acc;
  });
  EstimateResult res;
  res.method = Method::extremal_blocks;
  res.delta = delta;
  res.replications = reps;
  res.horizon = r;
  res.seed = seed;
  std::int64_t hits = 0;
  for (const auto& b : blocks) {
    hits += b.hits;
    if (b.bias) res.flags |= flag_truncation_bias;
  }
  const double p = static_cast<double>(hits) / static_cast<double>(reps);
  const double scale = level / static_cast<double>(r);
  res.estimate = scale * p;
  res.std_error = scale * std::sqrt(p * (1.0 - p) / static_cast<double>(reps));
  res.events = hits;
  if (hits < 30) res.flags |= flag_low_count;
  return res;
}

TailProcessSample sample_tail_process(const Model& model, const GridSpec& grid, Rng& rng) {
  TailProcessSample out;
  out.grid = grid;
  const double e = rng.exponential();
  out.pareto = std::exp(e);
  const PathSample path = PathSampler(model, grid).sample(rng);
  out.y.resize(path.w.size());
  for (std::size_t p = 0; p < path.w.size(); ++p) out.y[p] = std::exp(e + path.w[p]);
  return out;
}

TailCheck check_tail_process(const Model& model, double delta, double threshold,
                             std::int64_t samples, std::uint64_t seed, double tolerance) {
  require(threshold > 1.0, ErrorCode::invalid_argument, "threshold must exceed 1");
  require(samples >= 2, ErrorCode::insufficient_data, "at least 2 samples are needed");
  const GridSpec grid{delta, 0, 1};
  const MaxStableSimulator sim(model, grid, kDefaultAtomCap, seed);
  const double fine = 1e-3 * threshold;

  // Conditional draws, kept in trial order so the result is schedule free.
  std::vector<double> conditional;
  std::int64_t next = 0;
  std::int64_t used_trials = 0;
  while (static_cast<std::int64_t>(conditional.size()) < samples) {
    const auto missing = static_cast<double>(samples - static_cast<std::int64_t>(conditional.size()));
    const auto chunk = static_cast<std::int64_t>(missing * threshold * 1.5) + kBlockSize;
    const std::int64_t base = next;
    auto blocks = map_blocks<std::vector<std::pair<std::int64_t, double>>>(
        chunk, [&](std::int64_t begin, std::int64_t end) {
          std::vector<std::pair<std::int64_t, double>> acc;
          for (std::int64_t r = begin; r < end; ++r) {
            auto s = sim.start(static_cast<std::uint64_t>(base + r));
            sim.refine(s, threshold);
            if (s.zeta[0] <= threshold) continue;
            sim.refine(s, fine);
            acc.emplace_back(base + r, s.zeta[1] / threshold);
          }
          return acc;
        });
    for (const auto& b : blocks) {
      for (const auto& [trial, v] : b) {
        if (static_cast<std::int64_t>(conditional.size()) < samples) {
          conditional.push_back(v);
          used_trials = trial + 1;
        }
      }
    }
    next += chunk;
  }

  const PathSampler sampler(model, grid);
  auto blocks = map_blocks<std::vector<double>>(samples, [&](std::int64_t begin, std::int64_t end) {
    std::vector<double> acc;
    auto ws = sampler.workspace();
    std::vector<double> w(sampler.size());
    for (std::int64_t r = begin; r < end; ++r) {
      Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(r), kSaltTail);
      const double e = rng.exponential();
      sampler.sample(rng, ws, w);
      acc.push_back(std::exp(e + w[1]));
    }
    return acc;
  });
  std::vector<double> tail;
  for (const auto& b : blocks) tail.insert(tail.end(), b.begin(), b.end());

  TailCheck out;
  out.samples = samples;
  out.trials = used_trials;
  out.ks_distance = ks_distance(std::move(conditional), std::move(tail));
  out.pass = out.ks_distance < tolerance;
  return out;
}

}  // namespace pickands
