#pragma once

#include "estimators.hpp"
#include "models.hpp"
#include "path_sampler.hpp"
#include "rng.hpp"

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace pickands {

struct MaxStableSample {
  GridSpec grid;
  std::vector<double> zeta;
  std::int64_t atoms_used = 0;
  bool truncation_bias = false;
};

// Simulates zeta_W on a grid of n points.
//
// Uses the grid-normalized spectral form
//   zeta(i) = max_j (n / Gamma_j) V_j(i) / sum_s V_j(s),
// where V_j is e^{W} under the tilt e^{W(t_K)}, K uniform on the grid, seen
// relative to its value at t_K: V(t) = e^{W(t - t_K)} for Gaussian inputs,
// and for Levy inputs untilted increments right of t_K with Esscher-tilted
// (theta = 1) ones to its left. Spectral values are at most n, so atoms stop
// exactly once n / Gamma_j drops below the current pointwise minimum. The
// only truncation is the atom cap.
class MaxStableSimulator {
 public:
  struct State {
    Rng rng{0};
    double gamma = 0.0;  // arrival time of the next atom
    std::vector<double> zeta;
    std::int64_t atoms = 0;
    bool truncation_bias = false;
    PathSampler::Workspace ws;
    std::vector<double> path;
  };

  MaxStableSimulator(const Model& model, GridSpec grid, std::int64_t atom_cap, std::uint64_t seed);

  const GridSpec& grid() const { return grid_; }

  State start(std::uint64_t index) const;
  // Adds atoms until none of the remaining ones can push any zeta(i) above
  // max(floor, min_i zeta(i)). Values above the floor are then exact.
  void refine(State& state, double floor) const;
  MaxStableSample sample(std::uint64_t index) const;

 private:
  Model model_;
  GridSpec grid_;
  std::int64_t atom_cap_;
  std::uint64_t seed_;
  LevyModel tilted_;
  double tilted_drift_ = 0.0;  // per unit time, left of t_K
  double untilted_drift_ = 0.0;
  std::unique_ptr<PathSampler> sampler_;

  // Leaves log V(t_j) for tilt point k in state.path[0..n).
  void draw_tilted(State& state, std::size_t k) const;
};

MaxStableSample sample_max_stable(const Model& model, const GridSpec& grid, std::int64_t atom_cap,
                                  std::uint64_t seed, std::uint64_t index = 0);

struct Probability {
  double probability = 0.0;
  double std_error = 0.0;
  std::int64_t replications = 0;
};

// exp(-E max_k e^{W(t_k)} / x_k) by Monte Carlo over W.
Probability fdd_probability(const Model& model, std::span<const double> times,
                            std::span<const double> thresholds, std::int64_t reps,
                            std::uint64_t seed);

struct FddCheck {
  double empirical = 0.0;
  double empirical_se = 0.0;
  double oracle = 0.0;
  double oracle_se = 0.0;
  double z_score = 0.0;
  bool pass = false;  // |z| <= 3
  bool truncation_bias = false;
};

// Frequency of {zeta(t_k) <= x_k for all k} from the simulator against the
// oracle above. Times must be multiples of delta.
FddCheck check_fdd(const Model& model, double delta, std::span<const double> times,
                   std::span<const double> thresholds, std::int64_t samples,
                   std::int64_t oracle_reps, std::uint64_t seed);

struct KsReport {
  double statistic = 0.0;
  double p_value = 0.0;
  std::int64_t samples = 0;
  bool pass = false;
  bool truncation_bias = false;
};

// One-sample KS test of zeta(delta * point) on grid [0, i_max] against e^{-1/x}.
KsReport check_marginal(const Model& model, double delta, std::int64_t i_max, std::int64_t point,
                        std::int64_t samples, std::uint64_t seed, double level = 0.01);

// (n / r) P{max_{0<=i<=r} zeta(delta i) > n}
EstimateResult est_extremal_index_blocks(const Model& model, double delta, std::int64_t n,
                                         std::int64_t r, std::int64_t reps, std::uint64_t seed);

struct TailProcessSample {
  GridSpec grid;
  std::vector<double> y;  // P e^{W(delta i)}
  double pareto = 1.0;
};

TailProcessSample sample_tail_process(const Model& model, const GridSpec& grid, Rng& rng);

struct TailCheck {
  double ks_distance = 0.0;  // two-sample distance
  std::int64_t samples = 0;
  std::int64_t trials = 0;
  bool pass = false;  // distance < tolerance
};

// Law of zeta(delta) / T given zeta(0) > T against the law of Y(1).
TailCheck check_tail_process(const Model& model, double delta, double threshold,
                             std::int64_t samples, std::uint64_t seed, double tolerance = 0.02);

}  // namespace pickands
