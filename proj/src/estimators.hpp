#pragma once

#include "models.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pickands {

enum class Method {
  definitional = 0,
  exceedance,
  difference,
  argmax,
  argmax_atomless,
  dieker_yakir,
  time_reversed,
  continuous_dy,
  candidate_theta,
  extremal_blocks,
};

std::string_view method_name(Method m);
// Accepts canonical names and the short aliases (albinA, seb, ...).
std::optional<Method> parse_method(std::string_view name);
// Needs W on negative indices; not available for Levy inputs.
bool is_two_sided(Method m);

// The six grid formulas for H^delta that must agree with each other.
inline constexpr Method kAgreementMethods[] = {
    Method::exceedance,   Method::difference,    Method::argmax,
    Method::argmax_atomless, Method::dieker_yakir, Method::time_reversed,
};

enum EstimateFlag : std::uint32_t {
  flag_unstable = 1u,
  flag_low_count = 2u,
  flag_truncation_bias = 4u,
  flag_window = 8u,
};

struct TruncationPolicy {
  std::int64_t initial_horizon = 8;
  double growth = 2.0;
  double stability = 0.1;
  std::int64_t max_horizon = 1 << 16;

  void validate() const;
};

struct RunParams {
  std::int64_t replications = 100000;
  std::uint64_t seed = 1;
  TruncationPolicy policy;
  double horizon_time = 100.0;  // T of the definitional estimator
  double mesh = 0.01;           // eta of the continuous estimator
  double window = 10.0;         // half-width of the continuous window
  int refine = 4;               // numerator refinement when no exact interval maximum exists
};

struct EstimateResult {
  Method method = Method::exceedance;
  double delta = 0.0;
  double estimate = 0.0;
  double std_error = 0.0;
  std::int64_t replications = 0;
  std::int64_t horizon = 0;  // N, or mesh points per side for the continuous estimator
  bool stable = true;
  std::uint64_t seed = 0;
  std::uint32_t flags = 0;
  std::int64_t events = -1;  // indicator hits, where meaningful
  double previous_estimate = 0.0;  // at the previous horizon / half window
};

// All grid estimators on one path per replication (common random numbers).
// Methods must be grid formulas (exceedance .. time_reversed, candidate_theta).
std::vector<EstimateResult> estimate_shared(const Model& model, std::span<const Method> methods,
                                            double delta, const RunParams& params);

// Dispatches any method except extremal_blocks.
EstimateResult estimate(const Model& model, Method method, double delta, const RunParams& params);

EstimateResult est_definitional(const Model& model, double delta, double T, std::int64_t reps,
                                std::uint64_t seed);
EstimateResult est_continuous_dy(const Model& model, double eta, double window, std::int64_t reps,
                                 std::uint64_t seed, int refine = 4);

EstimateResult est_exceedance(const Model& model, double delta, const RunParams& params);
EstimateResult est_difference(const Model& model, double delta, const RunParams& params);
EstimateResult est_argmax(const Model& model, double delta, const RunParams& params);
EstimateResult est_argmax_atomless(const Model& model, double delta, const RunParams& params);
EstimateResult est_dieker_yakir(const Model& model, double delta, const RunParams& params);
EstimateResult est_time_reversed(const Model& model, double delta, const RunParams& params);
// theta = P{max_{1<=i<=m} P X(delta i) <= 1}, P unit Pareto; equals delta * exceedance.
EstimateResult est_candidate_theta(const Model& model, double delta, const RunParams& params);

// Closed form for W = sqrt(2) B_2 - t^2: (Phi(delta/sqrt 2) - Phi(-delta/sqrt 2)) / delta.
double gaussian_alpha2_constant(double delta);

}  // namespace pickands
