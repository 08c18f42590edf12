#pragma once

#include <pickands/pickands.h>

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace pkcli {

struct RunConfig {
  std::string command;

  // model
  std::string family = "fbm";  // fbm | gaussian | levy
  double alpha = 2.0;
  double scale = 2.0;       // gaussian family: sigma^2(t) = scale |t|^alpha
  std::string table;        // gaussian family: file of "t sigma2" rows instead of alpha/scale
  bool brownian = false;    // levy family: standard Brownian input
  double phi_sigma = 1.0;
  double phi_rate = 0.0;
  std::string phi_jump = "none";  // none | constant | normal | exponential
  double phi_jump_a = 0.0;
  double phi_jump_b = 0.0;

  // estimation
  double delta = 1.0;
  double mesh = 0.01;
  double window = 10.0;
  int refine = 4;
  std::string method = "exceedance";
  std::int64_t reps = 100000;
  std::uint64_t seed = 1;
  double horizon = 100.0;  // T for the definitional estimator, t_max for the ln8 check
  std::int64_t initial_horizon = 8;
  std::int64_t max_horizon = 1 << 16;
  double growth = 2.0;
  double stability = 0.1;

  // bounds
  double power_c = 0.0;  // > 0 adds the power-law bound with sigma >= C t^{kappa/2}
  double power_kappa = 1.0;

  // maxstable
  std::string check = "fdd";  // fdd | marginal | blocks | candidate | tail | sample
  std::vector<double> times;
  std::vector<double> thresholds;
  std::int64_t n = 10000;
  std::int64_t block = 0;  // 0: floor(sqrt(n))
  std::int64_t point = 0;
  std::int64_t i_min = 0;
  std::int64_t i_max = 10;
  std::int64_t atom_cap = 1 << 20;
  std::int64_t oracle_reps = 0;  // 0: same as reps
  double threshold = 100.0;

  // smallball
  std::vector<double> etas;
  std::int64_t cutoff = 16;
  std::int64_t max_cutoff = 0;

  // output (not part of the hash)
  std::string out;
  std::string format = "json";
  int threads = 0;
};

// key=value lines describing the run, sorted by key; output settings excluded.
std::string canonical(const RunConfig& c);
std::uint64_t fnv1a(const std::string& s);
std::string config_hash(const RunConfig& c);

struct ModelDeleter {
  void operator()(pk_model* m) const { pk_model_destroy(m); }
};
using ModelPtr = std::unique_ptr<pk_model, ModelDeleter>;

// Status-carrying failure from the C API.
struct ApiError {
  pk_status status;
  std::string message;
};

void check(pk_status s);
ModelPtr make_model(const RunConfig& c);
pk_run_params run_params(const RunConfig& c);
std::vector<pk_method> parse_methods(const std::string& list);

}  // namespace pkcli
