#pragma once

#include "error.hpp"
#include "rng.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace pickands {

enum class VarianceKind { power, scaled_power, tabulated };

// Variance function sigma^2 of a centered Gaussian input B with stationary
// increments. power(alpha) is the classical family W = sqrt(2) B_alpha - |t|^alpha,
// i.e. sigma^2(t) = 2|t|^alpha.
class VarianceFunction {
 public:
  static VarianceFunction power(double alpha);
  static VarianceFunction scaled_power(double alpha, double scale);
  // Piecewise-linear table on t >= 0; times strictly increasing from 0 and
  // values[0] == 0. Evaluated symmetrically in t.
  static VarianceFunction tabulated(std::vector<double> times, std::vector<double> values);

  VarianceKind kind() const { return kind_; }
  double alpha() const { return alpha_; }
  double scale() const { return scale_; }
  const std::vector<double>& table_times() const { return times_; }
  const std::vector<double>& table_values() const { return values_; }

  double operator()(double t) const;

  // sigma^2 linear in |t|: B is a (scaled) Brownian motion.
  bool independent_increments() const;
  // Largest |t| at which the function is defined (infinity for parametric kinds).
  double max_time() const;

  std::string describe() const;

 private:
  VarianceKind kind_ = VarianceKind::power;
  double alpha_ = 1.0;
  double scale_ = 2.0;
  std::vector<double> times_;
  std::vector<double> values_;
};

double variance_at(const VarianceFunction& vf, double t);

enum class JumpKind { none, constant, normal, exponential };

struct JumpLaw {
  JumpKind kind = JumpKind::none;
  double a = 0.0;  // constant value / normal mean / exponential rate
  double b = 0.0;  // normal standard deviation

  // E e^{theta J}; throws Error(domain) where infinite.
  double mgf(double theta) const;
  double sample(Rng& rng) const;
};

// Levy input B(t) = diffusion * BM(t) + compound Poisson(jump_rate, jump).
struct LevyModel {
  double diffusion = 1.0;
  double jump_rate = 0.0;
  JumpLaw jump;

  static LevyModel brownian(double diffusion = 1.0);
  static LevyModel brownian_plus_compound_poisson(double diffusion, double rate, JumpLaw jump);

  void validate() const;
  // lambda = Phi(1)/2 - Phi(1/2)
  double lambda() const;
  std::string describe() const;
};

// Phi(theta) = ln E e^{theta B(1)}
double laplace_exponent(const LevyModel& model, double theta);

// One draw of B(t + dt) - B(t), without the drift correction.
double sample_levy_increment(const LevyModel& model, double dt, Rng& rng);

using Model = std::variant<VarianceFunction, LevyModel>;

inline bool is_gaussian(const Model& m) { return std::holds_alternative<VarianceFunction>(m); }
std::string describe(const Model& m);

struct GridSpec {
  double delta = 1.0;
  std::int64_t i_min = 0;
  std::int64_t i_max = 0;

  std::int64_t size() const { return i_max - i_min + 1; }
  double time(std::int64_t i) const { return delta * static_cast<double>(i); }
  void validate() const;
};

struct PathSample {
  GridSpec grid;
  std::vector<double> w;  // W(delta*i) at position i - grid.i_min

  double at(std::int64_t i) const { return w[static_cast<std::size_t>(i - grid.i_min)]; }
};

// Cov(B(delta i), B(delta j)) over the grid. Throws Error(model) when the
// matrix has an eigenvalue below -1e-8 * trace.
Eigen::MatrixXd gaussian_grid_cov(const VarianceFunction& vf, const GridSpec& grid);

// Covariance of B at arbitrary times.
Eigen::MatrixXd gaussian_cov(const VarianceFunction& vf, const std::vector<double>& times);

}  // namespace pickands
