#pragma once

#include "models.hpp"
#include "rng.hpp"

#include <Eigen/Dense>

#include <complex>
#include <memory>
#include <span>
#include <vector>

namespace pickands {

// Exact sampler of W on a fixed grid. Gaussian inputs are drawn through the
// stationary increment sequence X_j = B(delta(j+1)) - B(delta j),
// j in [i_min, i_max), then summed outwards from index 0.
class PathSampler {
 public:
  enum class Algorithm {
    linear,     // increments perfectly correlated: B(t) = t * N(0, gamma0) / delta
    white,      // independent increments
    circulant,  // circulant embedding
    cholesky,   // LDLT of the Toeplitz increment covariance
    levy,       // i.i.d. Levy increments, one-sided
  };

  struct Workspace {
    std::vector<double> increments;
    std::vector<std::complex<double>> spectrum;
    std::vector<double> normals;
  };

  PathSampler(const Model& model, GridSpec grid, bool force_cholesky = false);

  const GridSpec& grid() const { return grid_; }
  Algorithm algorithm() const { return algorithm_; }
  std::size_t size() const { return static_cast<std::size_t>(grid_.size()); }
  // Variance of one increment, gamma(0).
  double increment_variance() const { return gamma0_; }

  Workspace workspace() const;
  // Fills w (length grid().size()) with W(delta * i), i = i_min..i_max.
  void sample(Rng& rng, Workspace& ws, std::span<double> w) const;
  PathSample sample(Rng& rng) const;

 private:
  void sample_increments(Rng& rng, Workspace& ws) const;

  Model model_;
  GridSpec grid_;
  Algorithm algorithm_ = Algorithm::white;
  std::size_t n_inc_ = 0;
  double gamma0_ = 0.0;
  std::vector<double> drift_;  // sigma^2(delta i)/2 or Phi(1) delta i

  // circulant
  std::size_t m_ = 0;
  std::vector<double> sqrt_eig_;
  std::shared_ptr<void> plan_;

  // cholesky
  Eigen::MatrixXd factor_;
};

PathSample sample_gaussian_path(const VarianceFunction& vf, const GridSpec& grid, Rng& rng);
PathSample sample_levy_path(const LevyModel& model, const GridSpec& grid, Rng& rng);

// Autocovariance of the increment sequence at lag k.
double increment_autocov(const VarianceFunction& vf, double delta, std::int64_t k);

}  // namespace pickands
