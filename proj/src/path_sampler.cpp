#include "path_sampler.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <mutex>
#include <sstream>

namespace pickands {

namespace {

// FFTW planning is not thread safe; execution is.
std::mutex& fftw_mutex() {
  static std::mutex m;
  return m;
}

std::vector<double> circulant_eigenvalues(const std::vector<double>& c) {
  const int m = static_cast<int>(c.size());
  std::vector<double> in(c);
  std::vector<std::complex<double>> out(c.size() / 2 + 1);
  {
    std::lock_guard lock(fftw_mutex());
    fftw_plan p = fftw_plan_dft_r2c_1d(m, in.data(), reinterpret_cast<fftw_complex*>(out.data()),
                                       FFTW_ESTIMATE);
    fftw_execute(p);
    fftw_destroy_plan(p);
  }
  std::vector<double> lambda(c.size());
  for (std::size_t j = 0; j < out.size(); ++j) {
    lambda[j] = out[j].real();
    if (j > 0) lambda[c.size() - j] = out[j].real();
  }
  return lambda;
}

}  // namespace

double increment_autocov(const VarianceFunction& vf, double delta, std::int64_t k) {
  const double kk = static_cast<double>(std::abs(k));
  return 0.5 * (vf((kk + 1.0) * delta) - 2.0 * vf(kk * delta) + vf(std::abs(kk - 1.0) * delta));
}

PathSampler::PathSampler(const Model& model, GridSpec grid, bool force_cholesky)
    : model_(model), grid_(grid) {
  grid_.validate();
  n_inc_ = static_cast<std::size_t>(grid_.i_max - grid_.i_min);
  drift_.resize(size());

  if (const auto* levy = std::get_if<LevyModel>(&model_)) {
    levy->validate();
    require(grid_.i_min == 0, ErrorCode::unsupported,
            "Levy-based W is defined for t >= 0 only; negative grid indices are unsupported");
    algorithm_ = Algorithm::levy;
    const double phi1 = laplace_exponent(*levy, 1.0);
    for (std::size_t p = 0; p < size(); ++p) {
      drift_[p] = phi1 * grid_.delta * static_cast<double>(p);
    }
    return;
  }

  const auto& vf = std::get<VarianceFunction>(model_);
  for (std::int64_t i = grid_.i_min; i <= grid_.i_max; ++i) {
    drift_[static_cast<std::size_t>(i - grid_.i_min)] = 0.5 * vf(grid_.time(i));
  }
  if (n_inc_ == 0) {
    algorithm_ = Algorithm::white;
    return;
  }

  std::vector<double> gamma(n_inc_);
  for (std::size_t k = 0; k < n_inc_; ++k) {
    gamma[k] = increment_autocov(vf, grid_.delta, static_cast<std::int64_t>(k));
  }
  gamma0_ = gamma[0];
  require(gamma0_ >= 0.0, ErrorCode::model, "increment variance sigma^2(delta) must be nonnegative");
  if (gamma0_ == 0.0) {
    // W = 0 on the grid; any other covariance would be indefinite
    for (double g : gamma) {
      require(g == 0.0, ErrorCode::model, "zero increment variance with nonzero covariances");
    }
    algorithm_ = Algorithm::white;
    return;
  }

  if (!force_cholesky) {
    bool white = true;
    bool linear = true;
    for (std::size_t k = 1; k < n_inc_; ++k) {
      if (std::abs(gamma[k]) > 1e-14 * gamma0_) white = false;
      if (std::abs(gamma[k] - gamma0_) > 1e-12 * gamma0_) linear = false;
    }
    if (n_inc_ == 1 || white) {
      algorithm_ = Algorithm::white;
      return;
    }
    if (linear) {
      algorithm_ = Algorithm::linear;
      return;
    }

    m_ = std::bit_ceil(2 * n_inc_);
    if (grid_.delta * static_cast<double>(m_ / 2 + 1) > vf.max_time()) m_ = 0;
  }
  if (m_ > 0) {
    std::vector<double> c(m_, 0.0);
    for (std::size_t j = 0; j < m_; ++j) {
      const std::size_t lag = std::min(j, m_ - j);
      c[j] = lag < n_inc_ ? gamma[lag]
                          : increment_autocov(vf, grid_.delta, static_cast<std::int64_t>(lag));
    }
    const auto lambda = circulant_eigenvalues(c);
    const double max_eig = *std::max_element(lambda.begin(), lambda.end());
    const double min_eig = *std::min_element(lambda.begin(), lambda.end());
    if (min_eig >= -1e-8 * max_eig) {
      algorithm_ = Algorithm::circulant;
      sqrt_eig_.resize(m_ / 2 + 1);
      for (std::size_t j = 0; j <= m_ / 2; ++j) sqrt_eig_[j] = std::sqrt(std::max(lambda[j], 0.0));
      std::vector<std::complex<double>> in(m_ / 2 + 1);
      std::vector<double> out(m_);
      std::lock_guard lock(fftw_mutex());
      fftw_plan p = fftw_plan_dft_c2r_1d(static_cast<int>(m_),
                                         reinterpret_cast<fftw_complex*>(in.data()), out.data(),
                                         FFTW_ESTIMATE | FFTW_UNALIGNED);
      plan_ = std::shared_ptr<void>(p, [](void* q) {
        std::lock_guard l(fftw_mutex());
        fftw_destroy_plan(static_cast<fftw_plan>(q));
      });
      return;
    }
    m_ = 0;
  }

  algorithm_ = Algorithm::cholesky;
  const auto n = static_cast<Eigen::Index>(n_inc_);
  Eigen::MatrixXd cov(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) cov(a, b) = gamma[static_cast<std::size_t>(std::abs(a - b))];
  }
  Eigen::LDLT<Eigen::MatrixXd> ldlt(cov);
  const double tol = 1e-8 * cov.trace();
  if (ldlt.info() != Eigen::Success || ldlt.vectorD().minCoeff() < -tol) {
    std::ostringstream msg;
    msg << "increment covariance of " << vf.describe()
        << " is not positive semidefinite on this grid";
    throw Error(ErrorCode::model, msg.str());
  }
  const Eigen::VectorXd d = ldlt.vectorD().cwiseMax(0.0).cwiseSqrt();
  Eigen::MatrixXd l = ldlt.matrixL();
  l = l * d.asDiagonal();
  // cov = P^T L D L^T P
  factor_ = ldlt.transpositionsP().transpose() * l;
}

PathSampler::Workspace PathSampler::workspace() const {
  Workspace ws;
  ws.increments.resize(std::max<std::size_t>(n_inc_, m_));
  if (algorithm_ == Algorithm::circulant) ws.spectrum.resize(m_ / 2 + 1);
  if (algorithm_ == Algorithm::cholesky) ws.normals.resize(n_inc_);
  return ws;
}

void PathSampler::sample_increments(Rng& rng, Workspace& ws) const {
  auto& x = ws.increments;
  switch (algorithm_) {
    case Algorithm::white: {
      const double sd = std::sqrt(gamma0_);
      for (std::size_t j = 0; j < n_inc_; ++j) x[j] = sd * rng.normal();
      break;
    }
    case Algorithm::linear: {
      const double v = std::sqrt(gamma0_) * rng.normal();
      std::fill_n(x.begin(), n_inc_, v);
      break;
    }
    case Algorithm::circulant: {
      auto& w = ws.spectrum;
      const std::size_t half = m_ / 2;
      const double inv_sqrt2 = std::sqrt(0.5);
      w[0] = {sqrt_eig_[0] * rng.normal(), 0.0};
      for (std::size_t j = 1; j < half; ++j) {
        const double s = sqrt_eig_[j] * inv_sqrt2;
        const double re = rng.normal();
        const double im = rng.normal();
        w[j] = {s * re, s * im};
      }
      w[half] = {sqrt_eig_[half] * rng.normal(), 0.0};
      fftw_execute_dft_c2r(static_cast<fftw_plan>(plan_.get()),
                           reinterpret_cast<fftw_complex*>(w.data()), x.data());
      const double scale = 1.0 / std::sqrt(static_cast<double>(m_));
      for (std::size_t j = 0; j < n_inc_; ++j) x[j] *= scale;
      break;
    }
    case Algorithm::cholesky: {
      auto& z = ws.normals;
      for (auto& v : z) v = rng.normal();
      Eigen::Map<const Eigen::VectorXd> zv(z.data(), static_cast<Eigen::Index>(n_inc_));
      Eigen::Map<Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(n_inc_));
      xv.noalias() = factor_ * zv;
      break;
    }
    case Algorithm::levy: {
      const auto& levy = std::get<LevyModel>(model_);
      for (std::size_t j = 0; j < n_inc_; ++j) x[j] = sample_levy_increment(levy, grid_.delta, rng);
      break;
    }
  }
}

void PathSampler::sample(Rng& rng, Workspace& ws, std::span<double> w) const {
  require(w.size() == size(), ErrorCode::invalid_argument, "output length does not match grid");
  sample_increments(rng, ws);
  const auto& x = ws.increments;
  const std::size_t zero = static_cast<std::size_t>(-grid_.i_min);
  w[zero] = 0.0;
  double b = 0.0;
  for (std::size_t p = zero + 1; p < w.size(); ++p) {
    b += x[p - 1];
    w[p] = b;
  }
  b = 0.0;
  for (std::size_t p = zero; p-- > 0;) {
    b -= x[p];
    w[p] = b;
  }
  for (std::size_t p = 0; p < w.size(); ++p) w[p] -= drift_[p];
  w[zero] = 0.0;
}

PathSample PathSampler::sample(Rng& rng) const {
  PathSample s;
  s.grid = grid_;
  s.w.resize(size());
  auto ws = workspace();
  sample(rng, ws, s.w);
  return s;
}

PathSample sample_gaussian_path(const VarianceFunction& vf, const GridSpec& grid, Rng& rng) {
  return PathSampler(Model(vf), grid).sample(rng);
}

PathSample sample_levy_path(const LevyModel& model, const GridSpec& grid, Rng& rng) {
  return PathSampler(Model(model), grid).sample(rng);
}

}  // namespace pickands
