#include "models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace pickands {

VarianceFunction VarianceFunction::power(double alpha) {
  auto vf = scaled_power(alpha, 2.0);
  vf.kind_ = VarianceKind::power;
  return vf;
}

VarianceFunction VarianceFunction::scaled_power(double alpha, double scale) {
  require(alpha > 0.0 && alpha <= 2.0, ErrorCode::invalid_argument,
          "alpha must lie in (0, 2]");
  require(scale > 0.0 && std::isfinite(scale), ErrorCode::invalid_argument,
          "scale must be positive");
  VarianceFunction vf;
  vf.kind_ = VarianceKind::scaled_power;
  vf.alpha_ = alpha;
  vf.scale_ = scale;
  return vf;
}

VarianceFunction VarianceFunction::tabulated(std::vector<double> times, std::vector<double> values) {
  require(times.size() == values.size() && times.size() >= 2, ErrorCode::invalid_argument,
          "tabulated variance needs at least two (t, value) pairs");
  require(times.front() == 0.0 && values.front() == 0.0, ErrorCode::invalid_argument,
          "tabulated variance must start at sigma^2(0) = 0");
  for (std::size_t i = 1; i < times.size(); ++i) {
    require(times[i] > times[i - 1], ErrorCode::invalid_argument,
            "tabulated times must be strictly increasing");
  }
  for (double v : values) {
    require(v >= 0.0 && std::isfinite(v), ErrorCode::invalid_argument,
            "tabulated variance values must be finite and nonnegative");
  }
  VarianceFunction vf;
  vf.kind_ = VarianceKind::tabulated;
  vf.alpha_ = 0.0;
  vf.scale_ = 0.0;
  vf.times_ = std::move(times);
  vf.values_ = std::move(values);
  return vf;
}

double VarianceFunction::operator()(double t) const {
  const double a = std::abs(t);
  if (kind_ != VarianceKind::tabulated) {
    if (a == 0.0) return 0.0;
    return scale_ * std::pow(a, alpha_);
  }
  if (a > times_.back()) {
    std::ostringstream msg;
    msg << "tabulated variance queried at |t| = " << a << " beyond table end "
        << times_.back();
    throw Error(ErrorCode::out_of_range, msg.str());
  }
  const auto it = std::upper_bound(times_.begin(), times_.end(), a);
  if (it == times_.end()) return values_.back();
  const auto hi = static_cast<std::size_t>(it - times_.begin());
  const std::size_t lo = hi - 1;
  const double f = (a - times_[lo]) / (times_[hi] - times_[lo]);
  return values_[lo] + f * (values_[hi] - values_[lo]);
}

bool VarianceFunction::independent_increments() const {
  if (kind_ != VarianceKind::tabulated) return alpha_ == 1.0;
  const double slope = values_.back() / times_.back();
  for (std::size_t i = 1; i < times_.size(); ++i) {
    if (std::abs(values_[i] - slope * times_[i]) > 1e-12 * (1.0 + values_[i])) return false;
  }
  return true;
}

double VarianceFunction::max_time() const {
  return kind_ == VarianceKind::tabulated ? times_.back()
                                          : std::numeric_limits<double>::infinity();
}

std::string VarianceFunction::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case VarianceKind::power:
      os << "power(alpha=" << alpha_ << ")";
      break;
    case VarianceKind::scaled_power:
      os << "scaled_power(alpha=" << alpha_ << ",scale=" << scale_ << ")";
      break;
    case VarianceKind::tabulated:
      os << "tabulated(n=" << times_.size() << ",t_max=" << times_.back() << ")";
      break;
  }
  return os.str();
}

double variance_at(const VarianceFunction& vf, double t) { return vf(t); }

double JumpLaw::mgf(double theta) const {
  switch (kind) {
    case JumpKind::none:
      return 1.0;
    case JumpKind::constant:
      return std::exp(theta * a);
    case JumpKind::normal:
      return std::exp(theta * a + 0.5 * theta * theta * b * b);
    case JumpKind::exponential:
      if (theta >= a) {
        throw Error(ErrorCode::domain, "exponential jump mgf is infinite for theta >= rate");
      }
      return a / (a - theta);
  }
  return 1.0;
}

double JumpLaw::sample(Rng& rng) const {
  switch (kind) {
    case JumpKind::none:
      return 0.0;
    case JumpKind::constant:
      return a;
    case JumpKind::normal:
      return a + b * rng.normal();
    case JumpKind::exponential:
      return rng.exponential() / a;
  }
  return 0.0;
}

LevyModel LevyModel::brownian(double diffusion) {
  LevyModel m;
  m.diffusion = diffusion;
  m.validate();
  return m;
}

LevyModel LevyModel::brownian_plus_compound_poisson(double diffusion, double rate, JumpLaw jump) {
  LevyModel m;
  m.diffusion = diffusion;
  m.jump_rate = rate;
  m.jump = jump;
  m.validate();
  return m;
}

void LevyModel::validate() const {
  require(diffusion >= 0.0 && std::isfinite(diffusion), ErrorCode::invalid_argument,
          "diffusion must be nonnegative");
  require(jump_rate >= 0.0 && std::isfinite(jump_rate), ErrorCode::invalid_argument,
          "jump rate must be nonnegative");
  if (jump_rate > 0.0) {
    require(jump.kind != JumpKind::none, ErrorCode::invalid_argument,
            "positive jump rate needs a jump law");
    if (jump.kind == JumpKind::normal) {
      require(jump.b >= 0.0, ErrorCode::invalid_argument, "normal jump sd must be >= 0");
    }
    if (jump.kind == JumpKind::exponential) {
      require(jump.a > 0.0, ErrorCode::invalid_argument, "exponential jump rate must be > 0");
      // Phi(1) < infinity
      require(jump.a > 1.0, ErrorCode::domain, "exponential jump rate must exceed 1 for Phi(1) < inf");
    }
  }
}

double LevyModel::lambda() const {
  return 0.5 * laplace_exponent(*this, 1.0) - laplace_exponent(*this, 0.5);
}

std::string LevyModel::describe() const {
  std::ostringstream os;
  os << "levy(diffusion=" << diffusion << ",rate=" << jump_rate;
  if (jump_rate > 0.0) {
    static const char* names[] = {"none", "constant", "normal", "exponential"};
    os << ",jump=" << names[static_cast<int>(jump.kind)] << "(" << jump.a << "," << jump.b << ")";
  }
  os << ")";
  return os.str();
}

double laplace_exponent(const LevyModel& model, double theta) {
  double phi = 0.5 * model.diffusion * model.diffusion * theta * theta;
  if (model.jump_rate > 0.0) phi += model.jump_rate * (model.jump.mgf(theta) - 1.0);
  return phi;
}

double sample_levy_increment(const LevyModel& model, double dt, Rng& rng) {
  double v = model.diffusion > 0.0 ? model.diffusion * std::sqrt(dt) * rng.normal() : 0.0;
  const double mean_jumps = model.jump_rate * dt;
  if (mean_jumps > 0.0) {
    // Poisson number of jumps from exponential inter-arrival times
    for (double t = rng.exponential(); t < mean_jumps; t += rng.exponential()) {
      v += model.jump.sample(rng);
    }
  }
  return v;
}

std::string describe(const Model& m) {
  return std::visit([](const auto& x) { return x.describe(); }, m);
}

void GridSpec::validate() const {
  require(delta > 0.0 && std::isfinite(delta), ErrorCode::invalid_argument,
          "grid step delta must be positive");
  require(i_min <= 0 && 0 <= i_max, ErrorCode::invalid_argument,
          "grid must contain index 0 (i_min <= 0 <= i_max)");
}

Eigen::MatrixXd gaussian_cov(const VarianceFunction& vf, const std::vector<double>& times) {
  const auto n = static_cast<Eigen::Index>(times.size());
  Eigen::MatrixXd c(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = a; b < n; ++b) {
      const double s = times[static_cast<std::size_t>(a)];
      const double t = times[static_cast<std::size_t>(b)];
      const double v = 0.5 * (vf(s) + vf(t) - vf(s - t));
      c(a, b) = v;
      c(b, a) = v;
    }
  }
  return c;
}

Eigen::MatrixXd gaussian_grid_cov(const VarianceFunction& vf, const GridSpec& grid) {
  grid.validate();
  std::vector<double> times;
  times.reserve(static_cast<std::size_t>(grid.size()));
  for (std::int64_t i = grid.i_min; i <= grid.i_max; ++i) times.push_back(grid.time(i));
  Eigen::MatrixXd c = gaussian_cov(vf, times);
  if (c.rows() > 1) {
    const double trace = c.trace();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c, Eigen::EigenvaluesOnly);
    const double min_eig = es.eigenvalues().minCoeff();
    if (min_eig < -1e-8 * std::max(trace, 1e-300)) {
      std::ostringstream msg;
      msg << "covariance is not positive semidefinite (min eigenvalue " << min_eig
          << "); invalid sigma^2";
      throw Error(ErrorCode::model, msg.str());
    }
  }
  return c;
}

}  // namespace pickands
