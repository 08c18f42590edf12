#include "smallball.hpp"

#include "error.hpp"
#include "numeric.hpp"
#include "parallel.hpp"
#include "rng.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

namespace pickands {

namespace {

constexpr std::uint64_t kSaltSmallBall = 0x736d6c62;
constexpr double kStability = 0.1;

struct Counts {
  // [0]: cutoff K, [1]: cutoff K/2
  std::int64_t pos[2] = {0, 0};
  std::int64_t neg[2] = {0, 0};
  std::int64_t both[2] = {0, 0};

  void merge(const Counts& o) {
    for (int l = 0; l < 2; ++l) {
      pos[l] += o.pos[l];
      neg[l] += o.neg[l];
      both[l] += o.both[l];
    }
  }
};

// Index of the first k in 1..K (walking from t = 1 towards 0) with
// B(1/k) > eta, or K + 1. Brownian values are filled backwards in time with
// the bridge law B(s) | B(t) ~ N(s/t B(t), s (t - s) / t).
std::int64_t brownian_first_violation(Rng& rng, double eta, std::int64_t K) {
  double t = 1.0;
  double b = rng.normal();
  if (b > eta) return 1;
  for (std::int64_t k = 2; k <= K; ++k) {
    const double s = 1.0 / static_cast<double>(k);
    b = (s / t) * b + std::sqrt(s * (t - s) / t) * rng.normal();
    t = s;
    if (b > eta) return k;
  }
  return K + 1;
}

// Lower Cholesky factor of the fBm covariance at 1, -1, 1/2, -1/2, ..., with
// diagonal jitter of at most 1e-12 * trace when the plain factorization fails.
Eigen::MatrixXd reciprocal_factor(double alpha, std::int64_t K) {
  const auto n = static_cast<Eigen::Index>(2 * K);
  std::vector<double> t(static_cast<std::size_t>(n));
  for (std::int64_t k = 1; k <= K; ++k) {
    t[static_cast<std::size_t>(2 * (k - 1))] = 1.0 / static_cast<double>(k);
    t[static_cast<std::size_t>(2 * (k - 1) + 1)] = -1.0 / static_cast<double>(k);
  }
  Eigen::MatrixXd c(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      const double s = t[static_cast<std::size_t>(a)];
      const double u = t[static_cast<std::size_t>(b)];
      c(a, b) = 0.5 * (std::pow(std::abs(s), alpha) + std::pow(std::abs(u), alpha) -
                       std::pow(std::abs(s - u), alpha));
    }
  }
  const double trace = c.trace();
  for (double jitter : {0.0, 1e-15, 1e-14, 1e-13, 1e-12}) {
    Eigen::MatrixXd cj = c;
    cj.diagonal().array() += jitter * trace;
    Eigen::LLT<Eigen::MatrixXd> llt(cj);
    if (llt.info() == Eigen::Success) return llt.matrixL();
  }
  throw Error(ErrorCode::model, "reciprocal-grid covariance is not positive definite");
}

Counts run_brownian(double eta, std::int64_t K, std::int64_t reps, std::uint64_t seed) {
  const std::int64_t half = std::max<std::int64_t>(1, K / 2);
  auto blocks = map_blocks<Counts>(reps, [&](std::int64_t begin, std::int64_t end) {
    Counts c;
    for (std::int64_t r = begin; r < end; ++r) {
      Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(r), kSaltSmallBall);
      const std::int64_t vp = brownian_first_violation(rng, eta, K);
      const std::int64_t vn = brownian_first_violation(rng, eta, K);
      const std::int64_t level[2] = {K, half};
      for (int l = 0; l < 2; ++l) {
        const bool p = vp > level[l];
        const bool n = vn > level[l];
        c.pos[l] += p;
        c.neg[l] += n;
        c.both[l] += p && n;
      }
    }
    return c;
  });
  Counts total;
  for (const auto& b : blocks) total.merge(b);
  return total;
}

Counts run_general(double alpha, double eta, std::int64_t K, std::int64_t reps,
                   std::uint64_t seed) {
  const Eigen::MatrixXd l = reciprocal_factor(alpha, K);
  const std::int64_t half = std::max<std::int64_t>(1, K / 2);
  const auto n = l.rows();
  auto blocks = map_blocks<Counts>(reps, [&](std::int64_t begin, std::int64_t end) {
    Counts c;
    std::vector<double> z(static_cast<std::size_t>(n));
    for (std::int64_t r = begin; r < end; ++r) {
      Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(r), kSaltSmallBall);
      // Rows in order 1, -1, 1/2, -1/2, ...; stop at the first violation.
      Eigen::Index first = n;
      for (Eigen::Index a = 0; a < n; ++a) {
        z[static_cast<std::size_t>(a)] = rng.normal();
        double x = 0.0;
        for (Eigen::Index b = 0; b <= a; ++b) x += l(a, b) * z[static_cast<std::size_t>(b)];
        if (x > eta) {
          first = a;
          break;
        }
      }
      // Row a belongs to cutoff a / 2 + 1.
      const std::int64_t level[2] = {K, half};
      for (int lv = 0; lv < 2; ++lv) {
        const bool ok = first >= 2 * level[lv];
        c.both[lv] += ok;
        c.pos[lv] += ok;
        c.neg[lv] += ok;
      }
    }
    return c;
  });
  Counts total;
  for (const auto& b : blocks) total.merge(b);
  return total;
}

struct Estimate {
  double p = 0.0;
  double se = 0.0;
};

Estimate proportion(std::int64_t hits, std::int64_t n) {
  const double p = static_cast<double>(hits) / static_cast<double>(n);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(n))};
}

}  // namespace

SmallBallRow est_smallball_prob(double alpha, double eta, std::int64_t cutoff, std::int64_t reps,
                                std::uint64_t seed, std::int64_t max_cutoff) {
  require(alpha > 0.0 && alpha <= 2.0, ErrorCode::invalid_argument, "alpha must lie in (0, 2]");
  require(eta > 0.0 && std::isfinite(eta), ErrorCode::invalid_argument, "eta must be > 0");
  require(cutoff >= 1, ErrorCode::invalid_argument, "cutoff K must be >= 1");
  require(reps >= 2, ErrorCode::insufficient_data, "at least 2 replications are needed");
  const bool brownian = alpha == 1.0;
  if (max_cutoff <= 0) max_cutoff = brownian ? (1 << 22) : 1024;
  max_cutoff = std::max(max_cutoff, cutoff);

  SmallBallRow row;
  row.eta = eta;
  row.replications = reps;
  row.factorized = brownian;
  std::int64_t K = cutoff;
  for (;;) {
    const Counts c = brownian ? run_brownian(eta, K, reps, seed)
                              : run_general(alpha, eta, K, reps, seed);
    Estimate est[2];
    Estimate direct[2];
    for (int l = 0; l < 2; ++l) {
      direct[l] = proportion(c.both[l], reps);
      if (brownian) {
        const auto qp = proportion(c.pos[l], reps);
        const auto qn = proportion(c.neg[l], reps);
        est[l] = {qp.p * qn.p, std::hypot(qn.p * qp.se, qp.p * qn.se)};
      } else {
        est[l] = direct[l];
      }
    }
    row.cutoff = K;
    row.probability = est[0].p;
    row.std_error = est[0].se;
    row.direct = direct[0].p;
    row.direct_se = direct[0].se;
    row.stable = std::abs(est[0].p - est[1].p) <= kStability * est[0].se;
    if (row.stable || K >= max_cutoff) break;
    K = std::min(max_cutoff, 2 * K);
  }
  const double scale = std::pow(eta, -2.0 / alpha);
  row.scaled = scale * row.probability;
  row.scaled_se = scale * row.std_error;
  return row;
}

Extrapolation smallball_extrapolate(std::span<const SmallBallRow> rows) {
  require(rows.size() >= 3, ErrorCode::insufficient_data,
          "extrapolation needs at least 3 values of eta");
  std::vector<SmallBallRow> r(rows.begin(), rows.end());
  std::sort(r.begin(), r.end(), [](const auto& a, const auto& b) { return a.eta > b.eta; });
  for (std::size_t i = 0; i < r.size(); ++i) {
    require(r[i].eta > 0.0, ErrorCode::invalid_argument, "eta must be > 0");
    if (i > 0) require(r[i].eta < r[i - 1].eta, ErrorCode::invalid_argument, "eta values must be distinct");
  }
  const bool weighted =
      std::all_of(r.begin(), r.end(), [](const auto& x) { return x.scaled_se > 0.0; });

  const auto n = static_cast<Eigen::Index>(r.size());
  Eigen::MatrixXd x(n, 2);
  Eigen::VectorXd y(n);
  Eigen::VectorXd w(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = r[static_cast<std::size_t>(i)];
    x(i, 0) = 1.0;
    x(i, 1) = row.eta;
    y[i] = row.scaled;
    w[i] = weighted ? 1.0 / (row.scaled_se * row.scaled_se) : 1.0;
  }
  const Eigen::MatrixXd xtw = x.transpose() * w.asDiagonal();
  const Eigen::Matrix2d info = xtw * x;
  const Eigen::Vector2d beta = info.ldlt().solve(xtw * y);
  const Eigen::Matrix2d cov = info.inverse();

  Extrapolation out;
  out.intercept = beta[0];
  out.slope = beta[1];
  out.std_error = weighted ? std::sqrt(std::max(0.0, cov(0, 0))) : 0.0;

  // Significant moves in both directions along decreasing eta.
  bool up = false;
  bool down = false;
  for (std::size_t i = 1; i < r.size(); ++i) {
    const double d = r[i].scaled - r[i - 1].scaled;
    const double tol = 2.0 * std::hypot(r[i].scaled_se, r[i - 1].scaled_se);
    if (d > tol) up = true;
    if (d < -tol) down = true;
  }
  out.fit_warning = up && down;
  return out;
}

}  // namespace pickands
