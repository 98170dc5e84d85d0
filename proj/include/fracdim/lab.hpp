#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fracdim/common.hpp"
#include "fracdim/estimators.hpp"
#include "fracdim/linalg.hpp"

namespace fracdim {

namespace rng {

// splitmix64; the per-trial stream is seeded from (seed, trial) so results do
// not depend on scheduling or trial order.
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t s) : state(s) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  double uniform() {  // (0,1)
    return (double(next() >> 11) + 0.5) * 0x1.0p-53;
  }

  double gaussian() {  // Box-Muller, one value per pair of uniforms
    const double u = uniform(), v = uniform();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * kPi * v);
  }
};

inline SplitMix64 trial_stream(std::uint64_t seed, std::uint64_t trial) {
  SplitMix64 mix(seed ^ (0x632be59bd9b4e019ull * (trial + 1)));
  mix.next();
  return mix;
}

}  // namespace rng

/// Error generator for the synthetic regressions: iid, a window-w moving
/// average (Bartlett covariance, finite dependence range), or an explicit
/// SPD covariance applied through its Cholesky factor.
struct ErrorModel {
  enum class Kind { Iid, MovingAverage, ExplicitCovariance };
  Kind kind = Kind::Iid;
  double sigma = 1.0;
  int window = 5;
  Matrix Q;  // ExplicitCovariance only, sized to the stacked error vector
  std::uint64_t seed = 1;

  static ErrorModel iid(double sigma, std::uint64_t seed) {
    ErrorModel m;
    m.kind = Kind::Iid;
    m.sigma = sigma;
    m.seed = seed;
    return m;
  }
  static ErrorModel moving_average(double sigma, int window, std::uint64_t seed) {
    if (window < 1) throw DataError("ErrorModel: window must be >= 1");
    ErrorModel m;
    m.kind = Kind::MovingAverage;
    m.sigma = sigma;
    m.window = window;
    m.seed = seed;
    return m;
  }
  static ErrorModel explicit_covariance(Matrix q, std::uint64_t seed) {
    ErrorModel m;
    m.kind = Kind::ExplicitCovariance;
    m.Q = std::move(q);
    m.seed = seed;
    return m;
  }
};

/// x_j generators for the consistency experiments.
struct LabSchedule {
  std::function<double(int)> x_of;  // j = 1..n
  std::string label;

  static LabSchedule power(double c, double delta) {
    return {[c, delta](int j) { return c * std::pow(double(j), delta); },
            "power"};
  }
  static LabSchedule arithmetic(double a0, double a) {
    return {[a0, a](int j) { return a0 + a * double(j); }, "arithmetic"};
  }
};

struct TrialRow {
  int n = 0;
  double rmse_s = 0.0;
  std::array<double, 3> rmse_beta{};
  double exceed_freq = 0.0;  // P(|beta_hat - beta|_2 > eps), full vector incl. s
  double bound = 0.0;        // Chebyshev-type right side with the known nu*
};

struct TrialReport {
  std::vector<TrialRow> rows;
  double epsilon = 0.0;
  bool exceedance_monotone = true;  // nonincreasing in n
};

namespace detail {

inline Matrix bartlett_covariance(int n, double sigma, int window) {
  Matrix q(static_cast<size_t>(n), static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const int lag = std::abs(i - j);
      q(size_t(i), size_t(j)) =
          lag < window ? sigma * sigma * (1.0 - double(lag) / double(window)) : 0.0;
    }
  return q;
}

// stacked error vector, one block of n per curvature index
inline void generate_errors(const ErrorModel& model, int n, int blocks, rng::SplitMix64& g,
                            const Matrix* chol_factor, std::vector<double>& out) {
  const size_t total = size_t(n) * size_t(blocks);
  out.resize(total);
  if (model.kind == ErrorModel::Kind::Iid) {
    for (auto& v : out) v = model.sigma * g.gaussian();
    return;
  }
  std::vector<double> z(total);
  for (auto& v : z) v = g.gaussian();
  if (model.kind == ErrorModel::Kind::MovingAverage) {
    // per-block MA stream through the banded Cholesky factor of the full Q
    for (int b = 0; b < blocks; ++b) {
      for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int k = std::max(0, i - model.window + 1); k <= i; ++k)
          s += (*chol_factor)(size_t(i), size_t(k)) * z[size_t(b) * n + size_t(k)];
        out[size_t(b) * n + size_t(i)] = s;
      }
    }
  } else {
    for (size_t i = 0; i < total; ++i) {
      double s = 0.0;
      for (size_t k = 0; k <= i; ++k) s += (*chol_factor)(i, k) * z[k];
      out[i] = s;
    }
  }
}

inline double nu_star_of(const ErrorModel& model, int n, const Matrix* q_full) {
  switch (model.kind) {
    case ErrorModel::Kind::Iid:
      return model.sigma * model.sigma;
    case ErrorModel::Kind::MovingAverage: {
      const Matrix q = bartlett_covariance(n, model.sigma, model.window);
      return max_eigenvalue(q);
    }
    case ErrorModel::Kind::ExplicitCovariance:
      return max_eigenvalue(*q_full);
  }
  return 0.0;
}

}  // namespace detail

/// Monte Carlo over y = X beta + delta with the pooled three-index design;
/// reports per-n RMSEs of s_hat and beta_hat plus the exceedance frequency
/// P(|beta_hat - beta|_2 > eps) against the known-nu* bound.
inline TrialReport simulate_lre(const std::array<double, 3>& beta_true, double s_true,
                                const LabSchedule& schedule, const ErrorModel& error,
                                const std::vector<int>& n_values, int trials,
                                double epsilon = 0.05) {
  if (trials < 1) throw DataError("simulate_lre: trials must be positive");
  TrialReport report;
  report.epsilon = epsilon;
  for (int n : n_values) {
    if (n < 2) throw DataError("simulate_lre: n must be >= 2");
    std::vector<double> x(static_cast<size_t>(n));
    for (int j = 1; j <= n; ++j) x[size_t(j) - 1] = schedule.x_of(j);

    RegressionData data;
    data.x = x;
    data.J = {0, 1, 2};
    for (int k = 0; k < 3; ++k) {
      data.keep[size_t(k)].assign(size_t(n), 1);
      data.y[size_t(k)].assign(size_t(n), 0.0);
      data.sigma[size_t(k)] = 1;
    }

    Matrix chol_factor;
    const Matrix* lp = nullptr;
    if (error.kind == ErrorModel::Kind::MovingAverage) {
      chol_factor = cholesky(detail::bartlett_covariance(n, error.sigma, error.window));
      lp = &chol_factor;
    } else if (error.kind == ErrorModel::Kind::ExplicitCovariance) {
      if (error.Q.rows != 3 * size_t(n))
        throw DataError("simulate_lre: explicit covariance size must be 3n");
      chol_factor = cholesky(error.Q);
      lp = &chol_factor;
    }

    double se_s = 0.0;
    std::array<double, 3> se_beta{};
    std::int64_t exceed = 0;
    std::vector<double> delta;
    for (int trial = 0; trial < trials; ++trial) {
      auto g = rng::trial_stream(error.seed, std::uint64_t(trial));
      detail::generate_errors(error, n, 3, g, lp, delta);
      for (int k = 0; k < 3; ++k)
        for (int j = 0; j < n; ++j)
          data.y[size_t(k)][size_t(j)] =
              beta_true[size_t(k)] + s_true * x[size_t(j)] + delta[size_t(k) * n + size_t(j)];
      const LreResult fit = lre_fit(data);
      const double ds = fit.s_hat - s_true;
      se_s += ds * ds;
      double norm2 = ds * ds;
      for (int k = 0; k < 3; ++k) {
        const double db = fit.beta[size_t(k)] - beta_true[size_t(k)];
        se_beta[size_t(k)] += db * db;
        norm2 += db * db;
      }
      if (std::sqrt(norm2) > epsilon) ++exceed;
    }

    TrialRow row;
    row.n = n;
    row.rmse_s = std::sqrt(se_s / trials);
    for (int k = 0; k < 3; ++k) row.rmse_beta[size_t(k)] = std::sqrt(se_beta[size_t(k)] / trials);
    row.exceed_freq = double(exceed) / double(trials);
    const double nu_star = detail::nu_star_of(
        error, n, error.kind == ErrorModel::Kind::ExplicitCovariance ? &error.Q : nullptr);
    row.bound = design_eigen_diagnostics(x, nu_star, epsilon).bound;
    report.rows.push_back(row);
  }
  for (size_t i = 1; i < report.rows.size(); ++i)
    if (report.rows[i].exceed_freq > report.rows[i - 1].exceed_freq + 1e-12)
      report.exceedance_monotone = false;
  return report;
}

/// Empirical law of the standardized statistic t^T(beta_hat - beta) /
/// (sigma sqrt(t^T (X^T X)^{-1} t)) under iid errors; deciles are compared
/// against the standard normal ones, with a Kolmogorov-Smirnov distance as
/// the summary statistic.
struct NormalityReport {
  std::array<double, 9> deciles{};         // empirical 10%,...,90%
  std::array<double, 9> normal_deciles{};  // Phi^{-1}(k/10)
  double max_decile_error = 0.0;
  double ks_statistic = 0.0;
  int trials = 0;
};

namespace detail {

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

inline double normal_quantile(double p) {
  double lo = -10, hi = 10;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (normal_cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

enum class Innovations { Gaussian, StudentT3 };

/// The normality statement assumes unit-variance iid innovations; the t3 option
/// (rescaled to unit variance) is an exploratory diagnostic for mild
/// heavy-tail violations, not a gated configuration.
inline NormalityReport simulate_normality(const std::array<double, 3>& beta_true, double s_true,
                                          const LabSchedule& schedule, double sigma, int n,
                                          int trials, const std::array<double, 4>& t_vector,
                                          std::uint64_t seed = 1,
                                          Innovations innovations = Innovations::Gaussian) {
  if (n < 2 || trials < 10) throw DataError("simulate_normality: bad n or trials");
  std::vector<double> x(static_cast<size_t>(n));
  for (int j = 1; j <= n; ++j) x[size_t(j) - 1] = schedule.x_of(j);

  // X^T X for the pooled design, order (beta0, beta1, beta2, s)
  double sx = 0, sxx = 0;
  for (double v : x) {
    sx += v;
    sxx += v * v;
  }
  Matrix xtx(4, 4);
  for (int k = 0; k < 3; ++k) {
    xtx(size_t(k), size_t(k)) = double(n);
    xtx(size_t(k), 3) = sx;
    xtx(3, size_t(k)) = sx;
  }
  xtx(3, 3) = 3.0 * sxx;
  const std::vector<double> tv = {t_vector[0], t_vector[1], t_vector[2], t_vector[3]};
  const std::vector<double> xtx_inv_t = solve_square(xtx, tv);
  double quad = 0.0;
  for (int i = 0; i < 4; ++i) quad += tv[size_t(i)] * xtx_inv_t[size_t(i)];
  if (quad <= 0) throw NumericError("simulate_normality: degenerate t vector");
  const double denom = sigma * std::sqrt(quad);

  RegressionData data;
  data.x = x;
  data.J = {0, 1, 2};
  for (int k = 0; k < 3; ++k) {
    data.keep[size_t(k)].assign(size_t(n), 1);
    data.y[size_t(k)].assign(size_t(n), 0.0);
    data.sigma[size_t(k)] = 1;
  }
  auto draw = [&](rng::SplitMix64& g) {
    if (innovations == Innovations::Gaussian) return g.gaussian();
    // t3 via N / sqrt(chi^2_3 / 3), rescaled to unit variance (var = 3)
    const double z = g.gaussian();
    double chi = 0.0;
    for (int i = 0; i < 3; ++i) {
      const double w = g.gaussian();
      chi += w * w;
    }
    return z / std::sqrt(chi / 3.0) / std::sqrt(3.0);
  };
  std::vector<double> stats(static_cast<size_t>(trials));
  for (int trial = 0; trial < trials; ++trial) {
    auto g = rng::trial_stream(seed, std::uint64_t(trial));
    for (int k = 0; k < 3; ++k)
      for (int j = 0; j < n; ++j)
        data.y[size_t(k)][size_t(j)] =
            beta_true[size_t(k)] + s_true * x[size_t(j)] + sigma * draw(g);
    const LreResult fit = lre_fit(data);
    const double num = t_vector[0] * (fit.beta[0] - beta_true[0]) +
                       t_vector[1] * (fit.beta[1] - beta_true[1]) +
                       t_vector[2] * (fit.beta[2] - beta_true[2]) +
                       t_vector[3] * (fit.s_hat - s_true);
    stats[size_t(trial)] = num / denom;
  }
  std::sort(stats.begin(), stats.end());
  NormalityReport rep;
  rep.trials = trials;
  for (int d = 1; d <= 9; ++d) {
    const double q = double(d) / 10.0;
    const double pos = q * (trials - 1);
    const size_t lo = size_t(pos);
    const double frac = pos - double(lo);
    rep.deciles[size_t(d) - 1] =
        stats[lo] * (1 - frac) + stats[std::min(size_t(trials) - 1, lo + 1)] * frac;
    rep.normal_deciles[size_t(d) - 1] = detail::normal_quantile(q);
    rep.max_decile_error = std::max(
        rep.max_decile_error, std::abs(rep.deciles[size_t(d) - 1] - rep.normal_deciles[size_t(d) - 1]));
  }
  double ks = 0.0;
  for (size_t i = 0; i < stats.size(); ++i) {
    const double cdf = detail::normal_cdf(stats[i]);
    ks = std::max(ks, std::abs(cdf - double(i + 1) / double(trials)));
    ks = std::max(ks, std::abs(cdf - double(i) / double(trials)));
  }
  rep.ks_statistic = ks;
  return rep;
}

}  // namespace fracdim
