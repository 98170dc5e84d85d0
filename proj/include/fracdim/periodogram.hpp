#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "fracdim/common.hpp"
#include "fracdim/estimators.hpp"
#include "fracdim/series.hpp"

namespace fracdim {

/// Periodogram I_n(t) = |sum_j e^{-ijt} y~_j|^2 / (2 pi n) of detrended
/// series, evaluated on a zero-padded frequency grid t in (0, pi]. When
/// several index series are supplied their powers are summed after per-series
/// variance normalization. The x spacing is kept so frequencies can be read
/// in log-radius units (t = mu * x_step).
struct Periodogram {
  std::vector<double> t;      // per-sample angular frequency, (0, pi]
  std::vector<double> power;
  int pad_factor = 10;
  double x_step = 0.0;
  size_t n = 0;                               // series length
  std::vector<std::vector<double>> series;    // variance-normalized residuals

  double x_range() const { return n > 1 ? x_step * double(n - 1) : 0.0; }

  /// Direct evaluation at arbitrary t (folded into [0, pi] by symmetry).
  double power_at(double tq) const {
    double tf = std::fmod(std::abs(tq), 2.0 * kPi);
    if (tf > kPi) tf = 2.0 * kPi - tf;
    double total = 0.0;
    for (const auto& s : series) {
      double re = 0.0, im = 0.0;
      for (size_t j = 0; j < s.size(); ++j) {
        const double ang = tf * double(j + 1);
        re += s[j] * std::cos(ang);
        im -= s[j] * std::sin(ang);
      }
      total += (re * re + im * im) / (2.0 * kPi * double(s.size()));
    }
    return total;
  }
};

/// LRE residuals y_kj - (beta_k + s x_j) per retained index; dropped samples
/// enter as zeros (the series stays centered).
inline std::vector<std::vector<double>> detrended_residuals(const RegressionData& data,
                                                            const LreResult& fit) {
  std::vector<std::vector<double>> out;
  for (int k : data.J) {
    std::vector<double> r(size_t(data.n()), 0.0);
    for (int j = 0; j < data.n(); ++j) {
      if (!data.keep[size_t(k)][size_t(j)]) continue;
      r[size_t(j)] = data.y[size_t(k)][size_t(j)] -
                     (fit.beta[size_t(k)] + fit.s_hat * data.x[size_t(j)]);
    }
    out.push_back(std::move(r));
  }
  return out;
}

inline Periodogram periodogram(const std::vector<std::vector<double>>& residuals, double x_step,
                               int pad_factor = 10) {
  if (residuals.empty()) throw DataError("periodogram: no series");
  const size_t n = residuals.front().size();
  if (n < 8) throw DataError("periodogram: series shorter than 8");
  for (const auto& s : residuals)
    if (s.size() != n) throw DataError("periodogram: ragged series");
  if (pad_factor < 1) throw DataError("periodogram: pad factor must be >= 1");

  Periodogram pg;
  pg.pad_factor = pad_factor;
  pg.x_step = x_step;
  pg.n = n;
  for (const auto& s : residuals) {
    double mean = 0.0;
    for (double v : s) mean += v;
    mean /= double(n);
    double var = 0.0;
    std::vector<double> c(n);
    for (size_t j = 0; j < n; ++j) {
      c[j] = s[j] - mean;
      var += c[j] * c[j];
    }
    var /= double(n);
    if (var > 0)
      for (auto& v : c) v /= std::sqrt(var);
    pg.series.push_back(std::move(c));
  }
  const size_t grid = n * size_t(pad_factor);
  const size_t half = grid / 2;
  pg.t.reserve(half);
  pg.power.reserve(half);
  for (size_t r = 1; r <= half; ++r) {
    const double t = 2.0 * kPi * double(r) / double(grid);
    pg.t.push_back(t);
    pg.power.push_back(pg.power_at(t));
  }
  return pg;
}

namespace detail {

inline double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace detail

struct PeriodEstimate {
  bool significant = false;
  double h0 = 0.0;       // period in x units
  double mu1 = 0.0;      // fundamental angular frequency in x units
  double peak_ratio = 0.0;  // max power / median power over the grid
};

/// h0_hat = 2 pi / mu1_hat with mu1_hat maximizing sum_{j<=m} I_n(j mu) over
/// a 4096-point grid of fundamentals (periods between 3 grid steps and half
/// the x range), then one golden-section refinement. A flat spectrum
/// (max/median below `flat_threshold`) yields significant = false.
inline PeriodEstimate estimate_period(const Periodogram& pg, int m, double flat_threshold = 5.0) {
  if (m < 1) throw DataError("estimate_period: m must be >= 1");
  if (pg.x_step <= 0) throw DataError("estimate_period: schedule is not log-arithmetic");
  PeriodEstimate out;
  out.peak_ratio = 0.0;
  {
    const double med = detail::median_of(pg.power);
    double mx = 0.0;
    for (double p : pg.power) mx = std::max(mx, p);
    out.peak_ratio = med > 0 ? mx / med : (mx > 0 ? 1e300 : 0.0);
  }
  if (out.peak_ratio < flat_threshold) return out;  // no significant period

  const double xr = pg.x_range();
  if (xr <= 0) throw DataError("estimate_period: empty range");
  const double mu_min = 2.0 * kPi / (0.5 * xr);  // period <= half the x range
  // period >= 3 grid steps, and every harmonic j <= m must stay below the
  // Nyquist frequency or the folded sum aliases reflected peaks
  const double mu_max =
      std::min(2.0 * kPi / (3.0 * pg.x_step), kPi / (double(m) * pg.x_step));
  if (!(mu_max > mu_min)) throw DataError("estimate_period: admissible band empty");

  auto objective = [&](double mu) {
    double s = 0.0;
    for (int j = 1; j <= m; ++j) s += pg.power_at(double(j) * mu * pg.x_step);
    return s;
  };

  constexpr int kGrid = 4096;
  double best_mu = mu_min, best_val = -1.0;
  for (int i = 0; i < kGrid; ++i) {
    const double mu = mu_min + (mu_max - mu_min) * double(i) / double(kGrid - 1);
    const double val = objective(mu);
    if (val > best_val) {
      best_val = val;
      best_mu = mu;
    }
  }
  // golden-section refinement one grid cell around the argmax
  const double cell = (mu_max - mu_min) / double(kGrid - 1);
  double a = std::max(mu_min, best_mu - cell), b = std::min(mu_max, best_mu + cell);
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = objective(c), fd = objective(d);
  for (int it = 0; it < 60; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = objective(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = objective(d);
    }
  }
  out.significant = true;
  out.mu1 = 0.5 * (a + b);
  // subharmonic guard: if an integer multiple of the argmax carries more
  // harmonic power, the search locked onto a subharmonic of the fundamental
  for (int k = 2; k <= 3; ++k) {
    const double cand = out.mu1 * k;
    if (cand <= mu_max && objective(cand) > 1.05 * objective(out.mu1)) {
      out.mu1 = cand;
      break;
    }
  }
  out.h0 = 2.0 * kPi / out.mu1;
  return out;
}

/// Counts high peaks (local maxima above 5x the median power and 5% of the
/// maximum, the latter to skip Dirichlet sidelobes) on the one-sided grid;
/// the two-sided count including the zero bin is l = 2*peaks + 1 and
/// m_hat = max(1, floor((l-1)/2)), capped at 8.
inline int estimate_m(const Periodogram& pg, double peak_threshold = 5.0, int cap = 8) {
  const double med = detail::median_of(pg.power);
  double mx = 0.0;
  for (double p : pg.power) mx = std::max(mx, p);
  int peaks = 0;
  for (size_t i = 0; i < pg.power.size(); ++i) {
    const double p = pg.power[i];
    if (p <= peak_threshold * med || p < 0.05 * mx) continue;
    const double prev = i > 0 ? pg.power[i - 1] : 0.0;
    const double next = i + 1 < pg.power.size() ? pg.power[i + 1] : 0.0;
    if (p > prev && p >= next) ++peaks;
  }
  const int l = 2 * peaks + 1;
  return std::max(1, std::min(cap, (l - 1) / 2));
}

}  // namespace fracdim
