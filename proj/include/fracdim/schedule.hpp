#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "fracdim/common.hpp"

namespace fracdim {

/// Dilation radii with their log coordinates x_j = -log(eps_j). Radii are
/// strictly decreasing (x strictly increasing); a schedule is log-arithmetic
/// when the x are equally spaced, which the period estimator requires.
struct RadiiSchedule {
  std::vector<double> eps;  // strictly decreasing
  std::vector<double> x;    // x_j = -log eps_j, strictly increasing
  std::string kind;
  bool log_arithmetic = false;
  double x_step = 0.0;  // valid when log_arithmetic

  size_t size() const { return eps.size(); }
};

namespace detail {

inline RadiiSchedule from_x(std::vector<double> xs, std::string kind) {
  if (xs.empty()) throw DataError("schedule: empty");
  RadiiSchedule s;
  s.kind = std::move(kind);
  s.x = std::move(xs);
  s.eps.reserve(s.x.size());
  for (size_t j = 1; j < s.x.size(); ++j)
    if (!(s.x[j] > s.x[j - 1])) throw DataError("schedule: x must be strictly increasing");
  for (double xv : s.x) s.eps.push_back(std::exp(-xv));
  return s;
}

}  // namespace detail

/// x_j = a0 + a*j, j = 1..n (radii eps_j = e^{-a0-a*j}).
inline RadiiSchedule log_arithmetic_schedule(double a0, double a, int n) {
  if (n < 1) throw DataError("schedule: empty");
  if (!(a > 0)) throw DataError("schedule: log-arithmetic step must be positive");
  std::vector<double> xs(static_cast<size_t>(n));
  for (int j = 1; j <= n; ++j) xs[size_t(j) - 1] = a0 + a * j;
  auto s = detail::from_x(std::move(xs), "log-arithmetic");
  s.log_arithmetic = true;
  s.x_step = a;
  return s;
}

/// Radii from a log(eps) range [lo, hi] descending with the given step,
/// mirroring the experimental grid (log eps from 4.5 down to 1.0, step 0.02).
inline RadiiSchedule log_range_schedule(double log_eps_hi, double log_eps_lo, double step) {
  if (!(step > 0)) throw DataError("schedule: step must be positive");
  if (!(log_eps_hi > log_eps_lo)) throw DataError("schedule: empty log range");
  const int n = int(std::floor((log_eps_hi - log_eps_lo) / step + 1e-9)) + 1;
  return log_arithmetic_schedule(-log_eps_hi - step, step, n);
}

/// The reference grid: 176 radii, eps from e^{4.5} (~90.02) down to e (~2.72).
inline RadiiSchedule default_schedule() { return log_range_schedule(4.5, 1.0, 0.02); }

/// x_j = c * j^delta, j = 1..n.
inline RadiiSchedule power_schedule(double c, double delta, int n) {
  if (n < 1) throw DataError("schedule: empty");
  if (!(c > 0) || !(delta > 0)) throw DataError("schedule: power parameters must be positive");
  std::vector<double> xs(static_cast<size_t>(n));
  for (int j = 1; j <= n; ++j) xs[size_t(j) - 1] = c * std::pow(double(j), delta);
  return detail::from_x(std::move(xs), "power");
}

namespace detail {

// Areas A with #{(i,j) in Z^2 : i^2+j^2 <= A/pi} = A. The first four follow
// the published enumeration (which skips the fixed points 13, 21, 29); the
// rule generates the continuation.
inline std::vector<std::int64_t> stoyan_areas(int n) {
  std::vector<std::int64_t> areas = {1, 5, 9, 37};
  if (n <= int(areas.size())) {
    areas.resize(size_t(n));
    return areas;
  }
  const int rmax_sq = 4 * 1024 * 1024;
  // cumulative lattice counts by squared radius
  std::vector<std::int64_t> csum;
  std::vector<std::int64_t> count;
  {
    const int rmax = int(std::sqrt(double(rmax_sq))) + 2;
    count.assign(size_t(rmax_sq) + 1, 0);
    for (int i = -rmax; i <= rmax; ++i)
      for (int j = -rmax; j <= rmax; ++j) {
        const std::int64_t q = std::int64_t(i) * i + std::int64_t(j) * j;
        if (q <= rmax_sq) ++count[size_t(q)];
      }
    csum.resize(count.size());
    std::int64_t acc = 0;
    for (size_t q = 0; q < count.size(); ++q) {
      acc += count[q];
      csum[q] = acc;
    }
  }
  for (std::int64_t q = 11; q < rmax_sq && int(areas.size()) < n; ++q) {
    if (count[size_t(q)] == 0) continue;
    const std::int64_t N = csum[size_t(q)];
    const double r2 = double(N) / kPi;  // candidate squared radius
    // fixed point: q <= N/pi < next occupied shell
    if (r2 + 1e-12 < double(q)) continue;
    std::int64_t qnext = q + 1;
    while (qnext < rmax_sq && count[size_t(qnext)] == 0) ++qnext;
    if (r2 < double(qnext)) areas.push_back(N);
  }
  if (int(areas.size()) < n) throw DataError("schedule: Stoyan sequence exhausted");
  return areas;
}

}  // namespace detail

/// Radii sqrt(A/pi) for which discrete and continuous disks have equal area.
inline RadiiSchedule stoyan_schedule(int n) {
  if (n < 1) throw DataError("schedule: empty");
  auto areas = detail::stoyan_areas(n);
  RadiiSchedule s;
  s.kind = "equal-area";
  for (auto it = areas.rbegin(); it != areas.rend(); ++it)
    s.eps.push_back(std::sqrt(double(*it) / kPi));
  for (double e : s.eps) s.x.push_back(-std::log(e));
  for (size_t j = 1; j < s.eps.size(); ++j)
    if (!(s.eps[j] < s.eps[j - 1])) throw DataError("schedule: non-monotone");
  return s;
}

/// Explicit radii; sorted to decreasing order, duplicates rejected.
inline RadiiSchedule explicit_schedule(std::vector<double> radii) {
  if (radii.empty()) throw DataError("schedule: empty");
  std::sort(radii.begin(), radii.end(), std::greater<>());
  for (size_t j = 0; j < radii.size(); ++j) {
    if (!(radii[j] > 0)) throw DataError("schedule: radii must be positive");
    if (j > 0 && !(radii[j] < radii[j - 1])) throw DataError("schedule: non-monotone explicit list");
  }
  RadiiSchedule s;
  s.kind = "explicit";
  s.eps = std::move(radii);
  for (double e : s.eps) s.x.push_back(-std::log(e));
  return s;
}

}  // namespace fracdim
