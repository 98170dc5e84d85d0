#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fracdim/common.hpp"
#include "fracdim/image.hpp"
#include "fracdim/linalg.hpp"
#include "fracdim/series.hpp"

namespace fracdim {

/// Simultaneous linear least squares over the retained indices (LRE).
/// With J = {2} this is exactly the sausage method.
struct LreResult {
  double s_hat = 0.0;
  std::array<double, 3> beta{};       // valid for k in J
  std::array<double, 3> curvature{};  // sigma_k * exp(beta_k)
  double residual = 0.0;              // mean squared residual over retained samples
  std::vector<int> J;
  std::array<int, 3> sigma{};
  bool s_fixed = false;
};

/// Closed-form shared-slope fit: s_hat = sum_k sum_j y_kj (x_j - xbar_k) /
/// sum_k sum_j (x_j - xbar_k)^2 over retained samples, beta_k = ybar_k -
/// xbar_k s_hat. For a complete grid this reduces to the usual pooled form
/// with (n-1)|J| S_n^2 in the denominator.
inline LreResult lre_fit(const RegressionData& data, std::optional<double> known_s = {}) {
  const int n = data.n();
  if (n < 2) throw DataError("lre_fit: need at least two radii");
  LreResult out;
  out.J = data.J;
  out.sigma = data.sigma;

  std::array<double, 3> xbar{}, ybar{};
  std::array<int, 3> cnt{};
  for (int k : data.J) {
    double sx = 0, sy = 0;
    int c = 0;
    for (int j = 0; j < n; ++j) {
      if (!data.keep[size_t(k)][size_t(j)]) continue;
      sx += data.x[size_t(j)];
      sy += data.y[size_t(k)][size_t(j)];
      ++c;
    }
    if (c < 2) throw DataError("lre_fit: index with fewer than two samples");
    xbar[size_t(k)] = sx / c;
    ybar[size_t(k)] = sy / c;
    cnt[size_t(k)] = c;
  }
  if (known_s) {
    out.s_hat = *known_s;
    out.s_fixed = true;
  } else {
    double num = 0, den = 0;
    for (int k : data.J) {
      for (int j = 0; j < n; ++j) {
        if (!data.keep[size_t(k)][size_t(j)]) continue;
        const double dx = data.x[size_t(j)] - xbar[size_t(k)];
        num += data.y[size_t(k)][size_t(j)] * dx;
        den += dx * dx;
      }
    }
    if (den <= 0) throw DataError("lre_fit: degenerate design (all x equal)");
    out.s_hat = num / den;
  }
  double rss = 0;
  std::int64_t m = 0;
  for (int k : data.J) {
    out.beta[size_t(k)] = ybar[size_t(k)] - xbar[size_t(k)] * out.s_hat;
    out.curvature[size_t(k)] =
        double(data.sigma[size_t(k)]) * std::exp(out.beta[size_t(k)]);
    for (int j = 0; j < n; ++j) {
      if (!data.keep[size_t(k)][size_t(j)]) continue;
      const double r = data.y[size_t(k)][size_t(j)] -
                       (out.beta[size_t(k)] + out.s_hat * data.x[size_t(j)]);
      rss += r * r;
      ++m;
    }
  }
  out.residual = m > 0 ? rss / double(m) : 0.0;
  return out;
}

/// Quasi-linear regression: linear drift plus a truncated Fourier seasonal
/// part with fundamental period h0 on the log scale (NRE).
struct NreResult {
  double s_hat = 0.0;
  std::vector<double> s_per_k;         // separate mode: per retained k
  std::array<double, 3> beta{};
  std::array<std::vector<double>, 3> b;    // amplitude, j = 1..m
  std::array<std::vector<double>, 3> phi;  // phase
  std::array<std::vector<double>, 3> alpha;
  std::array<std::vector<double>, 3> gamma;
  double h0 = 0.0;
  int m = 0;
  std::array<double, 3> curvature{};  // sigma_k * |C_k| via the period integral
  std::string mode;                   // "simultaneous" or "separate"
  double residual = 0.0;
  std::vector<int> J;
  std::array<int, 3> sigma{};
  bool s_fixed = false;
};

enum class NreMode { Simultaneous, Separate };

namespace detail {

inline double seasonal_value(const std::vector<double>& b, const std::vector<double>& phi,
                             double mu1, double x) {
  double f = 0.0;
  for (size_t j = 0; j < b.size(); ++j) f += b[j] * std::cos(mu1 * double(j + 1) * x + phi[j]);
  return f;
}

// (exp(beta)/h0) * int_0^{h0} exp(f(x)) dx by composite Simpson, 1024 panels.
inline double curvature_integral(double beta, const std::vector<double>& b,
                                 const std::vector<double>& phi, double h0) {
  constexpr int kPanels = 1024;
  const double mu1 = 2.0 * kPi / h0;
  const double step = h0 / kPanels;
  double acc = 0.0;
  for (int i = 0; i <= kPanels; ++i) {
    const double x = i * step;
    const double w = (i == 0 || i == kPanels) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    acc += w * std::exp(seasonal_value(b, phi, mu1, x));
  }
  const double integral = acc * step / 3.0;
  const double result = std::exp(beta) / h0 * integral;
  if (!std::isfinite(result)) throw NumericError("nre_fit: quadrature not finite");
  return result;
}

struct NreDesignRow {
  int k;
  int j;
};

}  // namespace detail

/// Solves the seasonal regression by Householder QR (columns 1, x,
/// cos(mu1 j x), -sin(mu1 j x)). Simultaneous mode shares s across the
/// retained indices with per-index intercepts and seasonal coefficients;
/// separate mode fits each index alone and reports the empirical median of
/// the per-index slopes. m = 0 reproduces the LRE exactly.
inline NreResult nre_fit(const RegressionData& data, double h0, int m,
                         NreMode mode = NreMode::Simultaneous,
                         std::optional<double> known_s = {}) {
  if (!(h0 > 0)) throw DataError("nre_fit: h0 must be positive");
  if (m < 0) throw DataError("nre_fit: m must be nonnegative");
  const int n = data.n();
  if (n < 2 * m + 2) throw DataError("nre_fit: need n >= 2m + 2");

  // resonance guard: on a log-arithmetic grid with step a, a*j/h0 must not be
  // an integer for j = 1..2m, otherwise seasonal columns alias the intercept.
  if (m > 0 && n >= 2) {
    bool arithmetic = true;
    const double a = data.x[1] - data.x[0];
    for (int j = 2; j < n; ++j)
      if (std::abs((data.x[size_t(j)] - data.x[size_t(j) - 1]) - a) > 1e-9 * std::abs(a))
        arithmetic = false;
    if (arithmetic) {
      for (int j = 1; j <= 2 * m; ++j) {
        const double v = a * double(j) / h0;
        if (std::abs(v - std::round(v)) < 1e-9)
          throw NumericError("nre_fit: schedule step resonates with h0 (a*j/h0 integral, j=" +
                             std::to_string(j) + ")");
      }
    }
  }

  const double mu1 = 2.0 * kPi / h0;
  NreResult out;
  out.h0 = h0;
  out.m = m;
  out.J = data.J;
  out.sigma = data.sigma;
  out.mode = mode == NreMode::Simultaneous ? "simultaneous" : "separate";
  out.s_fixed = known_s.has_value();

  auto fit_block = [&](const std::vector<int>& ks) {
    // rows: retained (k, j); columns per k: intercept + 2m seasonal, plus one
    // shared slope column unless s is fixed
    std::vector<detail::NreDesignRow> rows;
    for (int k : ks)
      for (int j = 0; j < n; ++j)
        if (data.keep[size_t(k)][size_t(j)]) rows.push_back({k, j});
    const size_t per_k = 1 + 2 * size_t(m);
    const size_t ncols = ks.size() * per_k + (known_s ? 0 : 1);
    if (rows.size() < ncols) throw NumericError("nre_fit: design-matrix rank deficiency");
    Matrix A(rows.size(), ncols);
    std::vector<double> rhs(rows.size());
    for (size_t r = 0; r < rows.size(); ++r) {
      const double x = data.x[size_t(rows[r].j)];
      const size_t kpos = size_t(std::find(ks.begin(), ks.end(), rows[r].k) - ks.begin());
      const size_t base = kpos * per_k;
      A(r, base) = 1.0;
      for (int j = 1; j <= m; ++j) {
        A(r, base + size_t(j)) = std::cos(mu1 * j * x);
        A(r, base + size_t(m + j)) = -std::sin(mu1 * j * x);
      }
      if (!known_s) A(r, ncols - 1) = x;
      rhs[r] = data.y[size_t(rows[r].k)][size_t(rows[r].j)] - (known_s ? *known_s * x : 0.0);
    }
    std::vector<double> coef = qr_least_squares(A, rhs);
    const double s = known_s ? *known_s : coef[ncols - 1];
    double rss = 0.0;
    for (size_t r = 0; r < rows.size(); ++r) {
      double pred = 0.0;
      const size_t kpos = size_t(std::find(ks.begin(), ks.end(), rows[r].k) - ks.begin());
      const size_t base = kpos * per_k;
      const double x = data.x[size_t(rows[r].j)];
      pred += coef[base];
      for (int j = 1; j <= m; ++j)
        pred += coef[base + size_t(j)] * std::cos(mu1 * j * x) -
                coef[base + size_t(m + j)] * std::sin(mu1 * j * x);
      pred += s * x;
      const double res = data.y[size_t(rows[r].k)][size_t(rows[r].j)] - pred;
      rss += res * res;
    }
    out.residual += rss;
    for (size_t kpos = 0; kpos < ks.size(); ++kpos) {
      const int k = ks[kpos];
      const size_t base = kpos * per_k;
      out.beta[size_t(k)] = coef[base];
      auto& al = out.alpha[size_t(k)];
      auto& ga = out.gamma[size_t(k)];
      auto& bb = out.b[size_t(k)];
      auto& ph = out.phi[size_t(k)];
      al.assign(size_t(m), 0.0);
      ga.assign(size_t(m), 0.0);
      bb.assign(size_t(m), 0.0);
      ph.assign(size_t(m), 0.0);
      for (int j = 0; j < m; ++j) {
        al[size_t(j)] = coef[base + size_t(j) + 1];
        ga[size_t(j)] = coef[base + size_t(m + j) + 1];
        bb[size_t(j)] = std::hypot(al[size_t(j)], ga[size_t(j)]);
        ph[size_t(j)] = bb[size_t(j)] > 0 ? std::atan2(ga[size_t(j)], al[size_t(j)]) : 0.0;
      }
      out.curvature[size_t(k)] =
          double(data.sigma[size_t(k)]) *
          detail::curvature_integral(out.beta[size_t(k)], bb, ph, h0);
    }
    return s;
  };

  if (mode == NreMode::Simultaneous) {
    out.s_hat = fit_block(data.J);
  } else {
    for (int k : data.J) out.s_per_k.push_back(fit_block({k}));
    std::vector<double> sorted = out.s_per_k;
    std::sort(sorted.begin(), sorted.end());
    const size_t q = sorted.size();
    out.s_hat = q % 2 ? sorted[q / 2] : 0.5 * (sorted[q / 2 - 1] + sorted[q / 2]);
  }
  std::int64_t total = 0;
  for (int k : data.J)
    for (int j = 0; j < n; ++j) total += data.keep[size_t(k)][size_t(j)] ? 1 : 0;
  if (total > 0) out.residual /= double(total);
  return out;
}

/// Box-counting slope: OLS of log N_delta against -log delta.
inline double box_count_dimension(const BinaryImage& img, const std::vector<int>& deltas) {
  if (deltas.size() < 3) throw DataError("box_count_dimension: need at least 3 grid sizes");
  if (img.count_black() == 0) throw DataError("box_count_dimension: empty image");
  std::vector<double> xs, ys;
  for (int d : deltas) {
    if (d < 1 || d > std::max(img.width, img.height))
      throw DataError("box_count_dimension: bad grid size");
    const int bw = (img.width + d - 1) / d, bh = (img.height + d - 1) / d;
    std::vector<std::uint8_t> boxes(size_t(bw) * bh, 0);
    for (int y = 0; y < img.height; ++y)
      for (int x = 0; x < img.width; ++x)
        if (img.at(x, y)) boxes[size_t(y / d) * bw + size_t(x / d)] = 1;
    std::int64_t nd = 0;
    for (auto b : boxes) nd += b;
    xs.push_back(-std::log(double(d)));
    ys.push_back(std::log(double(nd)));
  }
  double xbar = 0, ybar = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    xbar += xs[i];
    ybar += ys[i];
  }
  xbar /= double(xs.size());
  ybar /= double(xs.size());
  double num = 0, den = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    num += (xs[i] - xbar) * (ys[i] - ybar);
    den += (xs[i] - xbar) * (xs[i] - xbar);
  }
  if (den <= 0) throw DataError("box_count_dimension: degenerate grid list");
  return num / den;
}

/// Relative discrepancy of the half-dimension relation C1 = ((2-s)/2) C2.
inline double check_halfdim_relation(double s_hat, double c1, double c2) {
  if (c1 == 0.0) throw DataError("check_halfdim_relation: C1 missing or zero");
  return std::abs(c1 - 0.5 * (2.0 - s_hat) * c2) / std::abs(c1);
}

/// Closed-form eigenvalues of the pooled-design X^T X (d = 2): lambda0 = n of
/// multiplicity d and lambda_{1/2} = (n+v)/2 +- sqrt((n+v)^2/4 - n^2(d+1)St2)
/// with v = (d+1) sum x_j^2 and St2 the 1/n-normalized x variance, plus the
/// Chebyshev-type exceedance bound nu* tr / (eps^2 lambda_min^2).
struct EigenDiagnostics {
  double lambda0 = 0.0;  // multiplicity d
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double lambda_min = 0.0;
  double trace = 0.0;
  double bound = 0.0;
};

inline EigenDiagnostics design_eigen_diagnostics(const std::vector<double>& x, double nu_star,
                                                 double epsilon) {
  const int d = 2;
  const size_t n = x.size();
  if (n < 2) throw DataError("design_eigen_diagnostics: need n >= 2");
  double xbar = 0, sumsq = 0;
  for (double v : x) {
    xbar += v;
    sumsq += v * v;
  }
  xbar /= double(n);
  double st2 = 0;
  for (double v : x) st2 += (v - xbar) * (v - xbar);
  st2 /= double(n);
  const double vn = (d + 1) * sumsq;
  const double half = 0.5 * (double(n) + vn);
  const double disc = std::sqrt(std::max(0.0, half * half - double(n) * double(n) * (d + 1) * st2));
  EigenDiagnostics out;
  out.lambda0 = double(n);
  out.lambda1 = half + disc;
  out.lambda2 = half - disc;
  out.lambda_min = std::min(out.lambda0, out.lambda2);
  out.trace = double(n) * (d + 1) + vn;
  out.bound = (epsilon > 0 && nu_star >= 0)
                  ? nu_star * out.trace / (epsilon * epsilon * out.lambda_min * out.lambda_min)
                  : 0.0;
  return out;
}

}  // namespace fracdim
