#pragma once

#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "fracdim/common.hpp"
#include "fracdim/estimators.hpp"
#include "fracdim/periodogram.hpp"
#include "fracdim/series.hpp"

namespace fracdim {

struct EstimateOptions {
  std::string method = "auto";  // lre | nre | auto
  std::vector<int> J;           // empty = all retained indices
  int m = 4;                    // 0 = estimate via peak count
  std::optional<double> h0;     // known period, skips estimation
  std::optional<double> known_s;
  NreMode mode = NreMode::Simultaneous;
  double period_threshold = 5.0;  // periodogram max/median significance cutoff
  int pad_factor = 10;
  bool majority_sign_mode = false;
};

struct EstimationResult {
  std::string method;  // method actually used
  std::vector<int> J;
  std::array<int, 3> sigma{};
  double s_hat = 0.0;
  std::array<double, 3> beta{};
  std::array<double, 3> curvature{};
  double residual = 0.0;
  // seasonal part (NRE only)
  bool has_nre = false;
  int m = 0;
  double h0 = 0.0;
  bool h0_estimated = false;
  std::array<std::vector<double>, 3> b;
  std::array<std::vector<double>, 3> phi;
  std::vector<double> s_per_k_nre;
  std::string nre_mode;
  // diagnostics
  std::vector<double> s_separate;  // per-k LRE slopes (s_k = s - k check)
  double halfdim_discrepancy = std::nan("");
  double periodogram_peak_ratio = 0.0;
  int m_hat = 0;
  std::optional<double> box_count;
  std::vector<std::string> notes;
};

/// Full estimation pipeline on a measured series: sign screening, LRE,
/// optional periodogram + NRE, per-index slope diagnostics and the
/// half-dimension relation.
inline EstimationResult run_estimate(const CurvatureSeries& raw, const EstimateOptions& opt,
                                     const RadiiSchedule* sched_hint = nullptr) {
  CurvatureSeries series = raw.validated ? raw : validate_signs(raw, 0.10, opt.majority_sign_mode);

  std::vector<int> J = opt.J;
  if (J.empty()) {
    for (int k = 0; k < 3; ++k)
      if (!series.excluded[size_t(k)]) J.push_back(k);
  }
  if (J.empty()) throw DataError("estimate: every index was excluded by sign validation");

  EstimationResult res;
  for (int k = 0; k < 3; ++k)
    if (series.excluded[size_t(k)])
      res.notes.push_back("index " + std::to_string(k) + " excluded by A2 screening");

  const RegressionData data = to_regression(series, J);
  res.J = data.J;
  res.sigma = data.sigma;

  const LreResult lre = lre_fit(data, opt.known_s);
  res.method = "lre";
  res.s_hat = lre.s_hat;
  res.beta = lre.beta;
  res.curvature = lre.curvature;
  res.residual = lre.residual;

  // per-index separate slopes (the s_k = s - k hypothesis check)
  for (int k : data.J) {
    RegressionData single = data;
    single.J = {k};
    res.s_separate.push_back(lre_fit(single).s_hat);
  }

  // x spacing for the periodogram path
  double x_step = 0.0;
  bool arithmetic = false;
  if (data.n() >= 2) {
    x_step = data.x[1] - data.x[0];
    arithmetic = true;
    for (int j = 2; j < data.n(); ++j)
      if (std::abs((data.x[size_t(j)] - data.x[size_t(j) - 1]) - x_step) >
          1e-9 * std::abs(x_step))
        arithmetic = false;
  }
  if (sched_hint && sched_hint->log_arithmetic) {
    arithmetic = true;
    x_step = sched_hint->x_step;
  }

  const bool want_nre = opt.method == "nre" || opt.method == "auto";
  if (want_nre) {
    double h0 = 0.0;
    bool have_h0 = false;
    int m = opt.m;
    if (opt.h0) {
      h0 = *opt.h0;
      have_h0 = true;
      if (m == 0) m = 4;
    } else if (arithmetic && data.n() >= 8) {
      // period search on the Euler residuals when available (the oscillation
      // is most visible there), otherwise on all retained indices
      std::vector<std::vector<double>> resid;
      const auto all = detrended_residuals(data, lre_fit(data));
      const auto it = std::find(data.J.begin(), data.J.end(), 0);
      if (it != data.J.end())
        resid.push_back(all[size_t(it - data.J.begin())]);
      else
        resid = all;
      const Periodogram pg = periodogram(resid, x_step, opt.pad_factor);
      res.m_hat = estimate_m(pg);
      if (m == 0) m = res.m_hat;
      const PeriodEstimate pe = estimate_period(pg, std::max(1, m), opt.period_threshold);
      res.periodogram_peak_ratio = pe.peak_ratio;
      if (pe.significant) {
        h0 = pe.h0;
        have_h0 = true;
        res.h0_estimated = true;
      } else if (opt.method == "nre") {
        throw NumericError("estimate: no significant period in the residual periodogram");
      } else {
        res.notes.push_back("auto: flat periodogram, fell back to LRE");
      }
    } else if (opt.method == "auto") {
      res.notes.push_back("auto: schedule not log-arithmetic (or too short), LRE used");
    } else if (opt.method == "nre") {
      throw DataError(
          "estimate: period estimation needs a log-arithmetic schedule of at least 8 radii; "
          "pass --h0 for other schedules");
    }
    if (have_h0) {
      const NreResult nre = nre_fit(data, h0, m, opt.mode, opt.known_s);
      res.method = "nre";
      res.has_nre = true;
      res.s_hat = nre.s_hat;
      res.beta = nre.beta;
      res.curvature = nre.curvature;
      res.residual = nre.residual;
      res.m = nre.m;
      res.h0 = nre.h0;
      res.b = nre.b;
      res.phi = nre.phi;
      res.s_per_k_nre = nre.s_per_k;
      res.nre_mode = nre.mode;
    }
  }

  const bool has1 = std::find(res.J.begin(), res.J.end(), 1) != res.J.end();
  const bool has2 = std::find(res.J.begin(), res.J.end(), 2) != res.J.end();
  if (has1 && has2)
    res.halfdim_discrepancy =
        check_halfdim_relation(res.s_hat, res.curvature[1], res.curvature[2]);
  return res;
}

// --- result CSV (long format: field,k,j,value) and the text report ---

inline void write_result_csv(const EstimationResult& r, std::ostream& out) {
  auto row = [&](const std::string& field, int k, int j, double v) {
    out << field << ',';
    if (k >= 0) out << k;
    out << ',';
    if (j >= 0) out << j;
    out << ',' << format_g17(v) << '\n';
  };
  out << "field,k,j,value\n";
  out << "method,,," << r.method << '\n';
  row("s_hat", -1, -1, r.s_hat);
  row("residual", -1, -1, r.residual);
  for (int k : r.J) {
    row("beta", k, -1, r.beta[size_t(k)]);
    row("curvature", k, -1, r.curvature[size_t(k)]);
    row("sigma", k, -1, double(r.sigma[size_t(k)]));
  }
  for (size_t i = 0; i < r.s_separate.size(); ++i) row("s_separate", r.J[i], -1, r.s_separate[i]);
  if (r.has_nre) {
    row("h0", -1, -1, r.h0);
    row("m", -1, -1, double(r.m));
    row("h0_estimated", -1, -1, r.h0_estimated ? 1.0 : 0.0);
    for (int k : r.J)
      for (int j = 0; j < r.m; ++j) {
        row("b", k, j + 1, r.b[size_t(k)][size_t(j)]);
        row("phi", k, j + 1, r.phi[size_t(k)][size_t(j)]);
      }
    for (size_t i = 0; i < r.s_per_k_nre.size(); ++i)
      row("s_nre_separate", r.J[i], -1, r.s_per_k_nre[i]);
  }
  if (!std::isnan(r.halfdim_discrepancy)) row("halfdim_discrepancy", -1, -1, r.halfdim_discrepancy);
  if (r.periodogram_peak_ratio > 0) row("peak_ratio", -1, -1, r.periodogram_peak_ratio);
  if (r.m_hat > 0) row("m_hat", -1, -1, double(r.m_hat));
  if (r.box_count) row("box_count", -1, -1, *r.box_count);
}

inline void write_result_csv(const EstimationResult& r, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open output file: " + path);
  write_result_csv(r, out);
}

inline std::string render_report(const EstimationResult& r) {
  std::ostringstream out;
  out.precision(6);
  out << "method: " << r.method;
  if (r.has_nre) out << " (" << r.nre_mode << ", m=" << r.m << ")";
  out << "\nJ = {";
  for (size_t i = 0; i < r.J.size(); ++i) out << (i ? "," : "") << r.J[i];
  out << "}\n";
  out << "dimension s_hat = " << r.s_hat << "\n";
  if (r.has_nre)
    out << "period h0 = " << r.h0 << (r.h0_estimated ? " (estimated)" : " (given)") << "\n";
  for (int k : r.J) {
    out << "k=" << k << ":  beta = " << r.beta[size_t(k)]
        << "  curvature = " << r.curvature[size_t(k)]
        << "  sign = " << (r.sigma[size_t(k)] > 0 ? "+" : "-") << "\n";
    if (r.has_nre) {
      out << "      seasonal (b, phi):";
      for (int j = 0; j < r.m; ++j)
        out << " (" << r.b[size_t(k)][size_t(j)] << ", " << r.phi[size_t(k)][size_t(j)] << ")";
      out << "\n";
    }
  }
  out << "per-index slopes (s_k = s - k check):";
  for (size_t i = 0; i < r.s_separate.size(); ++i)
    out << " s_" << r.J[i] << " = " << r.s_separate[i];
  out << "\n";
  if (!r.s_per_k_nre.empty()) {
    out << "NRE separate slopes:";
    for (size_t i = 0; i < r.s_per_k_nre.size(); ++i)
      out << " s_" << r.J[i] << " = " << r.s_per_k_nre[i];
    out << "\n";
  }
  if (!std::isnan(r.halfdim_discrepancy))
    out << "half-dimension relation discrepancy = " << r.halfdim_discrepancy << "\n";
  if (r.periodogram_peak_ratio > 0)
    out << "periodogram max/median = " << r.periodogram_peak_ratio << ", m_hat = " << r.m_hat
        << "\n";
  if (r.box_count) out << "box-counting dimension = " << *r.box_count << "\n";
  out << "mean squared residual = " << r.residual << "\n";
  for (const auto& n : r.notes) out << "note: " << n << "\n";
  return out.str();
}

/// Reads the long-format result CSV back into a printable report (used by
/// the `report` subcommand).
inline std::string render_report_from_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("result CSV: empty file");
  std::ostringstream out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = detail::split_csv_line(line);
    if (f.size() != 4) throw DataError("result CSV: bad row");
    out << f[0];
    if (!f[1].empty()) out << "[k=" << f[1] << "]";
    if (!f[2].empty()) out << "[j=" << f[2] << "]";
    out << " = " << f[3] << "\n";
  }
  return out.str();
}

}  // namespace fracdim
