#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fracdim/common.hpp"
#include "fracdim/distance.hpp"
#include "fracdim/image.hpp"
#include "fracdim/minkowski.hpp"
#include "fracdim/schedule.hpp"

namespace fracdim {

struct SeriesEntry {
  double eps = 0.0;
  std::int64_t c0 = 0;
  double c1 = 0.0;
  double c2 = 0.0;

  double ck(int k) const { return k == 0 ? double(c0) : (k == 1 ? c1 : c2); }
};

/// Per-radius intrinsic volumes (decreasing eps) plus the A2 sign screening
/// state filled in by validate_signs.
struct CurvatureSeries {
  std::vector<SeriesEntry> entries;
  std::array<int, 3> sign{0, 0, 0};        // +1 / -1, 0 = not set or invalid
  std::array<bool, 3> excluded{true, true, true};
  std::vector<std::pair<int, int>> dropped;  // (k, entry index) removed samples
  bool validated = false;

  double x(size_t j) const { return -std::log(entries[j].eps); }
  bool is_dropped(int k, int j) const {
    for (const auto& d : dropped)
      if (d.first == k && d.second == j) return true;
    return false;
  }
};

struct MeasureWarnings {
  bool border_contact = false;
  double margin_px = 0.0;  // distance from the set to the canvas border
};

namespace detail {

inline double border_margin(const BinaryImage& img) {
  double m = 1e300;
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      if (img.at(x, y)) {
        const double d = std::min(std::min(x, img.width - 1 - x),
                                  std::min(y, img.height - 1 - y));
        m = std::min(m, d);
      }
  return m;
}

}  // namespace detail

/// One distance transform, then per radius a single thresholded scan
/// producing all three functionals. Entries follow the schedule order
/// (decreasing eps).
inline CurvatureSeries measure_series(const BinaryImage& img, const RadiiSchedule& sched,
                                      MeasureWarnings* warnings = nullptr) {
  const DistanceMap dm = distance_transform(img);
  if (warnings) {
    warnings->margin_px = detail::border_margin(img);
    warnings->border_contact = !sched.eps.empty() && warnings->margin_px < sched.eps.front() + 1.0;
  }
  CurvatureSeries out;
  out.entries.reserve(sched.size());
  for (double eps : sched.eps) {
    const IntrinsicVolumes iv = intrinsic_volumes_dilated(dm, eps);
    out.entries.push_back({eps, iv.c0, iv.c1, iv.c2});
  }
  return out;
}

/// A2 screening: drops zero samples (log undefined), invalidates indices with
/// mixed signs (or, with majority_mode, drops the minority samples), and
/// excludes an index when more than zero_drop_frac of its samples were zero.
inline CurvatureSeries validate_signs(const CurvatureSeries& series, double zero_drop_frac = 0.10,
                                      bool majority_mode = false) {
  CurvatureSeries out = series;
  out.dropped.clear();
  out.validated = true;
  const int n = int(series.entries.size());
  for (int k = 0; k < 3; ++k) {
    int pos = 0, neg = 0, zero = 0;
    for (int j = 0; j < n; ++j) {
      const double v = series.entries[size_t(j)].ck(k);
      if (v > 0)
        ++pos;
      else if (v < 0)
        ++neg;
      else
        ++zero;
    }
    for (int j = 0; j < n; ++j)
      if (series.entries[size_t(j)].ck(k) == 0.0) out.dropped.push_back({k, j});

    int sigma = 0;
    bool excluded = false;
    if (pos + neg == 0) {
      excluded = true;
    } else if (pos > 0 && neg > 0) {
      if (majority_mode) {
        sigma = pos >= neg ? +1 : -1;
        for (int j = 0; j < n; ++j) {
          const double v = series.entries[size_t(j)].ck(k);
          if ((sigma > 0 && v < 0) || (sigma < 0 && v > 0)) out.dropped.push_back({k, j});
        }
      } else {
        excluded = true;  // strict A2 reading: any sign change excludes k
      }
    } else {
      sigma = pos > 0 ? +1 : -1;
    }
    if (n > 0 && double(zero) > zero_drop_frac * double(n)) excluded = true;
    out.sign[size_t(k)] = sigma;
    out.excluded[size_t(k)] = excluded;
  }
  return out;
}

/// Regression variables: x_j = -log eps_j and y_kj = log(eps_j^{-k}|C_k|),
/// with the A2 sign kept aside for later restoration of the curvature sign.
struct RegressionData {
  std::vector<double> x;                       // all radii, schedule order
  std::vector<int> J;                          // index set, ascending
  std::array<std::vector<double>, 3> y;        // y[k][j], NaN where dropped
  std::array<std::vector<char>, 3> keep;       // keep[k][j]
  std::array<int, 3> sigma{0, 0, 0};

  int n() const { return int(x.size()); }
  bool complete() const {  // no holes in any retained index
    for (int k : J)
      for (char c : keep[size_t(k)])
        if (!c) return false;
    return true;
  }
};

inline RegressionData to_regression(const CurvatureSeries& series, const std::vector<int>& J) {
  if (!series.validated) throw DataError("to_regression: run validate_signs first");
  if (J.empty()) throw DataError("to_regression: empty index set J");
  RegressionData data;
  data.J = J;
  std::sort(data.J.begin(), data.J.end());
  const int n = int(series.entries.size());
  for (int j = 0; j < n; ++j) data.x.push_back(series.x(size_t(j)));
  for (int k = 0; k < 3; ++k) {
    data.sigma[size_t(k)] = series.sign[size_t(k)];
    data.y[size_t(k)].assign(size_t(n), std::nan(""));
    data.keep[size_t(k)].assign(size_t(n), 0);
  }
  for (int k : data.J) {
    if (k < 0 || k > 2) throw DataError("to_regression: J must be a subset of {0,1,2}");
    if (series.excluded[size_t(k)])
      throw DataError("to_regression: index " + std::to_string(k) +
                      " was excluded by sign validation");
    int kept = 0;
    for (int j = 0; j < n; ++j) {
      if (series.is_dropped(k, j)) continue;
      const double c = series.entries[size_t(j)].ck(k);
      data.y[size_t(k)][size_t(j)] = std::log(std::abs(c)) + k * data.x[size_t(j)];
      data.keep[size_t(k)][size_t(j)] = 1;
      ++kept;
    }
    if (kept < 3)
      throw DataError("to_regression: index " + std::to_string(k) + " has fewer than 3 samples");
  }
  return data;
}

// --- series CSV (the measure -> estimate interchange format) ---

inline void write_series_csv(const CurvatureSeries& series, std::ostream& out) {
  out << "eps,x,c0,c1,c2,y0,y1,y2\n";
  for (size_t j = 0; j < series.entries.size(); ++j) {
    const auto& e = series.entries[j];
    const double x = -std::log(e.eps);
    out << format_g17(e.eps) << ',' << format_g17(x) << ',' << e.c0 << ','
        << format_g17(e.c1) << ',' << format_g17(e.c2);
    for (int k = 0; k < 3; ++k) {
      const double c = e.ck(k);
      out << ',';
      if (c == 0.0)
        out << "nan";
      else
        out << format_g17(std::log(std::abs(c)) + k * x);
    }
    out << '\n';
  }
}

inline void write_series_csv(const CurvatureSeries& series, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open output file: " + path);
  write_series_csv(series, out);
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

inline double parse_double(const std::string& s, const char* what) {
  try {
    size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DataError(std::string("CSV: bad ") + what + " value '" + s + "'");
  }
}

}  // namespace detail

inline CurvatureSeries read_series_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("series CSV: empty file");
  auto header = detail::split_csv_line(line);
  if (header.size() < 5 || header[0] != "eps" || header[2] != "c0" || header[3] != "c1" ||
      header[4] != "c2")
    throw DataError("series CSV: unexpected header");
  CurvatureSeries series;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = detail::split_csv_line(line);
    if (f.size() < 5) throw DataError("series CSV: short row");
    SeriesEntry e;
    e.eps = detail::parse_double(f[0], "eps");
    e.c0 = std::int64_t(std::llround(detail::parse_double(f[2], "c0")));
    e.c1 = detail::parse_double(f[3], "c1");
    e.c2 = detail::parse_double(f[4], "c2");
    if (!(e.eps > 0)) throw DataError("series CSV: eps must be positive");
    series.entries.push_back(e);
  }
  if (series.entries.empty()) throw DataError("series CSV: no rows");
  for (size_t j = 1; j < series.entries.size(); ++j)
    if (!(series.entries[j].eps < series.entries[j - 1].eps))
      throw DataError("series CSV: eps must be strictly decreasing");
  return series;
}

inline CurvatureSeries read_series_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open series CSV: " + path);
  return read_series_csv(in);
}

}  // namespace fracdim
