#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "fracdim/common.hpp"

namespace fracdim {

/// One contracting planar similarity in unit-square coordinates:
/// S(p) = ratio * R(rotation) * M(reflection) * p + (tx, ty).
struct Similarity {
  double ratio = 0.5;       // contraction ratio, in (0,1)
  double rotation = 0.0;    // radians
  bool reflection = false;  // mirror across the x axis before rotating
  double tx = 0.0;
  double ty = 0.0;
};

struct IfsSystem {
  std::vector<Similarity> maps;
  std::string name;

  void validate() const {
    if (maps.empty()) throw DataError("IFS: needs at least one map");
    for (const auto& m : maps)
      if (!(m.ratio > 0.0 && m.ratio < 1.0))
        throw DataError("IFS: contraction ratio must lie in (0,1)");
  }
};

/// Unique s >= 0 with sum_i ratio_i^s = 1, by bisection on [0, 64].
/// The map s -> sum r_i^s is strictly decreasing.
inline double similarity_dimension(const IfsSystem& sys) {
  sys.validate();
  auto excess = [&](double s) {
    double acc = 0.0;
    for (const auto& m : sys.maps) acc += std::pow(m.ratio, s);
    return acc - 1.0;
  };
  double lo = 0.0, hi = 64.0;
  if (excess(lo) <= 0.0) return 0.0;  // single map: r^0 = 1 exactly
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double e = excess(mid);
    if (std::abs(e) < 1e-12) return mid;
    (e > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

struct ArithmeticityClass {
  enum class Kind { Arithmetic, NonArithmetic };
  Kind kind = Kind::NonArithmetic;
  double h = 0.0;  // valid when Arithmetic: largest h with -log r_i in h*Z
  double tolerance = 0.0;

  bool arithmetic() const { return kind == Kind::Arithmetic; }
};

namespace detail {

// Best rational p/q ~ value with q <= qmax via continued fractions; returns
// false when no convergent within rel_tol exists under the bound.
inline bool rational_approx(double value, std::int64_t qmax, double rel_tol,
                            std::int64_t& p_out, std::int64_t& q_out) {
  double x = value;
  std::int64_t p0 = 1, q0 = 0, p1 = std::int64_t(std::floor(x)), q1 = 1;
  for (int it = 0; it < 64; ++it) {
    if (p1 > 0 && std::abs(value - double(p1) / double(q1)) <= rel_tol * std::abs(value)) {
      p_out = p1;
      q_out = q1;
      return true;
    }
    const double frac = x - std::floor(x);
    if (frac < 1e-15) break;
    x = 1.0 / frac;
    const double a = std::floor(x);
    if (a > 9e15) break;
    const std::int64_t p2 = std::int64_t(a) * p1 + p0;
    const std::int64_t q2 = std::int64_t(a) * q1 + q0;
    if (q2 > qmax) break;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
  }
  return false;
}

}  // namespace detail

/// Classifies {-log r_i} as h-arithmetic (largest such h) or non-arithmetic.
/// Rationality of the pairwise ratios is detected by continued fractions at
/// float-noise scale with denominator bound 1e6; the returned h is then
/// verified against the caller's tol.
inline ArithmeticityClass classify_arithmeticity(const IfsSystem& sys, double tol = 1e-9) {
  sys.validate();
  if (tol <= 0) throw DataError("classify_arithmeticity: tol must be positive");
  std::vector<double> v;
  v.reserve(sys.maps.size());
  for (const auto& m : sys.maps) v.push_back(-std::log(m.ratio));

  constexpr std::int64_t kQMax = 1'000'000;
  constexpr double kRationalTol = 1e-13;

  ArithmeticityClass out;
  out.tolerance = tol;

  // h = v0 * gcd_i(p_i * (Q / q_i)) / Q with v_i = (p_i / q_i) * v0
  std::vector<std::int64_t> ps(v.size()), qs(v.size());
  for (size_t i = 0; i < v.size(); ++i) {
    if (!detail::rational_approx(v[i] / v[0], kQMax, kRationalTol, ps[i], qs[i]))
      return out;  // non-arithmetic
  }
  std::int64_t lcm_q = 1;
  for (auto q : qs) {
    lcm_q = std::lcm(lcm_q, q);
    if (lcm_q > std::int64_t(1) << 40) return out;
  }
  std::int64_t g = 0;
  for (size_t i = 0; i < v.size(); ++i) g = std::gcd(g, ps[i] * (lcm_q / qs[i]));
  const double h = v[0] * double(g) / double(lcm_q);
  for (double vi : v) {
    const double k = std::round(vi / h);
    if (std::abs(vi - k * h) > tol) return out;
  }
  out.kind = ArithmeticityClass::Kind::Arithmetic;
  out.h = h;
  return out;
}

/// Reads one map per line: ratio rotation_degrees reflect tx ty.
/// '#' starts a comment; blank lines are skipped.
inline IfsSystem parse_ifs_config(std::istream& in, const std::string& name) {
  IfsSystem sys;
  sys.name = name;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    double ratio, rot_deg, tx, ty;
    std::string reflect;
    if (!(ls >> ratio)) continue;  // blank
    if (!(ls >> rot_deg >> reflect >> tx >> ty))
      throw DataError("IFS config line " + std::to_string(lineno) +
                      ": expected 'ratio rotation_deg reflect tx ty'");
    Similarity m;
    m.ratio = ratio;
    m.rotation = rot_deg * kPi / 180.0;
    if (reflect == "1" || reflect == "true")
      m.reflection = true;
    else if (reflect == "0" || reflect == "false")
      m.reflection = false;
    else
      throw DataError("IFS config line " + std::to_string(lineno) + ": bad reflect flag");
    m.tx = tx;
    m.ty = ty;
    sys.maps.push_back(m);
  }
  sys.validate();
  return sys;
}

namespace presets {

inline IfsSystem corner_triangle(const std::string& name, double r_top) {
  // equilateral triangle (0,0) (1,0) (1/2, sqrt(3)/2); corner maps scale
  // toward each vertex
  const double hgt = std::sqrt(3.0) / 2.0;
  IfsSystem sys;
  sys.name = name;
  sys.maps.push_back({0.5, 0.0, false, 0.0, 0.0});
  sys.maps.push_back({0.5, 0.0, false, 0.5, 0.0});
  sys.maps.push_back({r_top, 0.0, false, (1.0 - r_top) * 0.5, (1.0 - r_top) * hgt});
  return sys;
}

inline IfsSystem gasket() { return corner_triangle("gasket", 0.5); }

/// Non-arithmetic gasket-like triangle, top map slightly smaller.
inline IfsSystem triangle() { return corner_triangle("triangle", 0.49); }

inline IfsSystem carpet_with_hole(const std::string& name, int hole_i, int hole_j) {
  IfsSystem sys;
  sys.name = name;
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i) {
      if (i == hole_i && j == hole_j) continue;
      sys.maps.push_back({1.0 / 3.0, 0.0, false, i / 3.0, j / 3.0});
    }
  return sys;
}

inline IfsSystem carpet() { return carpet_with_hole("carpet", 1, 1); }

/// Same eight-map ratio-1/3 construction with the hole moved to the
/// top-edge middle cell.
inline IfsSystem modcarpet() { return carpet_with_hole("modcarpet", 1, 2); }

/// Plus-shape of five squares, arms 0.33 and center 0.34 (non-arithmetic).
inline IfsSystem cross() {
  IfsSystem sys;
  sys.name = "cross";
  const double a = 0.33, b = 0.34;
  const double ca = (1.0 - a) / 2.0, cb = (1.0 - b) / 2.0;
  sys.maps.push_back({b, 0.0, false, cb, cb});
  sys.maps.push_back({a, 0.0, false, 0.0, ca});
  sys.maps.push_back({a, 0.0, false, 1.0 - a, ca});
  sys.maps.push_back({a, 0.0, false, ca, 0.0});
  sys.maps.push_back({a, 0.0, false, ca, 1.0 - a});
  return sys;
}

/// Gasket plus three half-turned copies (ratio 0.235) tucked into the
/// corners of the middle hole; non-arithmetic, dimension ~1.8936.
inline IfsSystem supergasket() {
  IfsSystem sys = corner_triangle("supergasket", 0.5);
  sys.name = "supergasket";
  const double q = 0.235;
  const double s3 = std::sqrt(3.0);
  const double pi = kPi;
  // images of the base triangle under S(p) = -q p + t land on the hole's
  // corner triangles (hole vertices (1/2,0), (3/4,s3/4), (1/4,s3/4))
  sys.maps.push_back({q, pi, false, 0.25 + q, s3 / 4.0});
  sys.maps.push_back({q, pi, false, 0.75, s3 / 4.0});
  sys.maps.push_back({q, pi, false, 0.5 + q / 2.0, q * s3 / 2.0});
  return sys;
}

/// Four ratio-1/2 maps tiling the unit square; attractor is the full square.
inline IfsSystem fullsquare() {
  IfsSystem sys;
  sys.name = "fullsquare";
  for (int j = 0; j < 2; ++j)
    for (int i = 0; i < 2; ++i) sys.maps.push_back({0.5, 0.0, false, i * 0.5, j * 0.5});
  return sys;
}

}  // namespace presets

inline IfsSystem preset_ifs(const std::string& name) {
  if (name == "gasket") return presets::gasket();
  if (name == "carpet") return presets::carpet();
  if (name == "modcarpet") return presets::modcarpet();
  if (name == "triangle") return presets::triangle();
  if (name == "cross") return presets::cross();
  if (name == "supergasket") return presets::supergasket();
  if (name == "fullsquare") return presets::fullsquare();
  throw DataError("unknown IFS preset: " + name);
}

inline std::vector<std::string> preset_names() {
  return {"gasket", "carpet", "modcarpet", "triangle", "cross", "supergasket", "fullsquare"};
}

}  // namespace fracdim
