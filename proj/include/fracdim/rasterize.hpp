#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "fracdim/common.hpp"
#include "fracdim/ifs.hpp"
#include "fracdim/image.hpp"

namespace fracdim {

struct DepthPolicy {
  std::optional<int> fixed_depth;  // empty = auto (stop below one pixel)

  static DepthPolicy automatic() { return {}; }
  static DepthPolicy fixed(int n) { return {n}; }
};

/// How leaf copies turn into pixels. CoverClosedSquare marks every pixel
/// whose closed unit square meets a leaf copy (the Gauss digitization rule);
/// it over-covers the attractor by up to a pixel, which shrinks fine holes.
/// CenterSample marks only the pixel containing each leaf's center, an
/// unbiased thin digitization; MeasureCore marks pixels that contain a whole
/// leaf copy, the deterministic limit of point-plotted images (pixels meeting
/// the attractor only in a measure-zero sliver, such as hole-bounding
/// segments, stay white). The latter two drive leaves below a quarter pixel.
enum class RasterRule { CoverClosedSquare, CenterSample, MeasureCore };

namespace detail {

struct Affine {
  // p -> A p + t
  double a00 = 1, a01 = 0, a10 = 0, a11 = 1;
  double tx = 0, ty = 0;
  double ratio = 1;  // accumulated contraction

  static Affine of(const Similarity& s) {
    const double c = std::cos(s.rotation), sn = std::sin(s.rotation);
    const double m = s.reflection ? -1.0 : 1.0;
    // ratio * R(theta) * diag(1, m)
    Affine t;
    t.a00 = s.ratio * c;
    t.a01 = s.ratio * -sn * m;
    t.a10 = s.ratio * sn;
    t.a11 = s.ratio * c * m;
    t.tx = s.tx;
    t.ty = s.ty;
    t.ratio = s.ratio;
    return t;
  }

  Affine then(const Affine& inner) const {  // this o inner
    Affine r;
    r.a00 = a00 * inner.a00 + a01 * inner.a10;
    r.a01 = a00 * inner.a01 + a01 * inner.a11;
    r.a10 = a10 * inner.a00 + a11 * inner.a10;
    r.a11 = a10 * inner.a01 + a11 * inner.a11;
    r.tx = a00 * inner.tx + a01 * inner.ty + tx;
    r.ty = a10 * inner.tx + a11 * inner.ty + ty;
    r.ratio = ratio * inner.ratio;
    return r;
  }

  std::array<double, 2> apply(double x, double y) const {
    return {a00 * x + a01 * y + tx, a10 * x + a11 * y + ty};
  }
};

// Convex quad vs axis-aligned unit pixel square, separating axis test with a
// touch tolerance so exactly-abutting tiles mark their shared boundary pixels
// identically on both sides.
inline bool quad_intersects_pixel(const std::array<std::array<double, 2>, 4>& q, int px, int py,
                                  double tol) {
  double qminx = q[0][0], qmaxx = q[0][0], qminy = q[0][1], qmaxy = q[0][1];
  for (int i = 1; i < 4; ++i) {
    qminx = std::min(qminx, q[i][0]);
    qmaxx = std::max(qmaxx, q[i][0]);
    qminy = std::min(qminy, q[i][1]);
    qmaxy = std::max(qmaxy, q[i][1]);
  }
  if (qminx > px + 1 + tol || qmaxx < px - tol || qminy > py + 1 + tol || qmaxy < py - tol)
    return false;
  // quad edge normals (two distinct directions for a square)
  for (int e = 0; e < 2; ++e) {
    const double ex = q[e + 1][0] - q[e][0];
    const double ey = q[e + 1][1] - q[e][1];
    const double nx = -ey, ny = ex;
    double qlo = 1e300, qhi = -1e300;
    for (const auto& v : q) {
      const double d = nx * v[0] + ny * v[1];
      qlo = std::min(qlo, d);
      qhi = std::max(qhi, d);
    }
    double plo = 1e300, phi = -1e300;
    for (int cy = 0; cy <= 1; ++cy)
      for (int cx = 0; cx <= 1; ++cx) {
        const double d = nx * (px + cx) + ny * (py + cy);
        plo = std::min(plo, d);
        phi = std::max(phi, d);
      }
    const double scale = std::hypot(nx, ny);
    if (qlo > phi + tol * scale || qhi < plo - tol * scale) return false;
  }
  return true;
}

}  // namespace detail

/// Deterministic depth-first subdivision rasterizer. Starting from the unit
/// square scaled to side x side pixels, recursion stops when the current
/// copy's diameter falls below one pixel (auto) or at the fixed depth; every
/// pixel whose closed unit square meets the final union of copies is set.
inline BinaryImage rasterize(const IfsSystem& sys, int side,
                             DepthPolicy policy = DepthPolicy::automatic(),
                             std::int64_t node_budget = std::int64_t(1) << 26,
                             RasterRule rule = RasterRule::CoverClosedSquare) {
  sys.validate();
  if (side < 16) throw DataError("rasterize: side must be at least 16");

  if (policy.fixed_depth) {
    if (*policy.fixed_depth < 0) throw DataError("rasterize: negative depth");
    // node count sum_{k<=n} N^k, checked before descending
    double est = 0.0, pw = 1.0;
    for (int k = 0; k <= *policy.fixed_depth; ++k) {
      est += pw;
      pw *= double(sys.maps.size());
      if (est > double(node_budget))
        throw DataError("rasterize: fixed depth exceeds node budget");
    }
    if (est > double(node_budget)) throw DataError("rasterize: fixed depth exceeds node budget");
  }

  std::vector<detail::Affine> maps;
  maps.reserve(sys.maps.size());
  for (const auto& m : sys.maps) maps.push_back(detail::Affine::of(m));

  BinaryImage img(side, side);
  const double pixel_stop = rule == RasterRule::CoverClosedSquare ? 1.0 : 0.25;
  const double diam_stop = pixel_stop / (std::sqrt(2.0) * side);  // unit-square units
  constexpr double kTouchTol = 1e-6;                              // pixels
  std::int64_t visited = 0;

  struct Frame {
    detail::Affine t;
    int depth;
  };
  std::vector<Frame> stack;
  stack.push_back({detail::Affine{}, 0});
  while (!stack.empty()) {
    const Frame fr = stack.back();
    stack.pop_back();
    if (++visited > node_budget) throw DataError("rasterize: node budget exhausted");
    const bool leaf = policy.fixed_depth ? fr.depth >= *policy.fixed_depth
                                         : fr.t.ratio <= diam_stop;
    if (!leaf) {
      for (auto it = maps.rbegin(); it != maps.rend(); ++it)
        stack.push_back({fr.t.then(*it), fr.depth + 1});
      continue;
    }
    if (rule == RasterRule::CenterSample) {
      const auto c = fr.t.apply(0.5, 0.5);
      const int px = int(std::floor(c[0] * side));
      const int py = int(std::floor(c[1] * side));
      if (px >= 0 && py >= 0 && px < side && py < side) img.set(px, py, 1);
      continue;
    }
    if (rule == RasterRule::MeasureCore) {
      double minx = 1e300, maxx = -1e300, miny = 1e300, maxy = -1e300;
      const double corners[4][2] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
      for (auto& cn : corners) {
        const auto p = fr.t.apply(cn[0], cn[1]);
        minx = std::min(minx, p[0] * side);
        maxx = std::max(maxx, p[0] * side);
        miny = std::min(miny, p[1] * side);
        maxy = std::max(maxy, p[1] * side);
      }
      const int px = int(std::floor(minx));
      const int py = int(std::floor(miny));
      if (px >= 0 && py >= 0 && px < side && py < side && maxx <= px + 1 && maxy <= py + 1)
        img.set(px, py, 1);
      continue;
    }
    std::array<std::array<double, 2>, 4> quad;
    const double corners[4][2] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    for (int i = 0; i < 4; ++i) {
      auto p = fr.t.apply(corners[i][0], corners[i][1]);
      quad[i] = {p[0] * side, p[1] * side};
    }
    double minx = quad[0][0], maxx = quad[0][0], miny = quad[0][1], maxy = quad[0][1];
    for (int i = 1; i < 4; ++i) {
      minx = std::min(minx, quad[i][0]);
      maxx = std::max(maxx, quad[i][0]);
      miny = std::min(miny, quad[i][1]);
      maxy = std::max(maxy, quad[i][1]);
    }
    const int x0 = std::max(0, int(std::floor(minx - kTouchTol)));
    const int x1 = std::min(side - 1, int(std::floor(maxx + kTouchTol)));
    const int y0 = std::max(0, int(std::floor(miny - kTouchTol)));
    const int y1 = std::min(side - 1, int(std::floor(maxy + kTouchTol)));
    for (int py = y0; py <= y1; ++py)
      for (int px = x0; px <= x1; ++px)
        if (!img.at(px, py) && detail::quad_intersects_pixel(quad, px, py, kTouchTol))
          img.set(px, py, 1);
  }
  return img;
}

}  // namespace fracdim
