#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "fracdim/common.hpp"
#include "fracdim/image.hpp"

namespace fracdim {

/// Exact Euclidean distance map. Squared distances between pixel centers are
/// kept as integers; dist() takes the square root on demand.
struct DistanceMap {
  int width = 0;
  int height = 0;
  std::vector<std::int32_t> sq;  // exact squared distance to nearest black pixel

  std::int32_t sq_at(int x, int y) const { return sq[size_t(y) * width + x]; }
  double dist(int x, int y) const { return std::sqrt(double(sq_at(x, y))); }
  const std::int32_t* row(int y) const { return sq.data() + size_t(y) * width; }
};

/// Exact squared EDT, two separable passes (column scan, then per-row lower
/// envelope of parabolas). O(width*height), integer arithmetic throughout.
inline DistanceMap distance_transform(const BinaryImage& img) {
  const int w = img.width, h = img.height;
  if (img.count_black() == 0) throw DataError("distance_transform: image has no black pixel");

  DistanceMap dm;
  dm.width = w;
  dm.height = h;
  dm.sq.assign(size_t(w) * h, 0);

  // pass 1: per column, distance to nearest black pixel in the same column
  const std::int32_t inf = w + h + 1;
  std::vector<std::int32_t> g(size_t(w) * h);
  for (int x = 0; x < w; ++x) {
    std::int32_t d = inf;
    for (int y = 0; y < h; ++y) {
      d = img.at(x, y) ? 0 : (d < inf ? d + 1 : inf);
      g[size_t(y) * w + x] = d;
    }
    d = inf;
    for (int y = h - 1; y >= 0; --y) {
      d = img.at(x, y) ? 0 : (d < inf ? d + 1 : inf);
      auto& cell = g[size_t(y) * w + x];
      if (d < cell) cell = d;
    }
  }

  // pass 2: per row, dt(x) = min_q (x-q)^2 + g(q)^2
  std::vector<int> v(w);
  std::vector<double> z(size_t(w) + 1);
  std::vector<std::int64_t> f(w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::int64_t gy = g[size_t(y) * w + x];
      f[x] = gy * gy;
    }
    int k = 0;
    v[0] = 0;
    z[0] = -std::numeric_limits<double>::infinity();
    z[1] = std::numeric_limits<double>::infinity();
    for (int q = 1; q < w; ++q) {
      // intersection of parabola q with parabola v[k]; exact enough in double
      // since integer minima differing by <1 must be equal
      double s;
      for (;;) {
        const int p = v[k];
        s = double(f[q] - f[p] + std::int64_t(q) * q - std::int64_t(p) * p) / (2.0 * (q - p));
        if (s <= z[k] && k > 0) {
          --k;
        } else {
          break;
        }
      }
      ++k;
      v[k] = q;
      z[k] = s;
      z[k + 1] = std::numeric_limits<double>::infinity();
    }
    k = 0;
    for (int x = 0; x < w; ++x) {
      while (z[k + 1] < x) ++k;
      const std::int64_t dx = std::int64_t(x) - v[k];
      dm.sq[size_t(y) * w + x] = std::int32_t(dx * dx + f[v[k]]);
    }
  }
  return dm;
}

/// Integer threshold for "dist <= eps": sq <= floor(eps^2).
inline std::int64_t squared_threshold(double eps) {
  if (eps < 0) throw DataError("dilate: negative radius");
  return std::int64_t(std::floor(eps * eps));
}

/// Parallel-set image: pixel p is black iff dist(p) <= eps.
inline BinaryImage dilate(const DistanceMap& dm, double eps) {
  const std::int64_t t = squared_threshold(eps);
  BinaryImage out(dm.width, dm.height);
  for (size_t i = 0; i < dm.sq.size(); ++i) out.bits[i] = dm.sq[i] <= t ? 1 : 0;
  return out;
}

}  // namespace fracdim
