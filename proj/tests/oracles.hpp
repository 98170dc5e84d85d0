// Independent reference implementations used only by the test suites. These
// must stay decoupled from the library paths they are checking.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "fracdim/image.hpp"
#include "fracdim/lab.hpp"
#include "fracdim/linalg.hpp"

namespace oracle {

// O(pixels * black) all-pairs squared Euclidean distances.
inline std::vector<std::int64_t> brute_force_sqdist(const fracdim::BinaryImage& img) {
  std::vector<std::pair<int, int>> black;
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      if (img.at(x, y)) black.push_back({x, y});
  std::vector<std::int64_t> out(size_t(img.width) * img.height, -1);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      std::int64_t best = std::int64_t(1) << 62;
      for (auto [bx, by] : black) {
        const std::int64_t dx = x - bx, dy = y - by;
        best = std::min(best, dx * dx + dy * dy);
      }
      out[size_t(y) * img.width + x] = best;
    }
  return out;
}

// Second, naive 2x2 histogram: explicit window loop with bounds checks.
inline std::array<std::int64_t, 16> naive_config_histogram(const fracdim::BinaryImage& img) {
  std::array<std::int64_t, 16> counts{};
  auto px = [&](int x, int y) -> unsigned {
    if (x < 0 || y < 0 || x >= img.width || y >= img.height) return 0;
    return img.at(x, y) ? 1u : 0u;
  };
  for (int wy = -1; wy < img.height; ++wy)
    for (int wx = -1; wx < img.width; ++wx) {
      const unsigned p = px(wx, wy) | px(wx + 1, wy) << 1 | px(wx, wy + 1) << 2 |
                         px(wx + 1, wy + 1) << 3;
      ++counts[p];
    }
  return counts;
}

// deterministic random binary image
inline fracdim::BinaryImage random_image(int w, int h, double density, std::uint64_t seed) {
  fracdim::rng::SplitMix64 g(seed);
  fracdim::BinaryImage img(w, h);
  for (auto& b : img.bits) b = g.uniform() < density ? 1 : 0;
  return img;
}

// lattice points with i^2 + j^2 <= r^2, by direct enumeration
inline std::int64_t lattice_disk_count(double r) {
  const int m = int(std::ceil(r)) + 1;
  const double r2 = r * r;
  std::int64_t n = 0;
  for (int i = -m; i <= m; ++i)
    for (int j = -m; j <= m; ++j)
      if (double(i) * i + double(j) * j <= r2) ++n;
  return n;
}

// eigenvalues of a small symmetric matrix by the cyclic Jacobi method
inline std::vector<double> jacobi_eigenvalues(fracdim::Matrix a) {
  const size_t n = a.rows;
  for (int sweep = 0; sweep < 200; ++sweep) {
    double off = 0.0;
    for (size_t i = 0; i < n; ++i)
      for (size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    if (off < 1e-26) break;
    for (size_t p = 0; p < n; ++p)
      for (size_t q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
  }
  std::vector<double> ev(n);
  for (size_t i = 0; i < n; ++i) ev[i] = a(i, i);
  return ev;
}

// pooled-design X^T X for d = 2, parameter order (beta0, beta1, beta2, s)
inline fracdim::Matrix pooled_xtx(const std::vector<double>& x) {
  const double n = double(x.size());
  double sx = 0, sxx = 0;
  for (double v : x) {
    sx += v;
    sxx += v * v;
  }
  fracdim::Matrix m(4, 4);
  for (int k = 0; k < 3; ++k) {
    m(size_t(k), size_t(k)) = n;
    m(size_t(k), 3) = sx;
    m(3, size_t(k)) = sx;
  }
  m(3, 3) = 3.0 * sxx;
  return m;
}

}  // namespace oracle
