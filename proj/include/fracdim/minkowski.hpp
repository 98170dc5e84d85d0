#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "fracdim/common.hpp"
#include "fracdim/distance.hpp"
#include "fracdim/image.hpp"

namespace fracdim {

// Unit-ball volumes, the Steiner-polynomial normalization in d=2.
inline constexpr double kKappa0 = 1.0;
inline constexpr double kKappa1 = 2.0;
inline constexpr double kKappa2 = 3.14159265358979323846;

/// Counts of the 16 possible 2x2 pixel neighborhoods, scanned over the image
/// extended by one ring of white pixels. Window (wx,wy) holds pixels
/// (wx,wy) (wx+1,wy) (wx,wy+1) (wx+1,wy+1) as bits 0..3; total = (w+1)*(h+1).
struct ConfigHistogram {
  std::array<std::int64_t, 16> counts{};

  std::int64_t total() const {
    std::int64_t t = 0;
    for (auto c : counts) t += c;
    return t;
  }
};

/// Planar intrinsic volumes of the closed-unit-square union of black pixels:
/// c2 = area (= black pixel count, exact), c1 = half boundary length
/// (Cauchy-Crofton 4-direction estimate), c0 = Euler characteristic (exact,
/// from V - E + F on the square complex; may be negative).
struct IntrinsicVolumes {
  std::int64_t c0 = 0;
  double c1 = 0.0;
  double c2 = 0.0;
};

namespace detail {

template <typename RowBits>
inline void accumulate_config_rows(ConfigHistogram& hist, int w, int h, RowBits&& fill_row) {
  // fill_row(y, buf) writes w bits into buf[1..w]; buf[0] and buf[w+1] stay 0.
  std::vector<std::uint8_t> below(size_t(w) + 2, 0), above(size_t(w) + 2, 0);
  for (int wy = -1; wy < h; ++wy) {
    if (wy + 1 < h) {
      fill_row(wy + 1, above.data());
    } else {
      std::fill(above.begin(), above.end(), std::uint8_t(0));
    }
    const std::uint8_t* b = below.data();
    const std::uint8_t* a = above.data();
    for (int i = 0; i <= w; ++i) {
      const unsigned p = unsigned(b[i]) | unsigned(b[i + 1]) << 1 |
                         unsigned(a[i]) << 2 | unsigned(a[i + 1]) << 3;
      ++hist.counts[p];
    }
    std::swap(below, above);
  }
}

}  // namespace detail

inline ConfigHistogram config_histogram(const BinaryImage& img) {
  ConfigHistogram hist;
  detail::accumulate_config_rows(hist, img.width, img.height, [&](int y, std::uint8_t* buf) {
    const std::uint8_t* r = img.row(y);
    for (int x = 0; x < img.width; ++x) buf[x + 1] = r[x] ? 1 : 0;
  });
  return hist;
}

/// Same histogram for the eps-dilation of the set behind a distance map,
/// without materializing the dilated image. Equals
/// config_histogram(dilate(dm, eps)).
inline ConfigHistogram config_histogram_dilated(const DistanceMap& dm, double eps) {
  ConfigHistogram hist;
  const std::int64_t t = squared_threshold(eps);
  detail::accumulate_config_rows(hist, dm.width, dm.height, [&](int y, std::uint8_t* buf) {
    const std::int32_t* r = dm.row(y);
    for (int x = 0; x < dm.width; ++x) buf[x + 1] = r[x] <= t ? 1 : 0;
  });
  return hist;
}

inline IntrinsicVolumes intrinsic_from_histogram(const ConfigHistogram& hist) {
  // Per-pattern tallies. Each pixel appears once as bit 0 (area); each
  // adjacent pair appears in exactly one window: (b0,b1) horizontal,
  // (b0,b2) vertical, (b0,b3) and (b1,b2) the two diagonals.
  std::int64_t f = 0;                // black squares
  std::int64_t v = 0;                // covered lattice vertices
  std::int64_t e = 0;                // covered lattice edges
  std::int64_t t0 = 0, t90 = 0;      // axial transitions
  std::int64_t t45 = 0, t135 = 0;    // diagonal transitions
  for (unsigned p = 0; p < 16; ++p) {
    const std::int64_t n = hist.counts[p];
    if (n == 0) continue;
    const int b0 = p & 1, b1 = (p >> 1) & 1, b2 = (p >> 2) & 1, b3 = (p >> 3) & 1;
    f += n * b0;
    if (p != 0) v += n;
    e += n * ((b0 | b2) + (b0 | b1));
    t0 += n * (b0 ^ b1);
    t90 += n * (b0 ^ b2);
    t45 += n * (b0 ^ b3);
    t135 += n * (b1 ^ b2);
  }
  IntrinsicVolumes out;
  out.c2 = double(f);
  out.c0 = v - e + f;
  // Crofton with equal direction weights; exact in expectation for randomly
  // rotated straight edges, spacing 1 axial and sqrt(2) diagonal.
  const double perimeter =
      (kKappa2 / 8.0) * (double(t0 + t90) + double(t45 + t135) / std::sqrt(2.0));
  out.c1 = perimeter / 2.0;
  return out;
}

/// All three functionals in one scan of the image.
inline IntrinsicVolumes intrinsic_volumes(const BinaryImage& img) {
  return intrinsic_from_histogram(config_histogram(img));
}

inline IntrinsicVolumes intrinsic_volumes_dilated(const DistanceMap& dm, double eps) {
  return intrinsic_from_histogram(config_histogram_dilated(dm, eps));
}

/// Exact boundary edge count of the pixel-square union (the polygonal
/// perimeter; biased up to 4/pi for smooth sets, kept as a diagnostic).
inline std::int64_t perimeter_edgecount(const BinaryImage& img) {
  const ConfigHistogram hist = config_histogram(img);
  std::int64_t edges = 0;
  for (unsigned p = 0; p < 16; ++p) {
    const int b0 = p & 1, b1 = (p >> 1) & 1, b2 = (p >> 2) & 1;
    edges += hist.counts[p] * ((b0 ^ b1) + (b0 ^ b2));
  }
  return edges;
}

/// Flood-fill oracle for the Euler characteristic of the closed-square union:
/// 8-connected black components minus 4-connected enclosed white regions.
inline std::int64_t euler_exact(const BinaryImage& img) {
  const int w = img.width, h = img.height;
  std::int64_t components = 0;
  {
    std::vector<std::uint8_t> seen(size_t(w) * h, 0);
    std::vector<std::pair<int, int>> stack;
    for (int y0 = 0; y0 < h; ++y0) {
      for (int x0 = 0; x0 < w; ++x0) {
        if (!img.at(x0, y0) || seen[size_t(y0) * w + x0]) continue;
        ++components;
        seen[size_t(y0) * w + x0] = 1;
        stack.push_back({x0, y0});
        while (!stack.empty()) {
          auto [x, y] = stack.back();
          stack.pop_back();
          for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
              const int nx = x + dx, ny = y + dy;
              if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
              if (!img.at(nx, ny) || seen[size_t(ny) * w + nx]) continue;
              seen[size_t(ny) * w + nx] = 1;
              stack.push_back({nx, ny});
            }
          }
        }
      }
    }
  }
  // white regions on a one-ring padded grid; those not reaching the pad ring
  // are holes (white connectivity is 4-adjacency under the closed-square set)
  const int pw = w + 2, ph = h + 2;
  auto white = [&](int x, int y) {
    return x == 0 || y == 0 || x == pw - 1 || y == ph - 1 || !img.at(x - 1, y - 1);
  };
  std::vector<std::uint8_t> seen(size_t(pw) * ph, 0);
  std::vector<std::pair<int, int>> stack;
  std::int64_t holes = 0;
  for (int y0 = 0; y0 < ph; ++y0) {
    for (int x0 = 0; x0 < pw; ++x0) {
      if (!white(x0, y0) || seen[size_t(y0) * pw + x0]) continue;
      bool touches_border = false;
      seen[size_t(y0) * pw + x0] = 1;
      stack.push_back({x0, y0});
      while (!stack.empty()) {
        auto [x, y] = stack.back();
        stack.pop_back();
        if (x == 0 || y == 0 || x == pw - 1 || y == ph - 1) touches_border = true;
        constexpr int nb[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
        for (auto& d : nb) {
          const int nx = x + d[0], ny = y + d[1];
          if (nx < 0 || ny < 0 || nx >= pw || ny >= ph) continue;
          if (!white(nx, ny) || seen[size_t(ny) * pw + nx]) continue;
          seen[size_t(ny) * pw + nx] = 1;
          stack.push_back({nx, ny});
        }
      }
      if (!touches_border) ++holes;
    }
  }
  return components - holes;
}

}  // namespace fracdim
