#pragma once

#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "fracdim/common.hpp"

namespace fracdim {

/// Rectangular 0/1 pixel grid, row-major. Row 0 is the geometric bottom
/// (y in [0,1) of the unit-square frame); PBM I/O flips rows so files
/// display the usual way up. Value 1 = black = foreground.
struct BinaryImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;  // width*height, values 0/1

  BinaryImage() = default;
  BinaryImage(int w, int h) : width(w), height(h), bits(size_t(w) * h, 0) {
    if (w <= 0 || h <= 0) throw DataError("image dimensions must be positive");
  }

  std::uint8_t at(int x, int y) const { return bits[size_t(y) * width + x]; }
  void set(int x, int y, std::uint8_t v) { bits[size_t(y) * width + x] = v; }
  const std::uint8_t* row(int y) const { return bits.data() + size_t(y) * width; }
  std::uint8_t* row(int y) { return bits.data() + size_t(y) * width; }

  std::int64_t count_black() const {
    std::int64_t n = 0;
    for (auto b : bits) n += b;
    return n;
  }

  bool operator==(const BinaryImage& o) const {
    return width == o.width && height == o.height && bits == o.bits;
  }

  /// Quarter turn (counterclockwise in the stored frame).
  BinaryImage rotated90() const {
    BinaryImage out(height, width);
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x)
        out.set(height - 1 - y, x, at(x, y));
    return out;
  }

  BinaryImage flipped_x() const {
    BinaryImage out(width, height);
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x) out.set(width - 1 - x, y, at(x, y));
    return out;
  }
};

namespace detail {

inline int pbm_next_token_char(std::istream& in) {
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {  // comment runs to end of line
      while (c != EOF && c != '\n') c = in.get();
    } else if (std::isspace(c)) {
      c = in.get();
    } else {
      break;
    }
  }
  return c;
}

inline long pbm_read_int(std::istream& in) {
  int c = pbm_next_token_char(in);
  if (c == EOF || !std::isdigit(c)) throw DataError("PBM: malformed header, expected integer");
  long v = 0;
  while (c != EOF && std::isdigit(c)) {
    v = v * 10 + (c - '0');
    if (v > 1'000'000'000L) throw DataError("PBM: header integer out of range");
    c = in.get();
  }
  return v;
}

}  // namespace detail

/// Reads plain (P1) or raw (P4) PBM. '1' bits are black/foreground.
inline BinaryImage read_image(std::istream& in, int max_side = 8192) {
  char m0 = 0, m1 = 0;
  in.get(m0);
  in.get(m1);
  if (!in || m0 != 'P' || (m1 != '1' && m1 != '4'))
    throw DataError("PBM: bad magic, expected P1 or P4");
  const bool raw = (m1 == '4');
  long w = detail::pbm_read_int(in);
  long h = detail::pbm_read_int(in);
  if (w <= 0 || h <= 0) throw DataError("PBM: non-positive dimensions");
  if (w > max_side || h > max_side) throw DataError("PBM: image side exceeds configured limit");
  BinaryImage img(static_cast<int>(w), static_cast<int>(h));
  if (raw) {
    // exactly one whitespace byte separates header from pixel data
    const size_t row_bytes = size_t((w + 7) / 8);
    std::vector<char> buf(row_bytes);
    for (long fy = 0; fy < h; ++fy) {
      in.read(buf.data(), std::streamsize(row_bytes));
      if (!in) throw DataError("PBM: truncated raster");
      const int y = int(h - 1 - fy);  // file top row = geometric top
      for (long x = 0; x < w; ++x) {
        const unsigned byte = static_cast<unsigned char>(buf[size_t(x) >> 3]);
        img.set(int(x), y, (byte >> (7 - (x & 7))) & 1u);
      }
    }
  } else {
    for (long fy = 0; fy < h; ++fy) {
      const int y = int(h - 1 - fy);
      for (long x = 0; x < w; ++x) {
        int c = detail::pbm_next_token_char(in);
        if (c != '0' && c != '1') throw DataError("PBM: bad P1 pixel token");
        img.set(int(x), y, std::uint8_t(c - '0'));
      }
    }
  }
  return img;
}

inline BinaryImage read_image(const std::string& path, int max_side = 8192) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open image file: " + path);
  return read_image(in, max_side);
}

inline void write_image(const BinaryImage& img, std::ostream& out, bool ascii = false) {
  if (img.width <= 0 || img.height <= 0) throw DataError("write_image: empty image");
  if (ascii) {
    out << "P1\n" << img.width << " " << img.height << "\n";
    for (int fy = 0; fy < img.height; ++fy) {
      const int y = img.height - 1 - fy;
      for (int x = 0; x < img.width; ++x) {
        out.put(img.at(x, y) ? '1' : '0');
        out.put(x + 1 == img.width ? '\n' : ' ');
      }
    }
  } else {
    out << "P4\n" << img.width << " " << img.height << "\n";
    const size_t row_bytes = size_t((img.width + 7) / 8);
    std::vector<char> buf(row_bytes);
    for (int fy = 0; fy < img.height; ++fy) {
      const int y = img.height - 1 - fy;
      std::fill(buf.begin(), buf.end(), 0);
      for (int x = 0; x < img.width; ++x)
        if (img.at(x, y)) buf[size_t(x) >> 3] |= char(0x80u >> (x & 7));
      out.write(buf.data(), std::streamsize(row_bytes));
    }
  }
  if (!out) throw DataError("write_image: stream failure");
}

inline void write_image(const BinaryImage& img, const std::string& path, bool ascii = false) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open output file: " + path);
  write_image(img, out, ascii);
}

}  // namespace fracdim
