#include "stabkit/core/image_ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stabkit/core/error.hpp"

namespace stabkit {

namespace {

void require_same_shape(const Image& a, const Image& b) {
  if (!a.same_shape(b)) throw ShapeError("image shapes differ");
}

}  // namespace

void sample_bilinear(const Image& image, double x, double y, float* out) {
  const int w = image.width();
  const int h = image.height();
  const int ch = image.channels();
  x = std::clamp(x, 0.0, static_cast<double>(w - 1));
  y = std::clamp(y, 0.0, static_cast<double>(h - 1));
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const int x1 = std::min(x0 + 1, w - 1);
  const int y1 = std::min(y0 + 1, h - 1);
  const double fx = x - x0;
  const double fy = y - y0;
  for (int c = 0; c < ch; ++c) {
    const double top = image.at(y0, x0, c) * (1.0 - fx) + image.at(y0, x1, c) * fx;
    const double bot = image.at(y1, x0, c) * (1.0 - fx) + image.at(y1, x1, c) * fx;
    out[c] = static_cast<float>(top * (1.0 - fy) + bot * fy);
  }
}

Image warp(const Image& src, int width, int height, const Affine2& map) {
  Image out(width, height, src.channels());
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double sx = map.a00 * x + map.a01 * y + map.ox;
      const double sy = map.a10 * x + map.a11 * y + map.oy;
      sample_bilinear(src, sx, sy, &out.at(y, x, 0));
    }
  }
  return out;
}

Image translate(const Image& src, double dx, double dy) {
  if (dx == 0.0 && dy == 0.0) return src;
  Affine2 map;
  map.ox = -dx;
  map.oy = -dy;
  return warp(src, src.width(), src.height(), map);
}

Image to_luma(const Image& src) {
  if (src.channels() == 1) return src;
  if (src.channels() != 3) throw ShapeError("luma needs 1 or 3 channels");
  Image out(src.width(), src.height(), 1);
  auto in = src.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    dst[i] = 0.299f * in[3 * i] + 0.587f * in[3 * i + 1] + 0.114f * in[3 * i + 2];
  }
  return out;
}

Image crop(const Image& src, int row, int col, int height, int width) {
  if (row < 0 || col < 0 || row + height > src.height() ||
      col + width > src.width() || height <= 0 || width <= 0) {
    throw RangeError("crop window exceeds image bounds");
  }
  Image out(width, height, src.channels());
  const int ch = src.channels();
  for (int y = 0; y < height; ++y) {
    const float* s = src.data().data() + (static_cast<std::size_t>(row + y) * src.width() + col) * ch;
    std::copy(s, s + static_cast<std::ptrdiff_t>(width) * ch, &out.at(y, 0, 0));
  }
  return out;
}

Image flip_horizontal(const Image& src) {
  Image out(src.width(), src.height(), src.channels());
  for (int y = 0; y < src.height(); ++y)
    for (int x = 0; x < src.width(); ++x)
      for (int c = 0; c < src.channels(); ++c)
        out.at(y, x, c) = src.at(y, src.width() - 1 - x, c);
  return out;
}

Image flip_vertical(const Image& src) {
  Image out(src.width(), src.height(), src.channels());
  for (int y = 0; y < src.height(); ++y)
    for (int x = 0; x < src.width(); ++x)
      for (int c = 0; c < src.channels(); ++c)
        out.at(y, x, c) = src.at(src.height() - 1 - y, x, c);
  return out;
}

Image resize_bilinear(const Image& src, int width, int height) {
  if (width == src.width() && height == src.height()) return src;
  // Pixel-center aligned scaling.
  Affine2 map;
  map.a00 = static_cast<double>(src.width()) / width;
  map.a11 = static_cast<double>(src.height()) / height;
  map.ox = 0.5 * map.a00 - 0.5;
  map.oy = 0.5 * map.a11 - 0.5;
  return warp(src, width, height, map);
}

Image average(const Image& a, const Image& b) {
  require_same_shape(a, b);
  Image out(a.width(), a.height(), a.channels());
  auto pa = a.data();
  auto pb = b.data();
  auto po = out.data();
  for (std::size_t i = 0; i < po.size(); ++i) po[i] = 0.5f * (pa[i] + pb[i]);
  return out;
}

double mean_abs_diff(const Image& a, const Image& b) {
  require_same_shape(a, b);
  auto pa = a.data();
  auto pb = b.data();
  double sum = 0.0;
  for (std::size_t i = 0; i < pa.size(); ++i) sum += std::abs(double(pa[i]) - pb[i]);
  return pa.empty() ? 0.0 : sum / pa.size();
}

double mean_squared_error(const Image& a, const Image& b) {
  require_same_shape(a, b);
  auto pa = a.data();
  auto pb = b.data();
  double sum = 0.0;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    const double d = double(pa[i]) - pb[i];
    sum += d * d;
  }
  return pa.empty() ? 0.0 : sum / pa.size();
}

double psnr(const Image& a, const Image& b) {
  const double mse = mean_squared_error(a, b);
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return -10.0 * std::log10(mse);
}

void clamp_unit(Image& image) {
  for (float& v : image.data()) v = std::clamp(v, 0.0f, 1.0f);
}

}  // namespace stabkit
