#pragma once


#include "stabkit/core/image.hpp"

namespace stabkit {

// 2-D affine map applied to output pixel coordinates to obtain source
// coordinates: src = linear * dst + offset.
struct Affine2 {
  double a00 = 1, a01 = 0, a10 = 0, a11 = 1;
  double ox = 0, oy = 0;
};

// Bilinear lookup with edge clamping. Writes image.channels() values.
void sample_bilinear(const Image& image, double x, double y, float* out);

// Resamples `src` into a width x height image; each output pixel (x, y)
// reads src at map(x, y). Out-of-range lookups are edge-clamped.
Image warp(const Image& src, int width, int height, const Affine2& map);

// Shifts content by (dx, dy): out(x, y) = src(x - dx, y - dy).
Image translate(const Image& src, double dx, double dy);

// Rec.601 luma of an RGB image; single-channel images are returned as is.
Image to_luma(const Image& src);

Image crop(const Image& src, int row, int col, int height, int width);
Image flip_horizontal(const Image& src);
Image flip_vertical(const Image& src);
Image resize_bilinear(const Image& src, int width, int height);

// Elementwise helpers.
Image average(const Image& a, const Image& b);
double mean_abs_diff(const Image& a, const Image& b);
double mean_squared_error(const Image& a, const Image& b);
// Peak signal-to-noise ratio for unit peak; +inf for identical images.
double psnr(const Image& a, const Image& b);

void clamp_unit(Image& image);

}  // namespace stabkit
