#include "stabkit/interp/global_shift.hpp"

#include <cmath>
#include <limits>

#include <opencv2/core.hpp>
#include <opencv2/imgproc.hpp>

#include "stabkit/core/error.hpp"
#include "stabkit/core/image_ops.hpp"

namespace stabkit::interp {

namespace {

// A near-perfect circular match shows up as a dominant peak without tapering.
constexpr double kCircularPeak = 0.9;

cv::Mat zero_mean_luma(const Image& frame, bool taper) {
  const Image luma = to_luma(frame);
  cv::Mat out(luma.height(), luma.width(), CV_64F);
  double mean = 0.0;
  for (float v : luma.data()) mean += v;
  mean /= static_cast<double>(luma.size());
  cv::Mat window = cv::Mat::ones(out.size(), CV_64F);
  if (taper) cv::createHanningWindow(window, out.size(), CV_64F);
  for (int y = 0; y < luma.height(); ++y) {
    double* row = out.ptr<double>(y);
    const double* w = window.ptr<double>(y);
    for (int x = 0; x < luma.width(); ++x) row[x] = (luma.at(y, x) - mean) * w[x];
  }
  return out;
}

cv::Mat correlation_surface(const Image& a, const Image& b, bool taper) {
  cv::Mat fa, fb, cross;
  cv::dft(zero_mean_luma(a, taper), fa, cv::DFT_COMPLEX_OUTPUT);
  cv::dft(zero_mean_luma(b, taper), fb, cv::DFT_COMPLEX_OUTPUT);
  cv::mulSpectrums(fb, fa, cross, 0, /*conjB=*/true);
  for (int y = 0; y < cross.rows; ++y) {
    auto* row = cross.ptr<cv::Vec2d>(y);
    for (int x = 0; x < cross.cols; ++x) {
      const double mag = std::hypot(row[x][0], row[x][1]);
      row[x] = mag > 1e-9 ? row[x] / mag : cv::Vec2d(0.0, 0.0);
    }
  }
  cv::Mat surface;
  cv::idft(cross, surface, cv::DFT_REAL_OUTPUT | cv::DFT_SCALE);
  return surface;
}

double surface_peak(const cv::Mat& surface) {
  double peak = -std::numeric_limits<double>::infinity();
  for (int y = 0; y < surface.rows; ++y)
    for (int x = 0; x < surface.cols; ++x) peak = std::max(peak, surface.at<double>(y, x));
  return peak;
}

}  // namespace

Shift estimate_global_shift(const Image& a, const Image& b) {
  if (!a.same_shape(b)) throw ShapeError("shift estimation needs equal shapes");
  if (a.width() < 8 || a.height() < 8) throw RangeError("frames smaller than 8x8");

  cv::Mat surface = correlation_surface(a, b, false);
  double peak = surface_peak(surface);
  if (peak < kCircularPeak) {
    // Frame borders bias the plain surface towards zero shift; taper them away.
    surface = correlation_surface(a, b, true);
    peak = surface_peak(surface);
  }

  const int w = surface.cols;
  const int h = surface.rows;
  Shift best;
  long long best_mag = std::numeric_limits<long long>::max();
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (surface.at<double>(y, x) < peak - 1e-9) continue;
      const int dx = x >= (w + 1) / 2 ? x - w : x;
      const int dy = y >= (h + 1) / 2 ? y - h : y;
      const long long mag = static_cast<long long>(dx) * dx + static_cast<long long>(dy) * dy;
      const bool better = mag < best_mag ||
                          (mag == best_mag && (dy < best.dy || (dy == best.dy && dx < best.dx)));
      if (better) {
        best = {dx, dy};
        best_mag = mag;
      }
    }
  }
  return best;
}

}  // namespace stabkit::interp
