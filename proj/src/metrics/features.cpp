#include "stabkit/metrics/features.hpp"

#include <algorithm>
#include <cmath>

#include <opencv2/imgproc.hpp>

#include "stabkit/core/error.hpp"
#include "stabkit/core/image_ops.hpp"

namespace stabkit::metrics {

namespace {

cv::Mat as_mat(const Image& luma) {
  cv::Mat m(luma.height(), luma.width(), CV_64F);
  for (int y = 0; y < luma.height(); ++y)
    for (int x = 0; x < luma.width(); ++x) m.at<double>(y, x) = luma.at(y, x);
  return m;
}

double bilinear(const cv::Mat& m, double x, double y) {
  x = std::clamp(x, 0.0, m.cols - 1.0);
  y = std::clamp(y, 0.0, m.rows - 1.0);
  const int x0 = static_cast<int>(x);
  const int y0 = static_cast<int>(y);
  const int x1 = std::min(x0 + 1, m.cols - 1);
  const int y1 = std::min(y0 + 1, m.rows - 1);
  const double fx = x - x0;
  const double fy = y - y0;
  return (m.at<double>(y0, x0) * (1 - fx) + m.at<double>(y0, x1) * fx) * (1 - fy) +
         (m.at<double>(y1, x0) * (1 - fx) + m.at<double>(y1, x1) * fx) * fy;
}

}  // namespace

std::vector<Keypoint> detect_corners(const Image& frame, const CornerOptions& options) {
  if (frame.width() < 16 || frame.height() < 16) {
    throw RangeError("corner detection needs frames of at least 16x16");
  }
  const cv::Mat luma = as_mat(to_luma(frame));
  cv::Mat ix, iy;
  cv::Sobel(luma, ix, CV_64F, 1, 0, 3, 1.0 / 8.0, 0.0, cv::BORDER_REPLICATE);
  cv::Sobel(luma, iy, CV_64F, 0, 1, 3, 1.0 / 8.0, 0.0, cv::BORDER_REPLICATE);
  cv::Mat ixx = ix.mul(ix), iyy = iy.mul(iy), ixy = ix.mul(iy);
  const cv::Size k(5, 5);
  cv::GaussianBlur(ixx, ixx, k, 1.0, 1.0, cv::BORDER_REPLICATE);
  cv::GaussianBlur(iyy, iyy, k, 1.0, 1.0, cv::BORDER_REPLICATE);
  cv::GaussianBlur(ixy, ixy, k, 1.0, 1.0, cv::BORDER_REPLICATE);

  cv::Mat response(luma.size(), CV_64F);
  double peak = 0.0;
  for (int y = 0; y < luma.rows; ++y) {
    for (int x = 0; x < luma.cols; ++x) {
      const double a = ixx.at<double>(y, x);
      const double b = iyy.at<double>(y, x);
      const double c = ixy.at<double>(y, x);
      const double r = a * b - c * c - 0.04 * (a + b) * (a + b);
      response.at<double>(y, x) = r;
      peak = std::max(peak, r);
    }
  }
  if (peak <= 1e-12) return {};

  const double floor_r = options.quality * peak;
  std::vector<Keypoint> candidates;
  const int border = std::max(options.border, 1);
  for (int y = border; y < luma.rows - border; ++y) {
    for (int x = border; x < luma.cols - border; ++x) {
      const double r = response.at<double>(y, x);
      if (r <= floor_r) continue;
      bool is_max = true;
      for (int dy = -1; dy <= 1 && is_max; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if ((dx || dy) && response.at<double>(y + dy, x + dx) > r) {
            is_max = false;
            break;
          }
        }
      if (is_max) candidates.push_back({x, y, r});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Keypoint& p, const Keypoint& q) {
    if (p.response != q.response) return p.response > q.response;
    if (p.y != q.y) return p.y < q.y;
    return p.x < q.x;
  });

  std::vector<Keypoint> kept;
  const double min_d2 = options.min_distance * options.min_distance;
  for (const Keypoint& c : candidates) {
    if (static_cast<int>(kept.size()) >= options.max_corners) break;
    const bool crowded = std::any_of(kept.begin(), kept.end(), [&](const Keypoint& k2) {
      const double dx = c.x - k2.x;
      const double dy = c.y - k2.y;
      return dx * dx + dy * dy < min_d2;
    });
    if (!crowded) kept.push_back(c);
  }
  return kept;
}

std::vector<Correspondence> match_corners(const Image& a, const Image& b,
                                          const std::vector<Keypoint>& keypoints,
                                          const MatchOptions& options) {
  if (!a.same_shape(b)) throw ShapeError("matching needs equal shapes");
  const cv::Mat la = as_mat(to_luma(a));
  const cv::Mat lb = as_mat(to_luma(b));
  const int r = options.patch_radius;
  const int side = 2 * r + 1;
  const int count = side * side;

  std::vector<Correspondence> matches;
  std::vector<double> tmpl(count);
  for (const Keypoint& kp : keypoints) {
    if (kp.x - r < 0 || kp.y - r < 0 || kp.x + r >= la.cols || kp.y + r >= la.rows) continue;
    double mean_t = 0.0;
    for (int dy = -r, i = 0; dy <= r; ++dy)
      for (int dx = -r; dx <= r; ++dx, ++i) mean_t += tmpl[i] = la.at<double>(kp.y + dy, kp.x + dx);
    mean_t /= count;
    double var_t = 0.0;
    for (double& v : tmpl) {
      v -= mean_t;
      var_t += v * v;
    }
    if (var_t < 1e-10) continue;

    double best = -2.0;
    int best_x = 0;
    int best_y = 0;
    for (int sy = -options.search_radius; sy <= options.search_radius; ++sy) {
      const int cy = kp.y + sy;
      if (cy - r < 0 || cy + r >= lb.rows) continue;
      for (int sx = -options.search_radius; sx <= options.search_radius; ++sx) {
        const int cx = kp.x + sx;
        if (cx - r < 0 || cx + r >= lb.cols) continue;
        double sum = 0.0, sum2 = 0.0, cross = 0.0;
        for (int dy = -r, i = 0; dy <= r; ++dy) {
          const double* row = lb.ptr<double>(cy + dy);
          for (int dx = -r; dx <= r; ++dx, ++i) {
            const double v = row[cx + dx];
            sum += v;
            sum2 += v * v;
            cross += v * tmpl[i];
          }
        }
        const double var_b = sum2 - sum * sum / count;
        if (var_b < 1e-10) continue;
        const double ncc = cross / std::sqrt(var_t * var_b);
        const bool closer = std::abs(sx) + std::abs(sy) < std::abs(best_x) + std::abs(best_y);
        if (ncc > best + 1e-12 || (std::abs(ncc - best) <= 1e-12 && closer)) {
          best = ncc;
          best_x = sx;
          best_y = sy;
        }
      }
    }
    if (best < options.min_ncc) continue;

    // Sub-pixel refinement: Gauss-Newton on SSD with a brightness offset.
    double ux = kp.x + best_x;
    double uy = kp.y + best_y;
    for (int it = 0; it < options.refine_iterations; ++it) {
      double h00 = 0, h01 = 0, h11 = 0, g0 = 0, g1 = 0, mean_res = 0;
      std::vector<double> res(count), gx(count), gy(count);
      for (int dy = -r, i = 0; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx, ++i) {
          const double px = ux + dx;
          const double py = uy + dy;
          res[i] = la.at<double>(kp.y + dy, kp.x + dx) - bilinear(lb, px, py);
          gx[i] = 0.5 * (bilinear(lb, px + 1, py) - bilinear(lb, px - 1, py));
          gy[i] = 0.5 * (bilinear(lb, px, py + 1) - bilinear(lb, px, py - 1));
          mean_res += res[i];
        }
      mean_res /= count;
      for (int i = 0; i < count; ++i) {
        const double e = res[i] - mean_res;
        h00 += gx[i] * gx[i];
        h01 += gx[i] * gy[i];
        h11 += gy[i] * gy[i];
        g0 += gx[i] * e;
        g1 += gy[i] * e;
      }
      const double det = h00 * h11 - h01 * h01;
      if (det < 1e-12) break;
      const double step_x = (h11 * g0 - h01 * g1) / det;
      const double step_y = (h00 * g1 - h01 * g0) / det;
      if (std::abs(step_x) > 1.0 || std::abs(step_y) > 1.0) break;
      ux += step_x;
      uy += step_y;
      if (std::abs(step_x) < 1e-4 && std::abs(step_y) < 1e-4) break;
    }
    if (std::abs(ux - (kp.x + best_x)) > 1.0 || std::abs(uy - (kp.y + best_y)) > 1.0) {
      ux = kp.x + best_x;
      uy = kp.y + best_y;
    }
    matches.push_back({{double(kp.x), double(kp.y)}, {ux, uy}, best});
  }
  return matches;
}

}  // namespace stabkit::metrics
