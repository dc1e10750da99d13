#include <cmath>
#include <random>

#include <opencv2/imgproc.hpp>

#include "stabkit/core/error.hpp"
#include "stabkit/core/image_ops.hpp"
#include "stabkit/interp/iterative.hpp"
#include "stabkit/synth/synth.hpp"

namespace stabkit::synth {

void window_to_source(const Image& image, WindowSize window, double tx, double ty,
                      double theta, double x, double y, double& sx, double& sy) {
  const double px = x - 0.5 * (window.width - 1);
  const double py = y - 0.5 * (window.height - 1);
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  sx = 0.5 * (image.width() - 1) + tx + c * px - s * py;
  sy = 0.5 * (image.height() - 1) + ty + s * px + c * py;
}

FrameSequence render_crop_sequence(const Image& image, const Trajectory& traj,
                                   WindowSize window) {
  traj.validate();
  if (image.channels() != 3) throw ShapeError("source image must be RGB");
  if (window.width <= 0 || window.height <= 0) throw RangeError("empty window");

  const double max_x = image.width() - 1;
  const double max_y = image.height() - 1;
  std::vector<Image> frames;
  frames.reserve(traj.size());
  for (std::size_t t = 0; t < traj.size(); ++t) {
    const double corners[4][2] = {{0.0, 0.0},
                                  {window.width - 1.0, 0.0},
                                  {0.0, window.height - 1.0},
                                  {window.width - 1.0, window.height - 1.0}};
    for (const auto& corner : corners) {
      double sx = 0.0;
      double sy = 0.0;
      window_to_source(image, window, traj.tx[t], traj.ty[t], traj.theta[t], corner[0],
                       corner[1], sx, sy);
      if (sx < 0.0 || sy < 0.0 || sx > max_x || sy > max_y) {
        throw RangeError("crop window leaves the source image at frame " + std::to_string(t));
      }
    }
    const double c = std::cos(traj.theta[t]);
    const double s = std::sin(traj.theta[t]);
    Affine2 map;
    map.a00 = c;
    map.a01 = -s;
    map.a10 = s;
    map.a11 = c;
    window_to_source(image, window, traj.tx[t], traj.ty[t], traj.theta[t], 0.0, 0.0,
                     map.ox, map.oy);
    Image frame = warp(image, window.width, window.height, map);
    clamp_unit(frame);
    frames.push_back(std::move(frame));
  }
  return FrameSequence(std::move(frames));
}

StabPair make_stab_pair(const Image& image, std::size_t length, WindowSize window,
                        const JitterSpec& jitter, std::uint64_t seed,
                        const MotionSpec& motion) {
  Trajectory smooth = gen_smooth_trajectory(length, motion.speed_px, motion.turn_rate, seed);
  JitterSpec seeded = jitter;
  seeded.seed = jitter.seed ^ (seed * 0x9E3779B97F4A7C15ULL + 1);
  Trajectory shaky = inject_jitter(smooth, seeded);
  FrameSequence stable = render_crop_sequence(image, smooth, window);
  FrameSequence unstable = render_crop_sequence(image, shaky, window);
  return {std::move(unstable), std::move(stable), std::move(shaky), std::move(smooth)};
}

RefinerClip make_refiner_clip(const Image& image, std::size_t length, WindowSize window,
                              const DegradeSettings& degrade, std::uint64_t seed,
                              double speed_px) {
  if (length < 5) throw RangeError("refiner samples need >= 5 frames");
  Trajectory path = gen_linear_trajectory(length, speed_px, seed);
  FrameSequence clean = render_crop_sequence(image, path, window);
  interp::StabilizeConfig cfg;
  cfg.m = degrade.iterations;
  cfg.k = 1;
  cfg.skip = degrade.skip;
  FrameSequence degraded =
      degrade.iterations == 0 ? clean
                              : interp::iterative_stabilize(clean, degrade.interpolator,
                                                            nullptr, cfg);
  return {std::move(clean), std::move(degraded), std::move(path)};
}

std::vector<RefinerSample> refiner_samples_from(const RefinerClip& clip) {
  const FrameSequence& clean = clip.clean;
  if (clean.size() < 5 || clip.degraded.size() != clean.size())
    throw RangeError("refiner samples need >= 5 aligned frames");
  std::vector<RefinerSample> samples;
  for (std::size_t t = 2; t + 2 < clean.size(); ++t) {
    samples.push_back({{clean[t - 2], clean[t - 1], clean[t + 1], clean[t + 2]},
                       clip.degraded[t],
                       clean[t]});
  }
  return samples;
}

std::vector<RefinerSample> make_refiner_samples(const Image& image, std::size_t length,
                                                WindowSize window,
                                                const DegradeSettings& degrade,
                                                std::uint64_t seed, double speed_px) {
  return refiner_samples_from(make_refiner_clip(image, length, window, degrade, seed, speed_px));
}

Image make_source_image(int width, int height, std::uint64_t seed) {
  if (width < 8 || height < 8) throw RangeError("source image too small");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto color = [&] { return cv::Scalar(unit(rng), unit(rng), unit(rng)); };

  cv::Mat canvas(height, width, CV_32FC3);
  const cv::Scalar c0 = color();
  const cv::Scalar c1 = color();
  for (int y = 0; y < height; ++y) {
    auto* row = canvas.ptr<cv::Vec3f>(y);
    for (int x = 0; x < width; ++x) {
      const double a = 0.5 + 0.25 * std::sin(0.021 * x + 0.6) + 0.25 * std::cos(0.017 * y);
      for (int c = 0; c < 3; ++c) row[x][c] = static_cast<float>(c0[c] * a + c1[c] * (1.0 - a));
    }
  }

  const int shapes = std::max(24, width * height / 700);
  for (int i = 0; i < shapes; ++i) {
    const cv::Point2f center(static_cast<float>(unit(rng) * width),
                             static_cast<float>(unit(rng) * height));
    const cv::Size2f size(static_cast<float>(6 + unit(rng) * 34),
                          static_cast<float>(6 + unit(rng) * 34));
    const float angle = static_cast<float>(unit(rng) * 180.0);
    const cv::Scalar fill = color();
    if (unit(rng) < 0.55) {
      cv::Point2f pts[4];
      cv::RotatedRect(center, size, angle).points(pts);
      cv::Point poly[4];
      for (int k = 0; k < 4; ++k) poly[k] = cv::Point(cvRound(pts[k].x * 16), cvRound(pts[k].y * 16));
      cv::fillConvexPoly(canvas, poly, 4, fill, cv::LINE_AA, 4);
    } else {
      cv::ellipse(canvas, cv::RotatedRect(center, size, angle), fill, cv::FILLED, cv::LINE_AA);
    }
  }
  cv::GaussianBlur(canvas, canvas, cv::Size(0, 0), 1.2, 1.2, cv::BORDER_REFLECT);

  Image out(width, height, 3);
  for (int y = 0; y < height; ++y) {
    const auto* row = canvas.ptr<cv::Vec3f>(y);
    for (int x = 0; x < width; ++x)
      for (int c = 0; c < 3; ++c) out.at(y, x, c) = row[x][c];
  }
  clamp_unit(out);
  return out;
}

}  // namespace stabkit::synth
