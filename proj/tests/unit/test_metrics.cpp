#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "stabkit/core/error.hpp"
#include "stabkit/core/image_ops.hpp"
#include "stabkit/interp/iterative.hpp"
#include "stabkit/metrics/report.hpp"
#include "stabkit/synth/synth.hpp"

using namespace stabkit;
using namespace stabkit::metrics;

namespace {

FrameSequence warp_all(const FrameSequence& seq, const Affine2& map) {
  std::vector<Image> frames;
  for (const Image& f : seq) {
    Image w = warp(f, f.width(), f.height(), map);
    clamp_unit(w);
    frames.push_back(std::move(w));
  }
  return FrameSequence(std::move(frames));
}

FrameSequence test_clip(std::size_t length, std::uint64_t seed) {
  const Image src = synth::make_source_image(256, 256, seed);
  return synth::render_crop_sequence(src, synth::gen_smooth_trajectory(length, 1.5, 0.002, seed),
                                     {128, 128});
}

std::vector<double> sinusoid(std::size_t n, double bin, double amp = 1.0) {
  std::vector<double> x(n);
  for (std::size_t t = 0; t < n; ++t) x[t] = amp * std::sin(2.0 * std::numbers::pi * bin * t / n);
  return x;
}

}  // namespace

TEST_CASE("corner detection") {
  SUBCASE("flat frame has no corners") { CHECK(detect_corners(Image(32, 32, 3, 0.5f)).empty()); }
  SUBCASE("single bright pixel") {
    Image img(32, 32, 3, 0.0f);
    for (int c = 0; c < 3; ++c) img.at(14, 17, c) = 1.0f;
    const auto corners = detect_corners(img);
    REQUIRE_FALSE(corners.empty());
    CHECK(std::abs(corners[0].x - 17) <= 1);
    CHECK(std::abs(corners[0].y - 14) <= 1);
  }
  SUBCASE("deterministic, ordered and suppressed") {
    const Image img = synth::make_source_image(160, 120, 4);
    const auto a = detect_corners(img);
    const auto b = detect_corners(img);
    REQUIRE(a.size() == b.size());
    CHECK(a.size() > 20);
    CHECK(a.size() <= 500);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].x == b[i].x);
      CHECK(a[i].y == b[i].y);
      if (i > 0) CHECK(a[i - 1].response >= a[i].response);
      for (std::size_t j = 0; j < i; ++j) {
        CHECK(std::hypot(a[i].x - a[j].x, a[i].y - a[j].y) >= 8.0);
      }
    }
  }
  SUBCASE("undersized frames") { CHECK_THROWS_AS(detect_corners(Image(15, 40, 3)), RangeError); }
}

TEST_CASE("corner matching") {
  const Image img = synth::make_source_image(128, 128, 6);
  const auto corners = detect_corners(img);

  SUBCASE("identical frames match with zero displacement") {
    const auto matches = match_corners(img, img, corners);
    CHECK(matches.size() > 10);
    for (const auto& m : matches) {
      CHECK(m.b.x == m.a.x);
      CHECK(m.b.y == m.a.y);
    }
  }
  SUBCASE("a (3,2) shift is recovered") {
    const auto matches = match_corners(img, translate(img, 3.0, 2.0), corners);
    REQUIRE(matches.size() > 10);
    std::vector<double> dx, dy;
    for (const auto& m : matches) {
      dx.push_back(m.b.x - m.a.x);
      dy.push_back(m.b.y - m.a.y);
    }
    std::nth_element(dx.begin(), dx.begin() + dx.size() / 2, dx.end());
    std::nth_element(dy.begin(), dy.begin() + dy.size() / 2, dy.end());
    CHECK(dx[dx.size() / 2] == doctest::Approx(3.0).epsilon(0.01));
    CHECK(dy[dy.size() / 2] == doctest::Approx(2.0).epsilon(0.01));
  }
  SUBCASE("sub-pixel shifts") {
    const auto matches = match_corners(img, translate(img, 1.3, -0.6), corners);
    REQUIRE(matches.size() > 10);
    double ex = 0.0, ey = 0.0;
    for (const auto& m : matches) {
      ex += m.b.x - m.a.x;
      ey += m.b.y - m.a.y;
    }
    CHECK(ex / matches.size() == doctest::Approx(1.3).epsilon(0.05));
    CHECK(ey / matches.size() == doctest::Approx(-0.6).epsilon(0.05));
  }
  SUBCASE("textureless target") {
    CHECK(match_corners(img, Image(128, 128, 3, 0.3f), corners).size() <= 2);
  }
}

TEST_CASE("RANSAC homography") {
  SUBCASE("identity correspondences") {
    std::vector<Correspondence> pairs;
    for (int i = 0; i < 12; ++i) {
      const Point2 p{10.0 * (i % 4) + 3.0 * i, 7.0 * (i / 4) + 1.5 * i * i};
      pairs.push_back({p, p, 1.0});
    }
    const HomographyFit fit = estimate_homography_ransac(pairs);
    CHECK((fit.h.m - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(fit.inlier_count == pairs.size());
  }
  SUBCASE("fewer than four pairs") {
    std::vector<Correspondence> pairs(3);
    CHECK_THROWS_AS(estimate_homography_ransac(pairs), InsufficientDataError);
  }
  SUBCASE("collinear support") {
    std::vector<Correspondence> pairs;
    for (int i = 0; i < 10; ++i) pairs.push_back({{1.0 * i, 2.0 * i}, {1.0 * i, 2.0 * i}, 1.0});
    CHECK_THROWS_AS(estimate_homography_ransac(pairs), DegeneracyError);
  }
  SUBCASE("similarity with 20% outliers") {
    int recovered = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      std::mt19937_64 rng(seed + 1000);
      std::uniform_real_distribution<double> coord(0.0, 256.0);
      std::uniform_real_distribution<double> angle(-0.5, 0.5);
      std::uniform_real_distribution<double> shift(-20.0, 20.0);
      std::uniform_real_distribution<double> zoom(0.8, 1.25);
      std::normal_distribution<double> noise(0.0, 0.1);
      const Homography truth = homography_from_pose(shift(rng), shift(rng), angle(rng), zoom(rng));
      std::vector<Correspondence> pairs;
      std::vector<bool> is_inlier;
      for (int i = 0; i < 100; ++i) {
        const Point2 a{coord(rng), coord(rng)};
        Point2 b = truth.apply(a);
        const bool outlier = i % 5 == 0;
        if (outlier) {
          b = {coord(rng), coord(rng)};
        } else {
          b.x += noise(rng);
          b.y += noise(rng);
        }
        pairs.push_back({a, b, 1.0});
        is_inlier.push_back(!outlier);
      }
      RansacOptions options;
      options.seed = seed;
      const HomographyFit fit = estimate_homography_ransac(pairs, options);
      double worst = 0.0;
      for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (!is_inlier[i]) continue;
        const Point2 p = fit.h.apply(pairs[i].a);
        const Point2 q = truth.apply(pairs[i].a);
        worst = std::max(worst, std::hypot(p.x - q.x, p.y - q.y));
      }
      recovered += worst < 0.5;
    }
    CHECK(recovered >= 99);
  }
}

TEST_CASE("homography decomposition") {
  SUBCASE("identity") {
    const auto d = decompose_homography(Homography{});
    CHECK(d.tx == 0.0);
    CHECK(d.ty == 0.0);
    CHECK(d.theta == 0.0);
    CHECK(d.scale == doctest::Approx(1.0));
    CHECK(d.anisotropy == doctest::Approx(1.0));
  }
  SUBCASE("pure rotation") {
    const auto d = decompose_homography(homography_from_pose(0, 0, 0.3));
    CHECK(d.theta == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(d.scale == doctest::Approx(1.0));
    CHECK(d.anisotropy == doctest::Approx(1.0));
  }
  SUBCASE("axis scaling") {
    Homography h;
    h.m(1, 1) = 0.8;
    const auto d = decompose_homography(h);
    CHECK(d.anisotropy == doctest::Approx(0.8));
    CHECK(d.scale == doctest::Approx(std::sqrt(0.8)));
    CHECK(d.theta == doctest::Approx(0.0));
  }
  SUBCASE("pose round-trip for similarities") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 200; ++i) {
      const double tx = 50 * u(rng), ty = 50 * u(rng), th = 3.0 * u(rng), s = 1.0 + 0.5 * u(rng);
      const auto d = decompose_homography(homography_from_pose(tx, ty, th, s));
      CHECK(std::abs(d.tx - tx) < 1e-9);
      CHECK(std::abs(d.ty - ty) < 1e-9);
      CHECK(std::abs(d.theta - th) < 1e-9);
      CHECK(std::abs(d.scale - s) < 1e-9);
    }
  }
  SUBCASE("singular affine part") {
    Homography h;
    h.m(1, 1) = 0.0;
    h.m(1, 0) = 0.0;
    CHECK_THROWS_AS(decompose_homography(h), DegeneracyError);
  }
}

TEST_CASE("trajectory estimation") {
  SUBCASE("static sequence") {
    const FrameSequence still(std::vector<Image>(5, synth::make_source_image(96, 96, 2)));
    const auto est = chain_trajectory(still);
    for (std::size_t t = 0; t < 5; ++t) {
      CHECK(std::abs(est.trajectory.tx[t]) < 1e-9);
      CHECK(std::abs(est.trajectory.ty[t]) < 1e-9);
      CHECK(std::abs(est.trajectory.theta[t]) < 1e-9);
    }
  }
  SUBCASE("recovers a rendered ground-truth path") {
    const Image src = synth::make_source_image(256, 256, 9);
    const auto pair = synth::make_stab_pair(src, 24, {128, 128}, synth::JitterSpec{}, 2);
    const Trajectory& gt = pair.unstable_traj;
    const auto est = chain_trajectory(pair.unstable);
    const double c0 = std::cos(gt.theta[0]);
    const double s0 = std::sin(gt.theta[0]);
    for (std::size_t t = 0; t < gt.size(); ++t) {
      // Ground truth relative to frame 0, in frame-0 axes.
      const double dx = gt.tx[t] - gt.tx[0];
      const double dy = gt.ty[t] - gt.ty[0];
      CHECK(std::abs(est.trajectory.tx[t] - (c0 * dx + s0 * dy)) < 0.5);
      CHECK(std::abs(est.trajectory.ty[t] - (-s0 * dx + c0 * dy)) < 0.5);
      CHECK(std::abs(est.trajectory.theta[t] - (gt.theta[t] - gt.theta[0])) < 0.01);
    }
  }
  SUBCASE("anchored estimate reproduces the reference path") {
    const Image src = synth::make_source_image(256, 256, 10);
    const auto pair = synth::make_stab_pair(src, 16, {128, 128}, synth::JitterSpec{}, 6);
    const auto est = anchored_trajectory(pair.stable, pair.stable_traj, pair.unstable);
    for (std::size_t t = 0; t < 16; ++t) {
      CHECK(std::abs(est.trajectory.tx[t] - pair.unstable_traj.tx[t]) < 0.25);
      CHECK(std::abs(est.trajectory.ty[t] - pair.unstable_traj.ty[t]) < 0.25);
      CHECK(std::abs(est.trajectory.theta[t] - pair.unstable_traj.theta[t]) < 3e-3);
    }
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(chain_trajectory(FrameSequence({synth::make_source_image(64, 64, 1)})), RangeError);
    const FrameSequence flat(std::vector<Image>(3, Image(64, 64, 3, 0.5f)));
    CHECK_THROWS_AS(chain_trajectory(flat), TrackingError);
    TrackingOptions bridge;
    bridge.bridge_failures = true;
    const auto est = chain_trajectory(flat, bridge);
    CHECK(est.failed_frames == std::vector<std::size_t>{1, 2});
    CHECK(est.trajectory.tx[2] == 0.0);
  }
}

TEST_CASE("stability score") {
  const std::size_t n = 64;
  SUBCASE("constant trajectory scores 1 by convention") {
    Trajectory traj(n);
    for (auto& v : traj.tx) v = 3.0;
    const auto s = stability_score(traj);
    CHECK(s.translation == 1.0);
    CHECK(s.rotation == 1.0);
    CHECK(s.final_score == 1.0);
  }
  SUBCASE("low-band sinusoid") {
    Trajectory traj(n);
    traj.tx = sinusoid(n, 3, 5.0);
    const auto s = stability_score(traj);
    CHECK(s.translation == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(s.final_score == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("high-band sinusoid") {
    Trajectory traj(n);
    traj.tx = sinusoid(n, 20, 5.0);
    CHECK(stability_score(traj).translation < 0.05);
  }
  SUBCASE("short trajectories") { CHECK_THROWS_AS(stability_score(Trajectory(7)), RangeError); }
  SUBCASE("DC invariance and min rule on random trajectories") {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_int_distribution<int> len(8, 200);
    for (int i = 0; i < 300; ++i) {
      Trajectory traj(len(rng));
      for (std::size_t t = 0; t < traj.size(); ++t) {
        traj.tx[t] = g(rng);
        traj.ty[t] = g(rng) + 0.1 * t;
        traj.theta[t] = 0.01 * g(rng);
      }
      const auto s = stability_score(traj);
      CHECK(s.final_score == std::min(s.translation, s.rotation));
      CHECK(s.translation == std::min(s.tx, s.ty));
      CHECK(s.final_score >= 0.0);
      CHECK(s.final_score <= 1.0);
      Trajectory offset = traj;
      for (auto& v : offset.tx) v += 17.0;
      for (auto& v : offset.theta) v -= 0.4;
      const auto o = stability_score(offset);
      CHECK(o.tx == doctest::Approx(s.tx).epsilon(1e-9));
      CHECK(o.rotation == doctest::Approx(s.rotation).epsilon(1e-9));
    }
  }
  SUBCASE("damping consistency with the trajectory oracle") {
    Trajectory traj(n);
    // Sine modes vanishing at both ends pass through the fixed-end oracle without leakage.
    const double step = std::numbers::pi / static_cast<double>(n - 1);
    for (std::size_t t = 0; t < n; ++t)
      traj.tx[t] = std::sin(6 * step * t) + std::sin(20 * step * t);
    double previous = -1.0;
    for (int m = 0; m <= 5; ++m) {
      const double s = stability_score(interp::trajectory_smooth_oracle(traj, m)).final_score;
      CHECK(s > previous);
      previous = s;
    }
  }
  SUBCASE("energy spectrum option") {
    Trajectory traj(n);
    traj.tx = sinusoid(n, 3, 1.0);
    const auto hi = sinusoid(n, 12, 1.0);
    for (std::size_t t = 0; t < n; ++t) traj.tx[t] += hi[t];
    CHECK(stability_score(traj, SpectrumKind::Magnitude).tx == doctest::Approx(0.5));
    CHECK(stability_score(traj, SpectrumKind::Energy).tx == doctest::Approx(0.5));
  }
}

TEST_CASE("distortion and cropping") {
  const FrameSequence clip = test_clip(5, 41);

  SUBCASE("identity") {
    CHECK(distortion_score(clip, clip).value == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(cropping_score(clip, clip).value == doctest::Approx(1.0).epsilon(1e-3));
  }
  SUBCASE("anisotropic squeeze") {
    Affine2 squeeze;
    squeeze.a11 = 1.0 / 0.8;
    squeeze.oy = 63.5 - 63.5 / 0.8;
    const auto d = distortion_score(clip, warp_all(clip, squeeze));
    CHECK(d.failed_frames.empty());
    CHECK(d.value == doctest::Approx(0.8).epsilon(0.025));
  }
  SUBCASE("rigid rotation is isotropic") {
    const double th = 0.2;
    Affine2 rot;
    rot.a00 = std::cos(th);
    rot.a01 = std::sin(th);
    rot.a10 = -std::sin(th);
    rot.a11 = std::cos(th);
    rot.ox = 63.5 - rot.a00 * 63.5 - rot.a01 * 63.5;
    rot.oy = 63.5 - rot.a10 * 63.5 - rot.a11 * 63.5;
    const auto d = distortion_score(clip, warp_all(clip, rot));
    CHECK(d.value == doctest::Approx(1.0).epsilon(0.02));
  }
  SUBCASE("centred 90% crop upscaled") {
    Affine2 zoom;
    zoom.a00 = zoom.a11 = 0.9;
    zoom.ox = zoom.oy = 63.5 - 0.9 * 63.5;
    const auto c = cropping_score(clip, warp_all(clip, zoom));
    CHECK(c.value == doctest::Approx(0.9).epsilon(0.02));
  }
  SUBCASE("length mismatch") {
    const FrameSequence shorter(std::vector<Image>(clip.frames().begin(), clip.frames().end() - 1));
    CHECK_THROWS_AS(distortion_score(clip, shorter), ValidationError);
  }
}

TEST_CASE("evaluation report") {
  const Image src = synth::make_source_image(256, 256, 77);
  const auto pair = synth::make_stab_pair(src, 32, {128, 128}, synth::JitterSpec{}, 3);

  SUBCASE("identity evaluation") {
    const MetricsReport r = evaluate(pair.unstable, pair.unstable, 0.0);
    CHECK(r.distortion == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(r.cropping == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(r.runtime_ms_per_frame == 0.0);
    CHECK(r.stability == std::min(r.stability_t, r.stability_theta));
    CHECK(r.frames_failed == 0);
    CHECK(r.frames_evaluated == 32);
  }
  SUBCASE("stable output scores higher than the shaky input") {
    const MetricsReport stable = evaluate(pair.unstable, pair.stable, 0.0);
    const MetricsReport shaky = evaluate(pair.unstable, pair.unstable, 0.0);
    CHECK(stable.stability > shaky.stability);
  }
  SUBCASE("ground-truth trajectories") {
    EvaluateOptions options;
    options.source = TrajectorySource::GroundTruth;
    options.ground_truth = pair.stable_traj;
    const MetricsReport r = evaluate(pair.unstable, pair.stable, 1.5, options);
    CHECK(r.stability == doctest::Approx(stability_score(pair.stable_traj).final_score));
    options.ground_truth = Trajectory(3);
    CHECK_THROWS_AS(evaluate(pair.unstable, pair.stable, 1.5, options), ValidationError);
  }
  SUBCASE("JSON round-trip") {
    MetricsReport r;
    r.stability = 0.123456789012345;
    r.stability_t = 0.5;
    r.stability_theta = 0.123456789012345;
    r.distortion = 0.97;
    r.cropping = 1.0 / 3.0;
    r.runtime_ms_per_frame = 12.75;
    r.frames_evaluated = 30;
    r.frames_failed = 2;
    r.method = "iterative";
    const nlohmann::json j = r;
    CHECK(nlohmann::json::parse(j.dump()).get<MetricsReport>() == r);
    CHECK(j.size() == 9);
  }
}
