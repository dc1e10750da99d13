#include <doctest.h>

#include <cmath>
#include <numbers>

#include "stabkit/core/error.hpp"
#include "stabkit/core/image_ops.hpp"
#include "stabkit/interp/global_shift.hpp"
#include "stabkit/interp/interpolator.hpp"
#include "stabkit/interp/iterative.hpp"
#include "stabkit/metrics/motion.hpp"
#include "stabkit/metrics/spectrum.hpp"
#include "stabkit/synth/synth.hpp"
#include "test_helpers.hpp"

using namespace stabkit;
using namespace stabkit::interp;

namespace {

Image circular_shift(const Image& src, int dx, int dy) {
  Image out(src.width(), src.height(), src.channels());
  const int w = src.width();
  const int h = src.height();
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < src.channels(); ++c)
        out.at(y, x, c) = src.at(((y - dy) % h + h) % h, ((x - dx) % w + w) % w, c);
  return out;
}

double interior_mad(const Image& a, const Image& b, int margin) {
  double sum = 0.0;
  int count = 0;
  for (int y = margin; y < a.height() - margin; ++y)
    for (int x = margin; x < a.width() - margin; ++x)
      for (int c = 0; c < 3; ++c) {
        sum += std::abs(a.at(y, x, c) - b.at(y, x, c));
        ++count;
      }
  return sum / count;
}

}  // namespace

TEST_CASE("global shift: identity, circular shifts and flat frames") {
  const Image img = synth::make_source_image(96, 80, 11);
  CHECK(estimate_global_shift(img, img) == Shift{0, 0});
  CHECK(estimate_global_shift(img, circular_shift(img, 5, -3)) == Shift{5, -3});
  for (auto [dx, dy] : {std::pair{-7, 2}, {0, 6}, {4, 4}, {-3, -8}, {1, 0}}) {
    CHECK(estimate_global_shift(img, circular_shift(img, dx, dy)) == Shift{dx, dy});
  }
  const Image flat(32, 32, 3, 0.4f);
  CHECK(estimate_global_shift(flat, flat) == Shift{0, 0});
  CHECK(estimate_global_shift(flat, Image(32, 32, 3, 0.9f)) == Shift{0, 0});
  CHECK_THROWS_AS(estimate_global_shift(Image(7, 16, 3), Image(7, 16, 3)), RangeError);
}

TEST_CASE("builtin interpolator") {
  const Image img = synth::make_source_image(96, 96, 5);

  SUBCASE("equal inputs are returned unchanged") { CHECK(builtin_interp(img, img) == img); }

  SUBCASE("midpoint of a two pixel translation") {
    const Image next = translate(img, 2.0, 0.0);
    const Image mid = builtin_interp(img, next);
    // Brute-force oracle: the frame half way along the motion.
    const Image expected = translate(img, 1.0, 0.0);
    CHECK(interior_mad(mid, expected, 4) < 0.02);
  }

  SUBCASE("pose of the synthesized frame on a stabilization pair") {
    const Image source = synth::make_source_image(256, 256, 21);
    const synth::StabPair pair =
        synth::make_stab_pair(source, 16, {128, 128}, synth::JitterSpec{}, 3);
    const std::size_t t = 8;
    const Image mid = builtin_interp(pair.unstable[t - 1], pair.unstable[t + 1]);
    // Register the interpolated frame on frame t-1 and compare with the
    // ground-truth half-way pose expressed in frame t-1 coordinates.
    const auto fit = metrics::fit_frame_homography(mid, pair.unstable[t - 1]);
    REQUIRE(fit);
    const auto rel = metrics::decompose_homography(metrics::recenter(fit->h, 63.5, 63.5));
    const Trajectory& gt = pair.unstable_traj;
    const double mx = 0.5 * (gt.tx[t - 1] + gt.tx[t + 1]) - gt.tx[t - 1];
    const double my = 0.5 * (gt.ty[t - 1] + gt.ty[t + 1]) - gt.ty[t - 1];
    const double c = std::cos(gt.theta[t - 1]);
    const double s = std::sin(gt.theta[t - 1]);
    const double ex = c * mx + s * my;
    const double ey = -s * mx + c * my;
    CHECK(std::hypot(rel.tx - ex, rel.ty - ey) < 0.5);
  }
}

TEST_CASE("iterative stabilization contracts") {
  const FrameSequence seq = test::random_sequence(9, 16, 16, 4);

  SUBCASE("m = 0 is the identity") {
    StabilizeConfig cfg;
    cfg.m = 0;
    CHECK(iterative_stabilize(seq, builtin_interp, nullptr, cfg) == seq);
  }
  SUBCASE("static sequences are fixed points") {
    const FrameSequence still(std::vector<Image>(7, synth::make_source_image(32, 32, 2)));
    for (int m : {1, 3, 5}) {
      StabilizeConfig cfg;
      cfg.m = m;
      CHECK(iterative_stabilize(still, builtin_interp, nullptr, cfg) == still);
    }
  }
  SUBCASE("boundary frames pass through and length is preserved") {
    for (int skip : {1, 2}) {
      StabilizeConfig cfg;
      cfg.m = 3;
      cfg.skip = skip;
      const FrameSequence out = iterative_stabilize(seq, builtin_interp, nullptr, cfg);
      CHECK(out.size() == seq.size());
      CHECK(out.width() == seq.width());
      for (int i = 0; i < skip; ++i) {
        CHECK(out[i] == seq[i]);
        CHECK(out[seq.size() - 1 - i] == seq[seq.size() - 1 - i]);
      }
    }
  }
  SUBCASE("Jacobi update uses the previous iterate") {
    // With an averaging interpolator one iteration is exactly a 3-tap filter.
    const Interpolator mean_interp = [](const Image& a, const Image& b) { return average(a, b); };
    StabilizeConfig cfg;
    cfg.m = 1;
    const FrameSequence out = iterative_stabilize(seq, mean_interp, nullptr, cfg);
    for (std::size_t t = 1; t + 1 < seq.size(); ++t) CHECK(out[t] == average(seq[t - 1], seq[t + 1]));
  }
  SUBCASE("k = 4, m = 5 refines once, after iteration 4") {
    int calls = 0;
    int interp_calls = 0;
    std::vector<int> interp_calls_at_refine;
    const Interpolator counting = [&](const Image& a, const Image& b) {
      ++interp_calls;
      return average(a, b);
    };
    const Refiner refiner = [&](const std::array<Image, 4>& neighbors, const Image& current) {
      ++calls;
      interp_calls_at_refine.push_back(interp_calls);
      CHECK(neighbors[0].same_shape(current));
      return current;
    };
    StabilizeConfig cfg;  // defaults k = 4, m = 5
    CHECK(cfg.k == 4);
    CHECK(cfg.m == 5);
    iterative_stabilize(seq, counting, &refiner, cfg);
    const int interior = static_cast<int>(seq.size()) - 2;
    CHECK(calls == interior);  // one pass over the interior frames
    for (int at : interp_calls_at_refine) CHECK(at == 4 * interior);
    CHECK(interp_calls == 5 * interior);
  }
  SUBCASE("refiner receives the original unstable neighbours") {
    StabilizeConfig cfg;
    cfg.m = 2;
    cfg.k = 1;
    const Refiner check = [&](const std::array<Image, 4>& neighbors, const Image& current) {
      bool found = false;
      for (std::size_t t = 0; t < seq.size(); ++t) {
        const long long i = static_cast<long long>(t);
        if (neighbors[0] == seq[clamp_index(i - 2, seq.size())] &&
            neighbors[1] == seq[clamp_index(i - 1, seq.size())] &&
            neighbors[2] == seq[clamp_index(i + 1, seq.size())] &&
            neighbors[3] == seq[clamp_index(i + 2, seq.size())]) {
          found = true;
        }
      }
      CHECK(found);
      return current;
    };
    iterative_stabilize(seq, builtin_interp, &check, cfg);
  }
  SUBCASE("errors") {
    const FrameSequence two = test::random_sequence(2, 16, 16, 1);
    CHECK_THROWS_AS(iterative_stabilize(two, builtin_interp, nullptr, {}), RangeError);
    StabilizeConfig bad;
    bad.k = 0;
    CHECK_THROWS_AS(iterative_stabilize(seq, builtin_interp, nullptr, bad), ConfigError);
  }
}

TEST_CASE("trajectory oracle") {
  SUBCASE("affine trajectories are fixed points") {
    Trajectory ramp(20);
    for (std::size_t t = 0; t < 20; ++t) {
      ramp.tx[t] = 3.0 + 0.5 * t;
      ramp.ty[t] = -1.0 * t;
      ramp.theta[t] = 0.01 * t;
    }
    for (int m : {1, 4, 9}) {
      const Trajectory out = trajectory_smooth_oracle(ramp, m);
      for (std::size_t t = 0; t < 20; ++t) {
        CHECK(out.tx[t] == doctest::Approx(ramp.tx[t]).epsilon(1e-12));
        CHECK(out.ty[t] == doctest::Approx(ramp.ty[t]).epsilon(1e-12));
        CHECK(out.theta[t] == doctest::Approx(ramp.theta[t]).epsilon(1e-12));
      }
    }
  }
  SUBCASE("sinusoid damping law away from the boundaries") {
    const std::size_t n = 64;
    for (double w : {std::numbers::pi / 8, std::numbers::pi / 4, std::numbers::pi / 3,
                     std::numbers::pi / 2, 2.0, 2.9}) {
      Trajectory traj(n);
      for (std::size_t t = 0; t < n; ++t) traj.tx[t] = std::sin(w * t);
      for (int m = 0; m <= 6; ++m) {
        const Trajectory out = trajectory_smooth_oracle(traj, m);
        const double factor = std::pow(std::cos(w), m);
        for (std::size_t t = m; t + m < n; ++t) {
          CHECK(std::abs(out.tx[t] - factor * std::sin(w * t)) < 1e-9);
        }
      }
    }
  }
  SUBCASE("w = pi/3, m = 5 gives a factor of 1/32") {
    Trajectory traj(40);
    for (std::size_t t = 0; t < 40; ++t) traj.ty[t] = std::sin(std::numbers::pi / 3 * t);
    const Trajectory out = trajectory_smooth_oracle(traj, 5);
    for (std::size_t t = 5; t < 35; ++t) {
      CHECK(std::abs(out.ty[t] - 0.03125 * traj.ty[t]) < 1e-9);
    }
  }
  SUBCASE("w = pi/2, m = 1 annihilates the interior") {
    Trajectory traj(16);
    for (std::size_t t = 0; t < 16; ++t) traj.theta[t] = std::sin(std::numbers::pi / 2 * t);
    const Trajectory out = trajectory_smooth_oracle(traj, 1);
    for (std::size_t t = 1; t < 15; ++t) CHECK(std::abs(out.theta[t]) < 1e-12);
  }
}

TEST_CASE("iterative stabilization raises ground-truth stability for m = 1..5") {
  const Image source = synth::make_source_image(256, 256, 101);
  const synth::StabPair pair = synth::make_stab_pair(source, 64, {128, 128}, synth::JitterSpec{}, 17);
  const double before = metrics::stability_score(pair.unstable_traj).final_score;
  metrics::TrackingOptions tracking;
  tracking.bridge_failures = true;
  for (int m = 1; m <= 5; ++m) {
    StabilizeConfig cfg;
    cfg.m = m;
    const FrameSequence out = iterative_stabilize(pair.unstable, builtin_interp, nullptr, cfg);
    const auto est = metrics::anchored_trajectory(pair.stable, pair.stable_traj, out, tracking);
    CHECK(est.failed_frames.empty());
    const double after = metrics::stability_score(est.trajectory).final_score;
    INFO("m = " << m << " before " << before << " after " << after);
    CHECK(after > before);
  }
}
