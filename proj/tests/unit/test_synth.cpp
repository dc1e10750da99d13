#include <doctest.h>

#include <cmath>

#include "dft_oracle.hpp"
#include "stabkit/core/error.hpp"
#include "stabkit/core/image_ops.hpp"
#include "stabkit/metrics/spectrum.hpp"
#include "stabkit/synth/synth.hpp"

using namespace stabkit;
using namespace stabkit::synth;

TEST_CASE("smooth trajectory generation") {
  SUBCASE("zero speed and turn rate give a constant path") {
    const Trajectory traj = gen_smooth_trajectory(32, 0.0, 0.0, 4);
    for (std::size_t t = 0; t < 32; ++t) {
      CHECK(traj.tx[t] == 0.0);
      CHECK(traj.ty[t] == 0.0);
      CHECK(traj.theta[t] == 0.0);
    }
  }
  SUBCASE("energy lives in bins 2..6") {
    const Trajectory traj = gen_smooth_trajectory(64, 2.0, 0.002, 7);
    for (const auto* signal : {&traj.tx, &traj.ty, &traj.theta}) {
      const auto e = test::dft_energy(*signal);
      const double total = test::band_sum(e, 1, 32);
      CHECK(test::band_sum(e, 2, 6) / total >= 0.99);
    }
    double step = 0.0;
    for (std::size_t t = 1; t < 64; ++t) {
      step += std::hypot(traj.tx[t] - traj.tx[t - 1], traj.ty[t] - traj.ty[t - 1]);
    }
    CHECK(step / 63 == doctest::Approx(2.0));
  }
  SUBCASE("seeded determinism") {
    CHECK(gen_smooth_trajectory(50, 2.0, 0.01, 9) == gen_smooth_trajectory(50, 2.0, 0.01, 9));
    CHECK(gen_smooth_trajectory(50, 2.0, 0.01, 9) != gen_smooth_trajectory(50, 2.0, 0.01, 10));
  }
  SUBCASE("short paths are rejected") { CHECK_THROWS_AS(gen_smooth_trajectory(4, 1, 0, 1), RangeError); }
}

TEST_CASE("jitter injection") {
  const Trajectory smooth = gen_smooth_trajectory(64, 2.0, 0.002, 5);

  SUBCASE("zero amplitude is exact identity") {
    JitterSpec spec;
    spec.amplitude_px = 0.0;
    spec.amplitude_rad = 0.0;
    CHECK(inject_jitter(smooth, spec) == smooth);
  }
  SUBCASE("perturbation stays out of the low band") {
    JitterSpec spec;
    spec.amplitude_px = 3.0;
    spec.seed = 1;
    const Trajectory shaky = inject_jitter(smooth, spec);
    const std::pair<const std::vector<double>*, const std::vector<double>*> signals[] = {
        {&shaky.tx, &smooth.tx}, {&shaky.ty, &smooth.ty}, {&shaky.theta, &smooth.theta}};
    for (auto [out, in] : signals) {
      std::vector<double> delta(64);
      double mean = 0.0;
      double peak = 0.0;
      for (std::size_t t = 0; t < 64; ++t) {
        delta[t] = (*out)[t] - (*in)[t];
        mean += delta[t];
        peak = std::max(peak, std::abs(delta[t]));
      }
      CHECK(std::abs(mean / 64) < 1e-12);
      const auto e = test::dft_energy(delta);
      const double total = test::band_sum(e, 1, 32);
      CHECK(test::band_sum(e, 2, 6) / total < 1e-9);
      CHECK(test::band_sum(e, 1, 6) / total < 1e-9);
      CHECK(peak > 0.0);
    }
    double peak_x = 0.0;
    for (std::size_t t = 0; t < 64; ++t) peak_x = std::max(peak_x, std::abs(shaky.tx[t] - smooth.tx[t]));
    CHECK(peak_x == doctest::Approx(3.0));
  }
  SUBCASE("jitter lowers the stability score") {
    JitterSpec spec;
    spec.amplitude_px = 3.0;
    spec.seed = 1;
    const Trajectory shaky = inject_jitter(smooth, spec);
    CHECK(metrics::stability_score(shaky).final_score < metrics::stability_score(smooth).final_score);
  }
  SUBCASE("invalid specs") {
    JitterSpec spec;
    spec.min_freq_bin = 6;
    CHECK_THROWS_AS(inject_jitter(smooth, spec), ValidationError);
    spec.min_freq_bin = 7;
    spec.amplitude_px = -1.0;
    CHECK_THROWS_AS(inject_jitter(smooth, spec), ValidationError);
  }
}

TEST_CASE("crop rendering") {
  SUBCASE("constant trajectory renders identical frames") {
    const Image src = make_source_image(200, 200, 3);
    Trajectory still(6);
    for (auto& v : still.tx) v = 4.25;
    for (auto& v : still.theta) v = 0.05;
    const FrameSequence seq = render_crop_sequence(src, still, {64, 48});
    for (std::size_t t = 1; t < seq.size(); ++t) CHECK(seq[t] == seq[0]);
  }
  SUBCASE("period-10 pattern is invariant to a 10 px translation") {
    Image pattern(300, 200, 3);
    for (int y = 0; y < 200; ++y)
      for (int x = 0; x < 300; ++x)
        for (int c = 0; c < 3; ++c)
          pattern.at(y, x, c) = 0.5f + 0.4f * std::sin(2.0f * 3.14159265f * x / 10.0f + c);
    const Trajectory traj = gen_smooth_trajectory(12, 1.5, 0.01, 2);
    Trajectory moved = traj;
    for (auto& v : moved.tx) v += 10.0;
    const FrameSequence a = render_crop_sequence(pattern, traj, {64, 64});
    const FrameSequence b = render_crop_sequence(pattern, moved, {64, 64});
    for (std::size_t t = 0; t < a.size(); ++t) CHECK(mean_abs_diff(a[t], b[t]) < 1e-5);
  }
  SUBCASE("shape contract") {
    const Image src = make_source_image(1024, 1024, 8);
    const FrameSequence seq =
        render_crop_sequence(src, gen_smooth_trajectory(64, 2.0, 0.002, 1), {128, 128});
    CHECK(seq.size() == 64);
    CHECK(seq.width() == 128);
    CHECK(seq.height() == 128);
  }
  SUBCASE("window escaping the image names the frame") {
    const Image src = make_source_image(140, 140, 8);
    Trajectory traj(5);
    traj.tx[3] = 10.0;
    try {
      render_crop_sequence(src, traj, {128, 128});
      FAIL("expected RangeError");
    } catch (const RangeError& e) {
      CHECK(std::string(e.what()).find("frame 3") != std::string::npos);
    }
  }
}

TEST_CASE("stabilization pairs") {
  const Image src = make_source_image(256, 256, 13);

  SUBCASE("no jitter gives identical sequences") {
    JitterSpec none;
    none.amplitude_px = 0.0;
    none.amplitude_rad = 0.0;
    const StabPair pair = make_stab_pair(src, 16, {96, 96}, none, 3);
    CHECK(pair.stable == pair.unstable);
  }
  SUBCASE("default jitter is less stable and visibly different") {
    const StabPair pair = make_stab_pair(src, 64, {128, 128}, JitterSpec{}, 3);
    CHECK(metrics::stability_score(pair.unstable_traj).final_score <
          metrics::stability_score(pair.stable_traj).final_score);
    for (std::size_t t = 0; t < pair.stable.size(); ++t) {
      CHECK(mean_abs_diff(pair.stable[t], pair.unstable[t]) > 0.0);
    }
  }
  SUBCASE("equi-perspective: unstable frames warp onto stable ones") {
    const StabPair pair = make_stab_pair(src, 32, {128, 128}, JitterSpec{}, 4);
    const WindowSize win{128, 128};
    for (std::size_t t = 0; t < pair.stable.size(); ++t) {
      const double tu = pair.unstable_traj.theta[t];
      double sum = 0.0;
      int count = 0;
      for (int y = 0; y < 128; ++y) {
        for (int x = 0; x < 128; ++x) {
          double sx, sy;
          window_to_source(src, win, pair.stable_traj.tx[t], pair.stable_traj.ty[t],
                           pair.stable_traj.theta[t], x, y, sx, sy);
          const double rx = sx - 127.5 - pair.unstable_traj.tx[t];
          const double ry = sy - 127.5 - pair.unstable_traj.ty[t];
          const double ux = std::cos(tu) * rx + std::sin(tu) * ry + 63.5;
          const double uy = -std::sin(tu) * rx + std::cos(tu) * ry + 63.5;
          if (ux < 0 || uy < 0 || ux > 127 || uy > 127) continue;
          float v[3];
          sample_bilinear(pair.unstable[t], ux, uy, v);
          for (int c = 0; c < 3; ++c) sum += std::abs(v[c] - pair.stable[t].at(y, x, c));
          count += 3;
        }
      }
      CHECK(sum / count < 0.02);
    }
  }
  SUBCASE("seeded determinism") {
    const StabPair a = make_stab_pair(src, 16, {64, 64}, JitterSpec{}, 5);
    const StabPair b = make_stab_pair(src, 16, {64, 64}, JitterSpec{}, 5);
    CHECK(a.unstable == b.unstable);
    CHECK(a.unstable_traj == b.unstable_traj);
  }
}

TEST_CASE("refiner samples") {
  const Image src = make_source_image(256, 256, 31);

  SUBCASE("no degradation keeps the centres clean") {
    DegradeSettings degrade;
    degrade.iterations = 0;
    const auto samples = make_refiner_samples(src, 12, {64, 64}, degrade, 1);
    for (const auto& s : samples) CHECK(s.degraded_center == s.clean_center);
  }
  SUBCASE("four interpolation passes corrupt the centres") {
    const auto samples = make_refiner_samples(src, 64, {96, 96}, DegradeSettings{}, 2);
    CHECK(samples.size() == 60);
    double mean_psnr = 0.0;
    for (const auto& s : samples) {
      const double p = psnr(s.degraded_center, s.clean_center);
      CHECK(std::isfinite(p));
      mean_psnr += p;
      CHECK(s.clean_neighbors[0].same_shape(s.clean_center));
    }
    MESSAGE("mean degraded PSNR " << mean_psnr / samples.size() << " dB");
  }
}
