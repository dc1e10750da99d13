#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "stabkit/core/frame_sequence.hpp"
#include "stabkit/core/trajectory.hpp"
#include "stabkit/interp/interpolator.hpp"

namespace stabkit::synth {

// High-frequency perturbation settings. Amplitudes are peak absolute values.
struct JitterSpec {
  double amplitude_px = 3.0;
  double amplitude_rad = 0.01;
  int min_freq_bin = 7;
  std::uint64_t seed = 0;

  void validate() const;
};

// Intended (smooth) camera motion.
struct MotionSpec {
  double speed_px = 2.0;     // mean translation per frame
  double turn_rate = 0.002;  // mean |rotation change| per frame
};

struct WindowSize {
  int width = 128;
  int height = 128;
};

struct StabPair {
  FrameSequence unstable;
  FrameSequence stable;
  Trajectory unstable_traj;
  Trajectory stable_traj;
};

struct RefinerSample {
  std::array<Image, 4> clean_neighbors;  // c(t-2), c(t-1), c(t+1), c(t+2)
  Image degraded_center;                  // i(t)
  Image clean_center;                     // C(t)
};

struct DegradeSettings {
  int iterations = 4;
  int skip = 1;
  interp::Interpolator interpolator = interp::builtin_interp;
};

// Smooth camera path whose spectrum (after DC removal) lives in DFT bins
// 2..6 only. Translation is scaled to a mean step of speed_px, rotation to a
// mean step of turn_rate. Throws RangeError for length < 5.
Trajectory gen_smooth_trajectory(std::size_t length, double speed_px, double turn_rate,
                                 std::uint64_t seed);

// Constant-velocity path centred on the origin, random heading.
Trajectory gen_linear_trajectory(std::size_t length, double speed_px, std::uint64_t seed);

// traj plus a zero-mean perturbation with random phases and flat magnitude
// over DFT bins [min_freq_bin, length/2], rescaled to the requested peaks.
Trajectory inject_jitter(const Trajectory& traj, const JitterSpec& spec);

// Frame t is the bilinear resampling of a window centred at
// image_center + (tx, ty), rotated by theta about its own centre.
FrameSequence render_crop_sequence(const Image& image, const Trajectory& traj,
                                   WindowSize window);

// Maps a pixel of a window at `pose` to source-image coordinates.
void window_to_source(const Image& image, WindowSize window, double tx, double ty,
                      double theta, double x, double y, double& sx, double& sy);

StabPair make_stab_pair(const Image& image, std::size_t length, WindowSize window,
                        const JitterSpec& jitter, std::uint64_t seed,
                        const MotionSpec& motion = {});

struct RefinerClip {
  FrameSequence clean;
  FrameSequence degraded;
  Trajectory path;
};

// Linearly moving window clip and its iteratively interpolated version.
RefinerClip make_refiner_clip(const Image& image, std::size_t length, WindowSize window,
                              const DegradeSettings& degrade, std::uint64_t seed,
                              double speed_px = 1.3);

// Training samples from a clip: one per interior centre t in [2, length - 3].
std::vector<RefinerSample> refiner_samples_from(const RefinerClip& clip);

// Clean frames from a linearly moving window, degraded centres from the
// iterative interpolation pipeline (no refiner). One sample per interior
// centre t in [2, length - 3].
std::vector<RefinerSample> make_refiner_samples(const Image& image, std::size_t length,
                                                WindowSize window,
                                                const DegradeSettings& degrade,
                                                std::uint64_t seed,
                                                double speed_px = 1.3);

// Procedural RGB scene with blurred shapes and smooth shading; rich in
// corners and low-frequency structure.
Image make_source_image(int width, int height, std::uint64_t seed);

}  // namespace stabkit::synth
