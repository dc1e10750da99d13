#pragma once

#include <array>
#include <functional>

#include "stabkit/core/frame_sequence.hpp"
#include "stabkit/core/trajectory.hpp"
#include "stabkit/interp/interpolator.hpp"

namespace stabkit::interp {

struct StabilizeConfig {
  int m = 5;     // total interpolation iterations
  int k = 4;     // refine after every k interpolation iterations
  int skip = 1;  // neighbor distance used by the interpolator

  void validate() const;
};

// Restores a clean frame from the four original (unstable) neighbors
// U(t-2), U(t-1), U(t+1), U(t+2) and the current interpolated frame I(t).
using Refiner =
    std::function<Image(const std::array<Image, 4>& neighbors, const Image& current)>;

// Iterative frame-interpolation stabilization. Each iteration replaces every
// interior frame t (skip <= t < n - skip) by interp(f[t-skip], f[t+skip])
// computed from the previous iteration's frames. After iterations k, 2k, ...
// a provided refiner replaces every interior frame. Boundary frames pass
// through unchanged.
FrameSequence iterative_stabilize(const FrameSequence& seq, const Interpolator& interp,
                                  const Refiner* refiner, const StabilizeConfig& cfg);

// Pose-space shadow of iterative_stabilize: x[t] <- (x[t-1] + x[t+1]) / 2
// applied simultaneously to interior samples, m times.
Trajectory trajectory_smooth_oracle(const Trajectory& traj, int m);

}  // namespace stabkit::interp
