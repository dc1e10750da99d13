#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "stabkit/core/frame_sequence.hpp"
#include "stabkit/core/trajectory.hpp"
#include "stabkit/metrics/homography.hpp"

namespace stabkit::metrics {

struct TrackingOptions {
  CornerOptions corners;
  MatchOptions matching;
  RansacOptions ransac;
  // Replace failed fits by the identity and record the frame instead of
  // throwing TrackingError.
  bool bridge_failures = false;
};

inline TrackingOptions bridging_tracking() {
  TrackingOptions options;
  options.bridge_failures = true;
  return options;
}

// Homography taking pixel coordinates of `src` to those of `dst`. Returns
// nullopt when fewer than 4 inlier matches support a model.
std::optional<HomographyFit> fit_frame_homography(const Image& src, const Image& dst,
                                                  const TrackingOptions& options = {});

struct TrajectoryEstimate {
  Trajectory trajectory;
  std::vector<std::size_t> failed_frames;
};

// Absolute camera path relative to frame 0 (pose 0 is the origin), built by
// composing the inter-frame homographies H(t -> t-1) and decomposing the
// product about the frame centre. Throws RangeError for one-frame inputs.
TrajectoryEstimate chain_trajectory(const FrameSequence& seq,
                                    const TrackingOptions& options = {});

// Path of `seq` anchored on a reference sequence with known poses: frame t
// is registered against reference frame t and the relative pose is composed
// with reference_traj[t].
TrajectoryEstimate anchored_trajectory(const FrameSequence& reference,
                                       const Trajectory& reference_traj,
                                       const FrameSequence& seq,
                                       const TrackingOptions& options = {});

}  // namespace stabkit::metrics
