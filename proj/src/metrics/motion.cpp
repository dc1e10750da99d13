#include "stabkit/metrics/motion.hpp"

#include <cmath>

#include "stabkit/core/error.hpp"

namespace stabkit::metrics {

std::optional<HomographyFit> fit_frame_homography(const Image& src, const Image& dst,
                                                  const TrackingOptions& options) {
  const std::vector<Keypoint> corners = detect_corners(src, options.corners);
  const std::vector<Correspondence> matches =
      match_corners(src, dst, corners, options.matching);
  if (matches.size() < 4) return std::nullopt;
  try {
    HomographyFit fit = estimate_homography_ransac(matches, options.ransac);
    if (fit.inlier_count < 4) return std::nullopt;
    return fit;
  } catch (const DegeneracyError&) {
    return std::nullopt;
  } catch (const InsufficientDataError&) {
    return std::nullopt;
  }
}

TrajectoryEstimate chain_trajectory(const FrameSequence& seq, const TrackingOptions& options) {
  if (seq.size() < 2) throw RangeError("trajectory estimation needs >= 2 frames");
  const double cx = 0.5 * (seq.width() - 1);
  const double cy = 0.5 * (seq.height() - 1);

  TrajectoryEstimate est{Trajectory(seq.size()), {}};
  Homography to_first;
  for (std::size_t t = 1; t < seq.size(); ++t) {
    const auto fit = fit_frame_homography(seq[t], seq[t - 1], options);
    if (!fit) {
      if (!options.bridge_failures) {
        throw TrackingError("tracking failed between frames " + std::to_string(t - 1) +
                            " and " + std::to_string(t));
      }
      est.failed_frames.push_back(t);
    } else {
      to_first = to_first * fit->h;
    }
    const PoseDecomposition pose = decompose_homography(recenter(to_first, cx, cy));
    est.trajectory.tx[t] = pose.tx;
    est.trajectory.ty[t] = pose.ty;
    est.trajectory.theta[t] = pose.theta;
  }
  return est;
}

TrajectoryEstimate anchored_trajectory(const FrameSequence& reference,
                                       const Trajectory& reference_traj,
                                       const FrameSequence& seq,
                                       const TrackingOptions& options) {
  reference_traj.validate();
  if (reference.size() != seq.size() || reference_traj.size() != seq.size()) {
    throw ValidationError("anchored trajectory needs equal lengths");
  }
  const double cx = 0.5 * (seq.width() - 1);
  const double cy = 0.5 * (seq.height() - 1);
  TrajectoryEstimate est{reference_traj, {}};
  for (std::size_t t = 0; t < seq.size(); ++t) {
    const auto fit = fit_frame_homography(seq[t], reference[t], options);
    if (!fit) {
      if (!options.bridge_failures) {
        throw TrackingError("cannot register frame " + std::to_string(t) + " on its reference");
      }
      est.failed_frames.push_back(t);
      continue;
    }
    const PoseDecomposition rel = decompose_homography(recenter(fit->h, cx, cy));
    const double c = std::cos(reference_traj.theta[t]);
    const double s = std::sin(reference_traj.theta[t]);
    est.trajectory.tx[t] = reference_traj.tx[t] + c * rel.tx - s * rel.ty;
    est.trajectory.ty[t] = reference_traj.ty[t] + s * rel.tx + c * rel.ty;
    est.trajectory.theta[t] = reference_traj.theta[t] + rel.theta;
  }
  return est;
}

}  // namespace stabkit::metrics
