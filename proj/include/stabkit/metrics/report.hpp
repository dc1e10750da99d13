#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "stabkit/core/frame_sequence.hpp"
#include "stabkit/metrics/motion.hpp"
#include "stabkit/metrics/spectrum.hpp"

namespace stabkit::metrics {

struct FrameMetric {
  double value = 1.0;
  std::size_t frames_evaluated = 0;
  std::vector<std::size_t> failed_frames;
};

// Minimum anisotropy of the input(t) -> output(t) homographies.
FrameMetric distortion_score(const FrameSequence& input, const FrameSequence& output,
                             const TrackingOptions& options = {});

// Mean scale of the output(t) -> input(t) homographies.
FrameMetric cropping_score(const FrameSequence& input, const FrameSequence& output,
                           const TrackingOptions& options = {});

struct MetricsReport {
  double stability = 1.0;
  double stability_t = 1.0;
  double stability_theta = 1.0;
  double distortion = 1.0;
  double cropping = 1.0;
  double runtime_ms_per_frame = 0.0;
  std::size_t frames_evaluated = 0;
  std::size_t frames_failed = 0;
  std::string method = "unknown";

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

void to_json(nlohmann::json& j, const MetricsReport& r);
void from_json(const nlohmann::json& j, MetricsReport& r);

enum class TrajectorySource { Estimated, GroundTruth };

struct EvaluateOptions {
  std::string method = "unknown";
  TrajectorySource source = TrajectorySource::Estimated;
  // GroundTruth: the known trajectory. With `reference` set, it belongs to
  // the reference sequence and the output path is anchored on it; without,
  // it is taken as the output's own path.
  std::optional<Trajectory> ground_truth;
  std::optional<FrameSequence> reference;
  SpectrumKind spectrum = SpectrumKind::Magnitude;
  TrackingOptions tracking = bridging_tracking();
};

MetricsReport evaluate(const FrameSequence& input, const FrameSequence& output,
                       double runtime_ms_per_frame, const EvaluateOptions& options = {});

// The trajectory `evaluate` scores for `output`.
TrajectoryEstimate evaluation_trajectory(const FrameSequence& output,
                                         const EvaluateOptions& options);

}  // namespace stabkit::metrics
