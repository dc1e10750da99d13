#include "stabkit/metrics/report.hpp"

#include <algorithm>
#include <set>

#include "stabkit/core/error.hpp"

namespace stabkit::metrics {

namespace {

void require_pair(const FrameSequence& input, const FrameSequence& output) {
  if (input.size() != output.size()) {
    throw ValidationError("input and output lengths differ (" + std::to_string(input.size()) +
                          " vs " + std::to_string(output.size()) + ")");
  }
  if (input.width() != output.width() || input.height() != output.height()) {
    throw ValidationError("input and output resolutions differ");
  }
}

template <typename PerFrame, typename Reduce>
FrameMetric per_frame_metric(const FrameSequence& from, const FrameSequence& to,
                             const TrackingOptions& options, PerFrame per_frame,
                             Reduce reduce) {
  const double cx = 0.5 * (from.width() - 1);
  const double cy = 0.5 * (from.height() - 1);
  FrameMetric metric;
  std::vector<double> values;
  for (std::size_t t = 0; t < from.size(); ++t) {
    const auto fit = fit_frame_homography(from[t], to[t], options);
    if (!fit) {
      metric.failed_frames.push_back(t);
      continue;
    }
    try {
      values.push_back(per_frame(decompose_homography(recenter(fit->h, cx, cy))));
    } catch (const DegeneracyError&) {
      metric.failed_frames.push_back(t);
    }
  }
  metric.frames_evaluated = values.size();
  metric.value = values.empty() ? 0.0 : reduce(values);
  return metric;
}

}  // namespace

FrameMetric distortion_score(const FrameSequence& input, const FrameSequence& output,
                             const TrackingOptions& options) {
  require_pair(input, output);
  return per_frame_metric(
      input, output, options, [](const PoseDecomposition& d) { return d.anisotropy; },
      [](const std::vector<double>& v) { return *std::min_element(v.begin(), v.end()); });
}

FrameMetric cropping_score(const FrameSequence& input, const FrameSequence& output,
                           const TrackingOptions& options) {
  require_pair(input, output);
  return per_frame_metric(
      output, input, options, [](const PoseDecomposition& d) { return d.scale; },
      [](const std::vector<double>& v) {
        double sum = 0.0;
        for (double x : v) sum += x;
        return sum / static_cast<double>(v.size());
      });
}

void to_json(nlohmann::json& j, const MetricsReport& r) {
  j = nlohmann::json{{"stability", r.stability},
                     {"stability_t", r.stability_t},
                     {"stability_theta", r.stability_theta},
                     {"distortion", r.distortion},
                     {"cropping", r.cropping},
                     {"runtime_ms_per_frame", r.runtime_ms_per_frame},
                     {"frames_evaluated", r.frames_evaluated},
                     {"frames_failed", r.frames_failed},
                     {"method", r.method}};
}

void from_json(const nlohmann::json& j, MetricsReport& r) {
  j.at("stability").get_to(r.stability);
  j.at("stability_t").get_to(r.stability_t);
  j.at("stability_theta").get_to(r.stability_theta);
  j.at("distortion").get_to(r.distortion);
  j.at("cropping").get_to(r.cropping);
  j.at("runtime_ms_per_frame").get_to(r.runtime_ms_per_frame);
  j.at("frames_evaluated").get_to(r.frames_evaluated);
  j.at("frames_failed").get_to(r.frames_failed);
  j.at("method").get_to(r.method);
}

TrajectoryEstimate evaluation_trajectory(const FrameSequence& output,
                                         const EvaluateOptions& options) {
  if (options.source == TrajectorySource::Estimated) {
    return chain_trajectory(output, options.tracking);
  }
  if (!options.ground_truth) throw ConfigError("ground-truth evaluation needs a trajectory");
  if (options.reference) {
    return anchored_trajectory(*options.reference, *options.ground_truth, output,
                               options.tracking);
  }
  if (options.ground_truth->size() != output.size()) {
    throw ValidationError("ground-truth trajectory length differs from the sequence");
  }
  return {*options.ground_truth, {}};
}

MetricsReport evaluate(const FrameSequence& input, const FrameSequence& output,
                       double runtime_ms_per_frame, const EvaluateOptions& options) {
  require_pair(input, output);
  MetricsReport report;
  report.method = options.method;
  report.runtime_ms_per_frame = runtime_ms_per_frame;

  std::set<std::size_t> failed;
  const TrajectoryEstimate traj = evaluation_trajectory(output, options);
  failed.insert(traj.failed_frames.begin(), traj.failed_frames.end());
  const StabilityScore s = stability_score(traj.trajectory, options.spectrum);
  report.stability = s.final_score;
  report.stability_t = s.translation;
  report.stability_theta = s.rotation;

  const FrameMetric distortion = distortion_score(input, output, options.tracking);
  const FrameMetric cropping = cropping_score(input, output, options.tracking);
  report.distortion = distortion.value;
  report.cropping = cropping.value;
  failed.insert(distortion.failed_frames.begin(), distortion.failed_frames.end());
  failed.insert(cropping.failed_frames.begin(), cropping.failed_frames.end());
  report.frames_failed = failed.size();
  report.frames_evaluated = input.size() - failed.size();
  return report;
}

}  // namespace stabkit::metrics
