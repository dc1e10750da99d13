#include "stabkit/interp/iterative.hpp"

#include "stabkit/core/error.hpp"

namespace stabkit::interp {

void StabilizeConfig::validate() const {
  if (m < 0) throw ConfigError("m must be >= 0");
  if (k < 1) throw ConfigError("k must be >= 1");
  if (skip < 1) throw ConfigError("skip must be >= 1");
}

FrameSequence iterative_stabilize(const FrameSequence& seq, const Interpolator& interp,
                                  const Refiner* refiner, const StabilizeConfig& cfg) {
  cfg.validate();
  if (seq.size() < 3) throw RangeError("iterative stabilization needs >= 3 frames");

  const std::size_t n = seq.size();
  const std::size_t skip = static_cast<std::size_t>(cfg.skip);
  std::vector<Image> current = seq.frames();
  for (int iter = 1; iter <= cfg.m; ++iter) {
    std::vector<Image> next = current;
    for (std::size_t t = skip; t + skip < n; ++t) {
      next[t] = interp(current[t - skip], current[t + skip]);
    }
    current = std::move(next);

    if (refiner != nullptr && iter % cfg.k == 0) {
      for (std::size_t t = skip; t + skip < n; ++t) {
        const long long i = static_cast<long long>(t);
        const std::array<Image, 4> neighbors{seq[clamp_index(i - 2, n)],
                                             seq[clamp_index(i - 1, n)],
                                             seq[clamp_index(i + 1, n)],
                                             seq[clamp_index(i + 2, n)]};
        current[t] = (*refiner)(neighbors, current[t]);
      }
    }
  }
  for (Image& frame : current) {
    for (float& v : frame.data()) v = v < 0.0f ? 0.0f : (v > 1.0f ? 1.0f : v);
  }
  return FrameSequence(std::move(current), seq.fps(), seq.name());
}

Trajectory trajectory_smooth_oracle(const Trajectory& traj, int m) {
  traj.validate();
  if (traj.size() < 3) throw RangeError("trajectory smoothing needs >= 3 samples");
  if (m < 0) throw RangeError("m must be >= 0");
  Trajectory out = traj;
  for (std::vector<double>* signal : {&out.tx, &out.ty, &out.theta}) {
    std::vector<double>& x = *signal;
    for (int iter = 0; iter < m; ++iter) {
      std::vector<double> prev = x;
      for (std::size_t t = 1; t + 1 < x.size(); ++t) x[t] = 0.5 * (prev[t - 1] + prev[t + 1]);
    }
  }
  return out;
}

}  // namespace stabkit::interp
