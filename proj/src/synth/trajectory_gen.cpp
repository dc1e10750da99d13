#include <cmath>
#include <numbers>
#include <random>

#include "stabkit/core/error.hpp"
#include "stabkit/synth/synth.hpp"

namespace stabkit::synth {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Real signal built from cosines at the given bins.
std::vector<double> band_signal(std::size_t length, int first_bin, int last_bin,
                                bool decaying, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> x(length, 0.0);
  for (int k = first_bin; k <= last_bin; ++k) {
    const double amp = decaying ? (0.5 + 0.5 * unit(rng)) / k : 1.0;
    const double phase = kTwoPi * unit(rng);
    const double w = kTwoPi * k / static_cast<double>(length);
    for (std::size_t t = 0; t < length; ++t) x[t] += amp * std::cos(w * t + phase);
  }
  return x;
}

double mean_abs_step(const std::vector<double>& x) {
  double sum = 0.0;
  for (std::size_t t = 1; t < x.size(); ++t) sum += std::abs(x[t] - x[t - 1]);
  return sum / static_cast<double>(x.size() - 1);
}

void scale(std::vector<double>& x, double factor) {
  for (double& v : x) v *= factor;
}

double peak(const std::vector<double>& x) {
  double p = 0.0;
  for (double v : x) p = std::max(p, std::abs(v));
  return p;
}

}  // namespace

void JitterSpec::validate() const {
  if (amplitude_px < 0.0 || amplitude_rad < 0.0) {
    throw ValidationError("jitter amplitudes must be >= 0");
  }
  if (min_freq_bin < 7) throw ValidationError("jitter min_freq_bin must be >= 7");
}

Trajectory gen_smooth_trajectory(std::size_t length, double speed_px, double turn_rate,
                                 std::uint64_t seed) {
  if (length < 5) throw RangeError("smooth trajectory needs >= 5 frames");
  std::mt19937_64 rng(seed);
  Trajectory traj(length);
  const int last_bin = std::min<int>(6, static_cast<int>(length / 2));
  traj.tx = band_signal(length, 2, last_bin, true, rng);
  traj.ty = band_signal(length, 2, last_bin, true, rng);
  traj.theta = band_signal(length, 2, last_bin, true, rng);

  double step = 0.0;
  for (std::size_t t = 1; t < length; ++t) {
    step += std::hypot(traj.tx[t] - traj.tx[t - 1], traj.ty[t] - traj.ty[t - 1]);
  }
  step /= static_cast<double>(length - 1);
  const double pos_scale = speed_px > 0.0 && step > 0.0 ? speed_px / step : 0.0;
  scale(traj.tx, pos_scale);
  scale(traj.ty, pos_scale);
  const double turn = mean_abs_step(traj.theta);
  scale(traj.theta, turn_rate > 0.0 && turn > 0.0 ? turn_rate / turn : 0.0);
  return traj;
}

Trajectory gen_linear_trajectory(std::size_t length, double speed_px, std::uint64_t seed) {
  if (length < 2) throw RangeError("linear trajectory needs >= 2 frames");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> heading(0.0, kTwoPi);
  const double angle = heading(rng);
  const double vx = speed_px * std::cos(angle);
  const double vy = speed_px * std::sin(angle);
  const double mid = 0.5 * static_cast<double>(length - 1);
  Trajectory traj(length);
  for (std::size_t t = 0; t < length; ++t) {
    traj.tx[t] = vx * (static_cast<double>(t) - mid);
    traj.ty[t] = vy * (static_cast<double>(t) - mid);
  }
  return traj;
}

Trajectory inject_jitter(const Trajectory& traj, const JitterSpec& spec) {
  traj.validate();
  spec.validate();
  Trajectory out = traj;
  const std::size_t n = traj.size();
  const int last_bin = static_cast<int>(n / 2);
  const bool wants_jitter = spec.amplitude_px > 0.0 || spec.amplitude_rad > 0.0;
  if (!wants_jitter) return out;
  if (last_bin < spec.min_freq_bin) {
    throw RangeError("trajectory too short for jitter above bin " +
                     std::to_string(spec.min_freq_bin));
  }
  std::mt19937_64 rng(spec.seed);
  const std::pair<std::vector<double>*, double> targets[] = {
      {&out.tx, spec.amplitude_px}, {&out.ty, spec.amplitude_px}, {&out.theta, spec.amplitude_rad}};
  for (auto [signal, amplitude] : targets) {
    std::vector<double> noise = band_signal(n, spec.min_freq_bin, last_bin, false, rng);
    const double p = peak(noise);
    if (amplitude == 0.0 || p == 0.0) continue;
    scale(noise, amplitude / p);
    for (std::size_t t = 0; t < n; ++t) (*signal)[t] += noise[t];
  }
  return out;
}

}  // namespace stabkit::synth
