#include "stabkit/metrics/spectrum.hpp"

#include <algorithm>
#include <cmath>

#include <opencv2/core.hpp>

#include "stabkit/core/error.hpp"

namespace stabkit::metrics {

Spectrum spectrum(std::span<const double> signal, SpectrumKind kind) {
  const std::size_t n = signal.size();
  if (n < 2) throw RangeError("spectrum needs >= 2 samples");
  double mean = 0.0;
  for (double v : signal) mean += v;
  mean /= static_cast<double>(n);

  cv::Mat row(1, static_cast<int>(n), CV_64F);
  for (std::size_t i = 0; i < n; ++i) row.at<double>(0, static_cast<int>(i)) = signal[i] - mean;
  cv::Mat freq;
  cv::dft(row, freq, cv::DFT_COMPLEX_OUTPUT);

  Spectrum out;
  out.bins.resize(n / 2);
  for (std::size_t k = 1; k <= n / 2; ++k) {
    const cv::Vec2d z = freq.at<cv::Vec2d>(0, static_cast<int>(k));
    const double energy = z[0] * z[0] + z[1] * z[1];
    out.bins[k - 1] = kind == SpectrumKind::Energy ? energy : std::sqrt(energy);
  }
  return out;
}

double band_stability(std::span<const double> signal, SpectrumKind kind) {
  const Spectrum f = spectrum(signal, kind);
  double low = 0.0;
  double total = 0.0;
  for (std::size_t k = 2; k <= f.n(); ++k) {
    total += f.at(k);
    if (k <= 6) low += f.at(k);
  }
  if (total < 1e-12) return 1.0;
  return std::clamp(low / total, 0.0, 1.0);
}

StabilityScore stability_score(const Trajectory& traj, SpectrumKind kind) {
  traj.validate();
  if (traj.size() < 8) throw RangeError("stability score needs >= 8 frames");
  StabilityScore s;
  s.tx = band_stability(traj.tx, kind);
  s.ty = band_stability(traj.ty, kind);
  s.translation = std::min(s.tx, s.ty);
  s.rotation = band_stability(traj.theta, kind);
  s.final_score = std::min(s.translation, s.rotation);
  return s;
}

double band_content(std::span<const double> signal, std::size_t first_bin, SpectrumKind kind) {
  const Spectrum f = spectrum(signal, kind);
  double sum = 0.0;
  for (std::size_t k = std::max<std::size_t>(first_bin, 1); k <= f.n(); ++k) sum += f.at(k);
  return sum;
}

}  // namespace stabkit::metrics
