#pragma once

#include <span>
#include <vector>

#include "stabkit/core/trajectory.hpp"

namespace stabkit::metrics {

enum class SpectrumKind { Magnitude, Energy };

// f(k) for k = 1..n after DC removal, n = floor(N/2). Index 0 of `bins`
// holds k = 1.
struct Spectrum {
  std::vector<double> bins;

  std::size_t n() const { return bins.size(); }
  double at(std::size_t k) const { return bins.at(k - 1); }
};

Spectrum spectrum(std::span<const double> signal, SpectrumKind kind = SpectrumKind::Magnitude);

// Share of spectral content in bins 2..6 among bins 2..n. Signals with no
// content in 2..n score 1.
double band_stability(std::span<const double> signal,
                      SpectrumKind kind = SpectrumKind::Magnitude);

struct StabilityScore {
  double tx = 1.0;
  double ty = 1.0;
  double translation = 1.0;  // min(tx, ty)
  double rotation = 1.0;
  double final_score = 1.0;  // min(translation, rotation)
};

// Throws RangeError for trajectories shorter than 8 frames.
StabilityScore stability_score(const Trajectory& traj,
                               SpectrumKind kind = SpectrumKind::Magnitude);

// Sum of f(k) over k >= first_bin.
double band_content(std::span<const double> signal, std::size_t first_bin,
                    SpectrumKind kind = SpectrumKind::Magnitude);

}  // namespace stabkit::metrics
