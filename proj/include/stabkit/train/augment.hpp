#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "stabkit/core/image.hpp"

namespace stabkit::train {

// Supervised sample: network inputs plus target. The first `ordered` inputs
// form the temporal sequence that reverse_order flips; any further inputs
// (the refiner's degraded frame) keep their slot.
struct TrainSample {
  std::vector<Image> inputs;
  Image target;
  std::size_t ordered = 5;
};

// Geometric and photometric augmentation. Each flag fires with `probability`;
// ranges are drawn uniformly. Zero-width ranges disable an adjustment.
struct AugmentSpec {
  bool flip_h = true;
  bool flip_v = true;
  bool reverse_order = true;
  double probability = 0.5;
  double resize_min = 1.0;
  double resize_max = 1.0;
  double brightness = 0.05;  // additive, +-
  double hue = 0.02;         // rotation in turns, +-
  double gamma_min = 0.9;
  double gamma_max = 1.1;
  double contrast_min = 0.9;
  double contrast_max = 1.1;
  std::uint64_t seed = 0;

  static AugmentSpec none();
  void validate() const;
};

// Same geometric and photometric transform for every frame of the sample,
// outputs clamped to [0,1]. Deterministic in spec.seed.
TrainSample augment(const TrainSample& sample, const AugmentSpec& spec);

// Photometric helpers, exposed for tests.
Image adjust_hue(const Image& src, double turns);
Image adjust_gamma(const Image& src, double gamma);

}  // namespace stabkit::train
