#pragma once

#include <functional>

#include "stabkit/core/image.hpp"

namespace stabkit::interp {

// Synthesizes the temporal midpoint of two frames. Implementations must be
// pure and shape-preserving.
using Interpolator = std::function<Image(const Image& prev, const Image& next)>;

// Global motion-compensated midpoint: estimates the integer shift s between
// prev and next, moves prev by +s/2 and next by -s/2 (bilinear, edge-clamped)
// and averages the two.
Image builtin_interp(const Image& prev, const Image& next);

}  // namespace stabkit::interp
