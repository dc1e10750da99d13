#pragma once

#include "stabkit/core/image.hpp"

namespace stabkit::interp {

struct Shift {
  int dx = 0;
  int dy = 0;
  friend bool operator==(const Shift&, const Shift&) = default;
};

// Integer translation d such that b(x) ~ a(x - d), found as the peak of the
// phase-correlation surface (circular). Ties resolve to the smallest |d|,
// then the smallest dy, then the smallest dx. Frames smaller than 8x8 throw
// RangeError.
Shift estimate_global_shift(const Image& a, const Image& b);

}  // namespace stabkit::interp
