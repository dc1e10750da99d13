#pragma once

#include <cstddef>
#include <vector>

#include "stabkit/core/frame_sequence.hpp"

namespace stabkit {

struct PatchOrigin {
  int row = 0;
  int col = 0;
};

struct Patch {
  Image pixels;
  PatchOrigin origin;
  std::size_t source_index = 0;
};

// Co-located square patches from frames center-radius .. center+radius.
// Out-of-range frame indices are clamped to the nearest valid frame.
std::vector<Patch> extract_patch_windows(const FrameSequence& seq,
                                         std::size_t center_index, int radius,
                                         int patch_size, PatchOrigin origin);

}  // namespace stabkit
