#include "stabkit/core/patch.hpp"

#include "stabkit/core/error.hpp"
#include "stabkit/core/image_ops.hpp"

namespace stabkit {

std::vector<Patch> extract_patch_windows(const FrameSequence& seq,
                                         std::size_t center_index, int radius,
                                         int patch_size, PatchOrigin origin) {
  if (center_index >= seq.size()) throw RangeError("center index out of range");
  if (radius < 0) throw RangeError("radius must be non-negative");
  if (patch_size <= 0 || origin.row < 0 || origin.col < 0 ||
      origin.row + patch_size > seq.height() ||
      origin.col + patch_size > seq.width()) {
    throw RangeError("patch of size " + std::to_string(patch_size) +
                     " exceeds frame bounds " + std::to_string(seq.width()) + "x" +
                     std::to_string(seq.height()));
  }
  std::vector<Patch> patches;
  patches.reserve(2 * radius + 1);
  for (int offset = -radius; offset <= radius; ++offset) {
    const std::size_t idx =
        clamp_index(static_cast<long long>(center_index) + offset, seq.size());
    patches.push_back({crop(seq[idx], origin.row, origin.col, patch_size, patch_size),
                       origin, idx});
  }
  return patches;
}

}  // namespace stabkit
