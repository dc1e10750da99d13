#include "stabkit/core/frame_sequence.hpp"

#include <algorithm>
#include <cmath>

#include "stabkit/core/error.hpp"

namespace stabkit {

FrameSequence::FrameSequence(std::vector<Image> frames, double fps,
                             std::string name)
    : frames_(std::move(frames)), fps_(fps), name_(std::move(name)) {
  if (frames_.empty()) throw ValidationError("sequence must contain at least one frame");
  if (!(fps_ > 0.0)) throw ValidationError("fps must be positive");
  const Image& first = frames_.front();
  if (first.channels() != 3 || first.width() <= 0 || first.height() <= 0) {
    throw ValidationError("frames must be non-empty RGB images");
  }
  for (std::size_t i = 0; i < frames_.size(); ++i) {
    if (!frames_[i].same_shape(first)) {
      throw ValidationError("frame " + std::to_string(i) + " differs in shape");
    }
    for (float v : frames_[i].data()) {
      if (!(v >= 0.0f && v <= 1.0f)) {
        throw ValidationError("frame " + std::to_string(i) +
                              " has values outside [0,1]");
      }
    }
  }
}

std::size_t clamp_index(long long index, std::size_t size) {
  if (index < 0) return 0;
  if (static_cast<std::size_t>(index) >= size) return size - 1;
  return static_cast<std::size_t>(index);
}

}  // namespace stabkit
