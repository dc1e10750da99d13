#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "stabkit/core/image.hpp"

namespace stabkit {

// Ordered RGB frames sharing one resolution. Construction validates the
// invariants (non-empty, uniform 3-channel shape, values in [0,1]).
class FrameSequence {
 public:
  FrameSequence(std::vector<Image> frames, double fps = 30.0,
                std::string name = "sequence");

  std::size_t size() const { return frames_.size(); }
  int width() const { return frames_.front().width(); }
  int height() const { return frames_.front().height(); }
  double fps() const { return fps_; }
  const std::string& name() const { return name_; }

  const Image& operator[](std::size_t i) const { return frames_[i]; }
  const std::vector<Image>& frames() const { return frames_; }

  auto begin() const { return frames_.begin(); }
  auto end() const { return frames_.end(); }

  friend bool operator==(const FrameSequence&, const FrameSequence&) = default;

 private:
  std::vector<Image> frames_;
  double fps_;
  std::string name_;
};

// Index into [0, size) with edge replication.
std::size_t clamp_index(long long index, std::size_t size);

}  // namespace stabkit
