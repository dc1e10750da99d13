#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "stabkit/core/image.hpp"

namespace stabkit::nn {

// Channel-major (CHW) activation for a single sample.
template <class T>
struct Tensor {
  int channels = 0;
  int height = 0;
  int width = 0;
  std::vector<T> data;

  Tensor() = default;
  Tensor(int c, int h, int w, T fill = T(0))
      : channels(c), height(h), width(w), data(static_cast<std::size_t>(c) * h * w, fill) {}

  std::size_t size() const { return data.size(); }
  std::size_t plane() const { return static_cast<std::size_t>(height) * width; }
  T& at(int c, int y, int x) { return data[(static_cast<std::size_t>(c) * height + y) * width + x]; }
  T at(int c, int y, int x) const {
    return data[(static_cast<std::size_t>(c) * height + y) * width + x];
  }
  bool same_shape(const Tensor& o) const {
    return channels == o.channels && height == o.height && width == o.width;
  }
};

// Concatenates RGB frames along the channel axis. Throws ShapeError when the
// frames differ in size or are not 3-channel.
template <class T>
Tensor<T> stack_frames(std::span<const Image> frames);

template <class T>
Tensor<T> to_tensor(const Image& frame);

// Channels must be 3. Values are copied as-is, no clamping.
template <class T>
Image to_image(const Tensor<T>& t);

}  // namespace stabkit::nn
