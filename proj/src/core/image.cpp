#include "stabkit/core/image.hpp"

#include "stabkit/core/error.hpp"

namespace stabkit {

Image::Image(int width, int height, int channels, float fill)
    : width_(width), height_(height), channels_(channels) {
  if (width < 0 || height < 0 || channels < 1) {
    throw ShapeError("invalid image shape");
  }
  data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
}

}  // namespace stabkit
