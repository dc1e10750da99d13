#include "stabkit/nn/tensor.hpp"

#include "stabkit/core/error.hpp"

namespace stabkit::nn {

template <class T>
Tensor<T> stack_frames(std::span<const Image> frames) {
  if (frames.empty()) throw ShapeError("no frames to stack");
  const Image& first = frames.front();
  Tensor<T> out(3 * static_cast<int>(frames.size()), first.height(), first.width());
  for (std::size_t f = 0; f < frames.size(); ++f) {
    const Image& img = frames[f];
    if (img.channels() != 3 || !img.same_shape(first))
      throw ShapeError("stacked frames must share one RGB shape");
    for (int y = 0; y < img.height(); ++y)
      for (int x = 0; x < img.width(); ++x)
        for (int c = 0; c < 3; ++c)
          out.at(static_cast<int>(3 * f) + c, y, x) = static_cast<T>(img.at(y, x, c));
  }
  return out;
}

template <class T>
Tensor<T> to_tensor(const Image& frame) {
  return stack_frames<T>(std::span<const Image>(&frame, 1));
}

template <class T>
Image to_image(const Tensor<T>& t) {
  if (t.channels != 3) throw ShapeError("image tensors need 3 channels");
  Image out(t.width, t.height, 3);
  for (int y = 0; y < t.height; ++y)
    for (int x = 0; x < t.width; ++x)
      for (int c = 0; c < 3; ++c) out.at(y, x, c) = static_cast<float>(t.at(c, y, x));
  return out;
}

template Tensor<float> stack_frames<float>(std::span<const Image>);
template Tensor<double> stack_frames<double>(std::span<const Image>);
template Tensor<float> to_tensor<float>(const Image&);
template Tensor<double> to_tensor<double>(const Image&);
template Image to_image<float>(const Tensor<float>&);
template Image to_image<double>(const Tensor<double>&);

}  // namespace stabkit::nn
