#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "stabkit/nn/tensor.hpp"

namespace stabkit::nn {

template <class T>
struct ParamView {
  std::string name;
  std::span<T> value;
  std::span<T> grad;
};

// 3x3 convolution, zero padding 1, stride 1 or 2.
template <class T>
class Conv2d {
 public:
  Conv2d() = default;
  Conv2d(int in_channels, int out_channels, int stride = 1);

  int in_channels() const { return in_; }
  int out_channels() const { return out_; }
  int stride() const { return stride_; }
  int output_size(int n) const { return (n - 1) / stride_ + 1; }

  // He-normal weights times `gain`, zero bias.
  void init(std::mt19937_64& rng, double gain = 1.0);
  void zero();

  Tensor<T> forward(const Tensor<T>& x) const;
  // Adds parameter gradients when accumulate is set; returns dL/dx when
  // need_dx is set (an empty tensor otherwise).
  Tensor<T> backward(const Tensor<T>& x, const Tensor<T>& dy, bool need_dx, bool accumulate);

  void append_params(const std::string& prefix, std::vector<ParamView<T>>& out);

  std::vector<T> weight;  // out x (in * 9), row-major
  std::vector<T> bias;
  std::vector<T> grad_weight;
  std::vector<T> grad_bias;

 private:
  int in_ = 0;
  int out_ = 0;
  int stride_ = 1;
};

template <class T>
void relu_inplace(Tensor<T>& x);
// dy *= (pre > 0)
template <class T>
void relu_backward_inplace(const Tensor<T>& pre, Tensor<T>& dy);

template <class T>
void leaky_relu_inplace(Tensor<T>& x, T slope);
template <class T>
void leaky_relu_backward_inplace(const Tensor<T>& pre, Tensor<T>& dy, T slope);

template <class T>
T sigmoid(T x);

}  // namespace stabkit::nn
