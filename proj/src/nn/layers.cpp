#include "stabkit/nn/layers.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include <Eigen/Core>

#include "stabkit/core/error.hpp"

namespace stabkit::nn {

namespace {

template <class T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <class T>
using MapMat = Eigen::Map<RowMat<T>>;
template <class T>
using ConstMapMat = Eigen::Map<const RowMat<T>>;

// Column buffer reused across calls; a conv never recurses, so one per type
// and thread is enough.
template <class T>
std::vector<T>& scratch_columns() {
  thread_local std::vector<T> buffer;
  return buffer;
}

// cols[(c*9 + ky*3 + kx), oy*wo + ox] = x[c, oy*s + ky - 1, ox*s + kx - 1]
template <class T>
void im2col(const Tensor<T>& x, int stride, int ho, int wo, T* cols) {
  const std::size_t p = static_cast<std::size_t>(ho) * wo;
  for (int c = 0; c < x.channels; ++c) {
    const T* src = x.data.data() + c * x.plane();
    for (int ky = 0; ky < 3; ++ky) {
      for (int kx = 0; kx < 3; ++kx) {
        T* row = cols + (static_cast<std::size_t>(c) * 9 + ky * 3 + kx) * p;
        for (int oy = 0; oy < ho; ++oy) {
          T* dst = row + static_cast<std::size_t>(oy) * wo;
          const int iy = oy * stride + ky - 1;
          if (iy < 0 || iy >= x.height) {
            std::fill(dst, dst + wo, T(0));
            continue;
          }
          const T* line = src + static_cast<std::size_t>(iy) * x.width;
          if (stride == 1) {
            const int lo = std::max(0, 1 - kx);
            const int hi = std::min(wo, x.width + 1 - kx);
            std::fill(dst, dst + lo, T(0));
            std::memcpy(dst + lo, line + lo + kx - 1, sizeof(T) * std::max(0, hi - lo));
            std::fill(dst + std::max(lo, hi), dst + wo, T(0));
          } else {
            for (int ox = 0; ox < wo; ++ox) {
              const int ix = ox * stride + kx - 1;
              dst[ox] = (ix >= 0 && ix < x.width) ? line[ix] : T(0);
            }
          }
        }
      }
    }
  }
}

template <class T>
void col2im(const T* cols, int stride, int ho, int wo, Tensor<T>& dx) {
  const std::size_t p = static_cast<std::size_t>(ho) * wo;
  for (int c = 0; c < dx.channels; ++c) {
    T* dst = dx.data.data() + c * dx.plane();
    for (int ky = 0; ky < 3; ++ky) {
      for (int kx = 0; kx < 3; ++kx) {
        const T* row = cols + (static_cast<std::size_t>(c) * 9 + ky * 3 + kx) * p;
        for (int oy = 0; oy < ho; ++oy) {
          const int iy = oy * stride + ky - 1;
          if (iy < 0 || iy >= dx.height) continue;
          T* line = dst + static_cast<std::size_t>(iy) * dx.width;
          const T* src = row + static_cast<std::size_t>(oy) * wo;
          for (int ox = 0; ox < wo; ++ox) {
            const int ix = ox * stride + kx - 1;
            if (ix >= 0 && ix < dx.width) line[ix] += src[ox];
          }
        }
      }
    }
  }
}

}  // namespace

template <class T>
Conv2d<T>::Conv2d(int in_channels, int out_channels, int stride)
    : in_(in_channels), out_(out_channels), stride_(stride) {
  if (in_channels < 1 || out_channels < 1) throw ConfigError("conv channels must be positive");
  if (stride != 1 && stride != 2) throw ConfigError("conv stride must be 1 or 2");
  const std::size_t k = static_cast<std::size_t>(in_channels) * 9;
  weight.assign(static_cast<std::size_t>(out_channels) * k, T(0));
  grad_weight.assign(weight.size(), T(0));
  bias.assign(static_cast<std::size_t>(out_channels), T(0));
  grad_bias.assign(bias.size(), T(0));
}

template <class T>
void Conv2d<T>::init(std::mt19937_64& rng, double gain) {
  std::normal_distribution<double> normal(0.0, gain * std::sqrt(2.0 / (9.0 * in_)));
  for (T& w : weight) w = static_cast<T>(normal(rng));
  std::fill(bias.begin(), bias.end(), T(0));
}

template <class T>
void Conv2d<T>::zero() {
  std::fill(weight.begin(), weight.end(), T(0));
  std::fill(bias.begin(), bias.end(), T(0));
}

template <class T>
Tensor<T> Conv2d<T>::forward(const Tensor<T>& x) const {
  if (x.channels != in_) throw ShapeError("conv input channel mismatch");
  const int ho = output_size(x.height);
  const int wo = output_size(x.width);
  const int p = ho * wo;
  const int k = in_ * 9;
  std::vector<T>& cols = scratch_columns<T>();
  cols.resize(static_cast<std::size_t>(k) * p);
  im2col(x, stride_, ho, wo, cols.data());

  Tensor<T> y(out_, ho, wo);
  MapMat<T> out(y.data.data(), out_, p);
  out.noalias() = ConstMapMat<T>(weight.data(), out_, k) * ConstMapMat<T>(cols.data(), k, p);
  for (int o = 0; o < out_; ++o) out.row(o).array() += bias[o];
  return y;
}

template <class T>
Tensor<T> Conv2d<T>::backward(const Tensor<T>& x, const Tensor<T>& dy, bool need_dx,
                              bool accumulate) {
  const int ho = output_size(x.height);
  const int wo = output_size(x.width);
  if (dy.channels != out_ || dy.height != ho || dy.width != wo)
    throw ShapeError("conv gradient shape mismatch");
  const int p = ho * wo;
  const int k = in_ * 9;
  std::vector<T>& cols = scratch_columns<T>();
  cols.resize(static_cast<std::size_t>(k) * p);
  ConstMapMat<T> grad_out(dy.data.data(), out_, p);

  if (accumulate) {
    im2col(x, stride_, ho, wo, cols.data());
    MapMat<T>(grad_weight.data(), out_, k).noalias() +=
        grad_out * ConstMapMat<T>(cols.data(), k, p).transpose();
    // Plain loop: Eigen's vectorized sum peels by alignment, which would make
    // the summation order depend on where the buffer happens to live.
    for (int o = 0; o < out_; ++o) {
      const T* row = dy.data.data() + static_cast<std::size_t>(o) * p;
      T sum = T(0);
      for (int i = 0; i < p; ++i) sum += row[i];
      grad_bias[o] += sum;
    }
  }
  Tensor<T> dx;
  if (need_dx) {
    MapMat<T>(cols.data(), k, p).noalias() =
        ConstMapMat<T>(weight.data(), out_, k).transpose() * grad_out;
    dx = Tensor<T>(in_, x.height, x.width);
    col2im(cols.data(), stride_, ho, wo, dx);
  }
  return dx;
}

template <class T>
void Conv2d<T>::append_params(const std::string& prefix, std::vector<ParamView<T>>& out) {
  out.push_back({prefix + ".weight", weight, grad_weight});
  out.push_back({prefix + ".bias", bias, grad_bias});
}

template <class T>
void relu_inplace(Tensor<T>& x) {
  for (T& v : x.data) v = v > T(0) ? v : T(0);
}

template <class T>
void relu_backward_inplace(const Tensor<T>& pre, Tensor<T>& dy) {
  for (std::size_t i = 0; i < dy.size(); ++i)
    if (!(pre.data[i] > T(0))) dy.data[i] = T(0);
}

template <class T>
void leaky_relu_inplace(Tensor<T>& x, T slope) {
  for (T& v : x.data) v = v > T(0) ? v : v * slope;
}

template <class T>
void leaky_relu_backward_inplace(const Tensor<T>& pre, Tensor<T>& dy, T slope) {
  for (std::size_t i = 0; i < dy.size(); ++i)
    if (!(pre.data[i] > T(0))) dy.data[i] *= slope;
}

template <class T>
T sigmoid(T x) {
  if (x >= T(0)) return T(1) / (T(1) + std::exp(-x));
  const T e = std::exp(x);
  return e / (T(1) + e);
}

template class Conv2d<float>;
template class Conv2d<double>;
template void relu_inplace<float>(Tensor<float>&);
template void relu_inplace<double>(Tensor<double>&);
template void relu_backward_inplace<float>(const Tensor<float>&, Tensor<float>&);
template void relu_backward_inplace<double>(const Tensor<double>&, Tensor<double>&);
template void leaky_relu_inplace<float>(Tensor<float>&, float);
template void leaky_relu_inplace<double>(Tensor<double>&, double);
template void leaky_relu_backward_inplace<float>(const Tensor<float>&, Tensor<float>&, float);
template void leaky_relu_backward_inplace<double>(const Tensor<double>&, Tensor<double>&,
                                                  double);
template float sigmoid<float>(float);
template double sigmoid<double>(double);

}  // namespace stabkit::nn
