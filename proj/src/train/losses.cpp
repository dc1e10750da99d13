#include "stabkit/train/losses.hpp"

#include <cmath>

#include "stabkit/core/error.hpp"

namespace stabkit::train {

namespace {

void require_same(const nn::Tensor<float>& a, const nn::Tensor<float>& b) {
  if (!a.same_shape(b)) throw ShapeError("loss operands differ in shape");
}

}  // namespace

double loss_l2(const nn::Tensor<float>& pred, const nn::Tensor<float>& target,
               nn::Tensor<float>* grad) {
  require_same(pred, target);
  const double n = static_cast<double>(pred.size());
  if (grad) *grad = nn::Tensor<float>(pred.channels, pred.height, pred.width);
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = static_cast<double>(pred.data[i]) - target.data[i];
    sum += d * d;
    if (grad) grad->data[i] = static_cast<float>(2.0 * d / n);
  }
  return sum / n;
}

double loss_l1(const nn::Tensor<float>& pred, const nn::Tensor<float>& target,
               nn::Tensor<float>* grad) {
  require_same(pred, target);
  const double n = static_cast<double>(pred.size());
  if (grad) *grad = nn::Tensor<float>(pred.channels, pred.height, pred.width);
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = static_cast<double>(pred.data[i]) - target.data[i];
    sum += std::abs(d);
    if (grad) grad->data[i] = static_cast<float>((d > 0.0) - (d < 0.0)) / static_cast<float>(n);
  }
  return sum / n;
}

double loss_perceptual(const nn::Tensor<float>& pred, const nn::Tensor<float>& target,
                       const nn::FeatureExtractor<float>& phi, nn::Tensor<float>* grad) {
  require_same(pred, target);
  nn::FeatureExtractor<float>::Trace trace;
  const auto fp = phi.forward(pred, grad ? &trace : nullptr);
  const auto ft = phi.forward(target);
  nn::Tensor<float> dfeat;
  const double loss = loss_l2(fp, ft, grad ? &dfeat : nullptr);
  if (grad) *grad = phi.backward(trace, dfeat);
  return loss;
}

double loss_l2(const Image& pred, const Image& target) {
  if (!pred.same_shape(target)) throw ShapeError("loss operands differ in shape");
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = static_cast<double>(pred.data()[i]) - target.data()[i];
    sum += d * d;
  }
  return sum / static_cast<double>(pred.size());
}

double loss_perceptual(const Image& pred, const Image& target,
                       const nn::FeatureExtractor<float>& phi) {
  if (!pred.same_shape(target)) throw ShapeError("loss operands differ in shape");
  return loss_perceptual(nn::to_tensor<float>(pred), nn::to_tensor<float>(target), phi);
}

double loss_stage2(double content, double disc_score, double lambda_adv) {
  if (!(disc_score > 0.0 && disc_score < 1.0))
    throw RangeError("discriminator score must lie in (0,1)");
  if (!(lambda_adv >= 0.0)) throw RangeError("adversarial weight must be non-negative");
  if (lambda_adv == 0.0) return content;
  return content + lambda_adv * -std::log(disc_score);
}

double loss_stage2(const Image& pred, const Image& target, double disc_score, double lambda_adv,
                   const nn::FeatureExtractor<float>& phi) {
  return loss_stage2(loss_perceptual(pred, target, phi), disc_score, lambda_adv);
}

}  // namespace stabkit::train
