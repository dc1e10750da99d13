#pragma once

#include "stabkit/core/image.hpp"
#include "stabkit/nn/networks.hpp"

namespace stabkit::train {

// All reductions are means over every pixel and channel. When grad is given
// it receives d(loss)/d(pred). Shape mismatches throw ShapeError.
double loss_l2(const nn::Tensor<float>& pred, const nn::Tensor<float>& target,
               nn::Tensor<float>* grad = nullptr);
double loss_l1(const nn::Tensor<float>& pred, const nn::Tensor<float>& target,
               nn::Tensor<float>* grad = nullptr);
// Mean squared distance between phi features.
double loss_perceptual(const nn::Tensor<float>& pred, const nn::Tensor<float>& target,
                       const nn::FeatureExtractor<float>& phi, nn::Tensor<float>* grad = nullptr);

double loss_l2(const Image& pred, const Image& target);
double loss_perceptual(const Image& pred, const Image& target,
                       const nn::FeatureExtractor<float>& phi);

// content + lambda * (-log disc_score). Throws RangeError unless
// disc_score is in (0,1) and lambda_adv >= 0.
double loss_stage2(double content, double disc_score, double lambda_adv);
double loss_stage2(const Image& pred, const Image& target, double disc_score, double lambda_adv,
                   const nn::FeatureExtractor<float>& phi);

}  // namespace stabkit::train
