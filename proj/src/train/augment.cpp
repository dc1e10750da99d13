#include "stabkit/train/augment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "stabkit/core/error.hpp"
#include "stabkit/core/image_ops.hpp"

namespace stabkit::train {

AugmentSpec AugmentSpec::none() {
  AugmentSpec s;
  s.flip_h = s.flip_v = s.reverse_order = false;
  s.brightness = s.hue = 0.0;
  s.gamma_min = s.gamma_max = 1.0;
  s.contrast_min = s.contrast_max = 1.0;
  return s;
}

void AugmentSpec::validate() const {
  if (!(probability >= 0.0 && probability <= 1.0)) throw ConfigError("probability outside [0,1]");
  if (!(resize_min > 0.0 && resize_min <= resize_max)) throw ConfigError("bad resize range");
  if (!(gamma_min > 0.0 && gamma_min <= gamma_max)) throw ConfigError("bad gamma range");
  if (!(contrast_min >= 0.0 && contrast_min <= contrast_max)) throw ConfigError("bad contrast range");
  if (brightness < 0.0 || hue < 0.0) throw ConfigError("negative adjustment range");
}

Image adjust_hue(const Image& src, double turns) {
  // Rotation of the chroma plane in YIQ.
  const double a = 2.0 * std::numbers::pi * turns;
  const double c = std::cos(a);
  const double s = std::sin(a);
  Image out = src;
  auto px = out.data();
  for (std::size_t i = 0; i + 2 < px.size(); i += 3) {
    const double r = px[i], g = px[i + 1], b = px[i + 2];
    const double y = 0.299 * r + 0.587 * g + 0.114 * b;
    const double iq_i = 0.596 * r - 0.274 * g - 0.322 * b;
    const double iq_q = 0.211 * r - 0.523 * g + 0.312 * b;
    const double ri = c * iq_i - s * iq_q;
    const double rq = s * iq_i + c * iq_q;
    px[i] = static_cast<float>(y + 0.956 * ri + 0.621 * rq);
    px[i + 1] = static_cast<float>(y - 0.272 * ri - 0.647 * rq);
    px[i + 2] = static_cast<float>(y - 1.106 * ri + 1.703 * rq);
  }
  return out;
}

Image adjust_gamma(const Image& src, double gamma) {
  Image out = src;
  for (float& v : out.data()) v = static_cast<float>(std::pow(std::clamp(v, 0.0f, 1.0f), gamma));
  return out;
}

TrainSample augment(const TrainSample& sample, const AugmentSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto coin = [&](bool enabled) { return enabled && unit(rng) < spec.probability; };
  auto range = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  // Draw everything up front so the sequence of draws never depends on data.
  const bool fh = coin(spec.flip_h);
  const bool fv = coin(spec.flip_v);
  const bool rev = coin(spec.reverse_order);
  const double scale = range(spec.resize_min, spec.resize_max);
  const double bright = range(-spec.brightness, spec.brightness);
  const double hue = range(-spec.hue, spec.hue);
  const double gamma = range(spec.gamma_min, spec.gamma_max);
  const double contrast = range(spec.contrast_min, spec.contrast_max);

  auto apply = [&](const Image& src) {
    Image img = src;
    if (fh) img = flip_horizontal(img);
    if (fv) img = flip_vertical(img);
    if (scale != 1.0) {
      const int w = std::max(1, static_cast<int>(std::lround(img.width() * scale)));
      const int h = std::max(1, static_cast<int>(std::lround(img.height() * scale)));
      img = resize_bilinear(img, w, h);
    }
    if (bright != 0.0 || contrast != 1.0) {
      for (float& v : img.data())
        v = static_cast<float>((v - 0.5) * contrast + 0.5 + bright);
    }
    if (gamma != 1.0) img = adjust_gamma(img, gamma);
    if (hue != 0.0) img = adjust_hue(img, hue);
    clamp_unit(img);
    return img;
  };

  TrainSample out;
  out.ordered = sample.ordered;
  out.inputs.reserve(sample.inputs.size());
  for (const Image& img : sample.inputs) out.inputs.push_back(apply(img));
  out.target = apply(sample.target);
  if (rev) {
    const std::size_t n = std::min(sample.ordered, out.inputs.size());
    std::reverse(out.inputs.begin(), out.inputs.begin() + static_cast<std::ptrdiff_t>(n));
  }
  return out;
}

}  // namespace stabkit::train
