#include "stabkit/nn/networks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "stabkit/core/error.hpp"
#include "stabkit/core/image_ops.hpp"

namespace stabkit::nn {

// Residual branches start small so deep stacks stay near identity.
constexpr double kResidualGain = 0.1;

void GeneratorSpec::validate() const {
  if (residual_blocks < 1) throw ConfigError("generator needs at least one residual block");
  if (width < 1) throw ConfigError("generator width must be positive");
  if (in_channels < 3 || skip_channel < 0 || skip_channel + 3 > in_channels)
    throw ConfigError("generator skip channels out of range");
  if (kind == "stabnet" && (in_channels != 15 || skip_channel != 6))
    throw ConfigError("stabnet takes 5 RGB frames with the centre as skip");
  if (kind == "refiner" && (in_channels != 15 || skip_channel != 12))
    throw ConfigError("refiner takes 4 neighbours plus the degraded frame");
}

GeneratorSpec stabnet_spec(int residual_blocks, int width) {
  return {"stabnet", 15, 6, width, residual_blocks};
}

GeneratorSpec refiner_spec(int residual_blocks, int width) {
  return {"refiner", 15, 12, width, residual_blocks};
}

nlohmann::json to_json(const GeneratorSpec& spec) {
  return {{"kind", spec.kind},
          {"in_channels", spec.in_channels},
          {"skip_channel", spec.skip_channel},
          {"width", spec.width},
          {"residual_blocks", spec.residual_blocks}};
}

GeneratorSpec generator_spec_from_json(const nlohmann::json& j) {
  try {
    GeneratorSpec spec{j.at("kind").get<std::string>(), j.at("in_channels").get<int>(),
                       j.at("skip_channel").get<int>(), j.at("width").get<int>(),
                       j.at("residual_blocks").get<int>()};
    spec.validate();
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad generator spec: ") + e.what());
  }
}

template <class T>
Generator<T>::Generator(const GeneratorSpec& spec) : spec_(spec) {
  spec_.validate();
  head_ = Conv2d<T>(spec_.in_channels, spec_.width);
  for (int b = 0; b < spec_.residual_blocks; ++b)
    blocks_.push_back({Conv2d<T>(spec_.width, spec_.width), Conv2d<T>(spec_.width, spec_.width)});
  tail_ = Conv2d<T>(spec_.width, 3);
}

template <class T>
void Generator<T>::init(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  head_.init(rng);
  for (auto& block : blocks_) {
    block[0].init(rng);
    block[1].init(rng, kResidualGain);
  }
  tail_.zero();
}

template <class T>
Tensor<T> Generator<T>::forward(const Tensor<T>& x, Trace* trace) const {
  if (x.channels != spec_.in_channels) throw ShapeError("generator input channel mismatch");
  if (trace) {
    trace->input = x;
    trace->block_in.clear();
    trace->block_mid.clear();
  }
  Tensor<T> h = head_.forward(x);
  for (const auto& block : blocks_) {
    Tensor<T> mid = block[0].forward(h);
    Tensor<T> act = mid;
    relu_inplace(act);
    Tensor<T> branch = block[1].forward(act);
    if (trace) {
      trace->block_in.push_back(h);
      trace->block_mid.push_back(std::move(mid));
    }
    for (std::size_t i = 0; i < h.size(); ++i) h.data[i] += branch.data[i];
  }
  Tensor<T> out = tail_.forward(h);
  if (trace) trace->body_out = std::move(h);
  const std::size_t plane = x.plane();
  for (int c = 0; c < 3; ++c) {
    const T* skip = x.data.data() + (spec_.skip_channel + c) * plane;
    T* dst = out.data.data() + c * plane;
    for (std::size_t i = 0; i < plane; ++i) dst[i] += skip[i];
  }
  return out;
}

template <class T>
void Generator<T>::backward(const Trace& trace, const Tensor<T>& dy) {
  Tensor<T> dh = tail_.backward(trace.body_out, dy, true, true);
  for (std::size_t b = blocks_.size(); b-- > 0;) {
    Tensor<T> act = trace.block_mid[b];
    relu_inplace(act);
    Tensor<T> dact = blocks_[b][1].backward(act, dh, true, true);
    relu_backward_inplace(trace.block_mid[b], dact);
    const Tensor<T> dbranch_in = blocks_[b][0].backward(trace.block_in[b], dact, true, true);
    for (std::size_t i = 0; i < dh.size(); ++i) dh.data[i] += dbranch_in.data[i];
  }
  head_.backward(trace.input, dh, false, true);
}

template <class T>
std::vector<ParamView<T>> Generator<T>::params() {
  std::vector<ParamView<T>> out;
  head_.append_params("head", out);
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    blocks_[b][0].append_params("block" + std::to_string(b) + ".conv0", out);
    blocks_[b][1].append_params("block" + std::to_string(b) + ".conv1", out);
  }
  tail_.append_params("tail", out);
  return out;
}

template <class T>
void Generator<T>::zero_grad() {
  for (auto& p : params()) std::fill(p.grad.begin(), p.grad.end(), T(0));
}

int DiscriminatorSpec::min_input() const {
  // Each stride-2 stage maps n to ceil(n/2); require at least 2x2 at the end.
  return 1 << static_cast<int>(widths.size());
}

void DiscriminatorSpec::validate() const {
  if (widths.empty()) throw ConfigError("discriminator needs at least one stage");
  for (int w : widths)
    if (w < 1) throw ConfigError("discriminator widths must be positive");
  if (!(leaky_slope > 0.0 && leaky_slope < 1.0)) throw ConfigError("leaky slope must be in (0,1)");
}

nlohmann::json to_json(const DiscriminatorSpec& spec) {
  return {{"widths", spec.widths}, {"leaky_slope", spec.leaky_slope}};
}

template <class T>
Discriminator<T>::Discriminator(const DiscriminatorSpec& spec) : spec_(spec) {
  spec_.validate();
  int in = 3;
  for (int w : spec_.widths) {
    stages_.emplace_back(in, w, 2);
    in = w;
  }
  fc_weight_.assign(static_cast<std::size_t>(in), T(0));
  fc_grad_weight_.assign(fc_weight_.size(), T(0));
}

template <class T>
void Discriminator<T>::init(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (auto& stage : stages_) stage.init(rng);
  std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(double(fc_weight_.size())));
  for (T& w : fc_weight_) w = static_cast<T>(normal(rng));
  fc_bias_[0] = T(0);
}

template <class T>
T Discriminator<T>::logit(const Tensor<T>& frame, Trace* trace) const {
  if (frame.channels != 3) throw ShapeError("discriminator takes RGB frames");
  if (frame.width < spec_.min_input() || frame.height < spec_.min_input())
    throw ShapeError("frame smaller than the discriminator minimum of " +
                     std::to_string(spec_.min_input()) + " px");
  const T slope = static_cast<T>(spec_.leaky_slope);
  if (trace) {
    trace->stage_in.clear();
    trace->stage_pre.clear();
  }
  Tensor<T> h = frame;
  for (const auto& stage : stages_) {
    Tensor<T> pre = stage.forward(h);
    if (trace) trace->stage_in.push_back(std::move(h));
    h = pre;
    leaky_relu_inplace(h, slope);
    if (trace) trace->stage_pre.push_back(std::move(pre));
  }
  std::vector<T> pooled(static_cast<std::size_t>(h.channels), T(0));
  const std::size_t plane = h.plane();
  for (int c = 0; c < h.channels; ++c) {
    T sum = T(0);
    for (std::size_t i = 0; i < plane; ++i) sum += h.data[c * plane + i];
    pooled[c] = sum / static_cast<T>(plane);
  }
  T z = fc_bias_[0];
  for (std::size_t c = 0; c < pooled.size(); ++c) z += fc_weight_[c] * pooled[c];
  if (trace) {
    trace->pooled = std::move(pooled);
    trace->logit = z;
  }
  return z;
}

template <class T>
Tensor<T> Discriminator<T>::backward(const Trace& trace, T dlogit, bool need_dx,
                                     bool accumulate) {
  const T slope = static_cast<T>(spec_.leaky_slope);
  if (accumulate) {
    for (std::size_t c = 0; c < fc_weight_.size(); ++c)
      fc_grad_weight_[c] += dlogit * trace.pooled[c];
    fc_grad_bias_[0] += dlogit;
  }
  const Tensor<T>& last = trace.stage_pre.back();
  Tensor<T> dh(last.channels, last.height, last.width);
  const std::size_t plane = dh.plane();
  for (int c = 0; c < dh.channels; ++c) {
    const T g = dlogit * fc_weight_[c] / static_cast<T>(plane);
    std::fill(dh.data.begin() + c * plane, dh.data.begin() + (c + 1) * plane, g);
  }
  for (std::size_t s = stages_.size(); s-- > 0;) {
    leaky_relu_backward_inplace(trace.stage_pre[s], dh, slope);
    const bool want_dx = s > 0 || need_dx;
    dh = stages_[s].backward(trace.stage_in[s], dh, want_dx, accumulate);
  }
  return need_dx ? dh : Tensor<T>();
}

template <class T>
std::vector<ParamView<T>> Discriminator<T>::params() {
  std::vector<ParamView<T>> out;
  for (std::size_t s = 0; s < stages_.size(); ++s)
    stages_[s].append_params("stage" + std::to_string(s), out);
  out.push_back({"fc.weight", fc_weight_, fc_grad_weight_});
  out.push_back({"fc.bias", fc_bias_, fc_grad_bias_});
  return out;
}

template <class T>
void Discriminator<T>::zero_grad() {
  for (auto& p : params()) std::fill(p.grad.begin(), p.grad.end(), T(0));
}

void FeatureExtractorSpec::validate() const {
  if (widths.empty() || widths.size() != strides.size())
    throw ConfigError("feature extractor widths and strides must pair up");
  if (std::count(strides.begin(), strides.end(), 2) < 2)
    throw ConfigError("feature extractor needs at least two downsamplings");
}

nlohmann::json to_json(const FeatureExtractorSpec& spec) {
  return {{"widths", spec.widths}, {"strides", spec.strides}, {"seed", spec.seed}};
}

template <class T>
FeatureExtractor<T>::FeatureExtractor(const FeatureExtractorSpec& spec) : spec_(spec) {
  spec_.validate();
  // Weights are drawn in double so float and double extractors agree.
  std::mt19937_64 rng(spec_.seed);
  int in = 3;
  for (std::size_t i = 0; i < spec_.widths.size(); ++i) {
    Conv2d<double> proto(in, spec_.widths[i], spec_.strides[i]);
    proto.init(rng);
    Conv2d<T> layer(in, spec_.widths[i], spec_.strides[i]);
    std::transform(proto.weight.begin(), proto.weight.end(), layer.weight.begin(),
                   [](double v) { return static_cast<T>(v); });
    layers_.push_back(std::move(layer));
    in = spec_.widths[i];
  }
}

template <class T>
Tensor<T> FeatureExtractor<T>::forward(const Tensor<T>& frame, Trace* trace) const {
  if (frame.channels != 3) throw ShapeError("feature extractor takes RGB frames");
  if (trace) {
    trace->layer_in.clear();
    trace->layer_pre.clear();
  }
  Tensor<T> h = frame;
  for (T& v : h.data) v -= T(0.5);
  for (const auto& layer : layers_) {
    Tensor<T> pre = layer.forward(h);
    if (trace) trace->layer_in.push_back(std::move(h));
    h = pre;
    relu_inplace(h);
    if (trace) trace->layer_pre.push_back(std::move(pre));
  }
  return h;
}

template <class T>
Tensor<T> FeatureExtractor<T>::backward(const Trace& trace, const Tensor<T>& dy) const {
  Tensor<T> dh = dy;
  for (std::size_t l = layers_.size(); l-- > 0;) {
    relu_backward_inplace(trace.layer_pre[l], dh);
    dh = layers_[l].backward(trace.layer_in[l], dh, true, false);
  }
  return dh;
}

template class Generator<float>;
template class Generator<double>;
template class Discriminator<float>;
template class Discriminator<double>;
template class FeatureExtractor<float>;
template class FeatureExtractor<double>;

Image stabnet_forward(const Generator<float>& net, std::span<const Image> window) {
  if (net.spec().in_channels != 15 || window.size() != 5)
    throw ShapeError("stabilization network takes exactly 5 frames");
  return to_image(net.forward(stack_frames<float>(window)));
}

Image refiner_forward(const Generator<float>& net, const std::array<Image, 4>& neighbors,
                      const Image& degraded) {
  const std::array<Image, 5> frames{neighbors[0], neighbors[1], neighbors[2], neighbors[3],
                                    degraded};
  return to_image(net.forward(stack_frames<float>(frames)));
}

FrameSequence net_stabilize(const Generator<float>& net, const FrameSequence& seq,
                            std::vector<double>* frame_ms) {
  std::vector<Image> out;
  out.reserve(seq.size());
  if (frame_ms) frame_ms->clear();
  const auto n = static_cast<long long>(seq.size());
  for (long long t = 0; t < n; ++t) {
    const auto start = std::chrono::steady_clock::now();
    std::array<Image, 5> window;
    for (int k = -2; k <= 2; ++k) window[k + 2] = seq[clamp_index(t + k, seq.size())];
    Image frame = stabnet_forward(net, window);
    clamp_unit(frame);
    out.push_back(std::move(frame));
    if (frame_ms)
      frame_ms->push_back(std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - start)
                              .count());
  }
  return FrameSequence(std::move(out), seq.fps(), seq.name());
}

}  // namespace stabkit::nn
