#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "stabkit/core/frame_sequence.hpp"
#include "stabkit/nn/layers.hpp"

namespace stabkit::nn {

// Residual image-to-image generator shared by the stabilization network and
// the refiner: head conv, residual blocks (conv-relu-conv plus identity) at
// constant resolution, tail conv, and a global skip from three input channels.
struct GeneratorSpec {
  std::string kind;           // "stabnet" or "refiner"
  int in_channels = 15;
  int skip_channel = 6;       // first of the 3 channels added to the output
  int width = 64;
  int residual_blocks = 8;

  void validate() const;
};

// Five frames t-2..t+2, skip from the centre frame.
GeneratorSpec stabnet_spec(int residual_blocks = 8, int width = 64);
// Four clean neighbours followed by the degraded centre, skip from the latter.
GeneratorSpec refiner_spec(int residual_blocks = 6, int width = 64);

nlohmann::json to_json(const GeneratorSpec& spec);
GeneratorSpec generator_spec_from_json(const nlohmann::json& j);

template <class T>
class Generator {
 public:
  struct Trace {
    Tensor<T> input;
    std::vector<Tensor<T>> block_in;
    std::vector<Tensor<T>> block_mid;  // first conv output, before the relu
    Tensor<T> body_out;
  };

  explicit Generator(const GeneratorSpec& spec);

  const GeneratorSpec& spec() const { return spec_; }

  // Random body, zero tail: the fresh network returns its skip channels.
  void init(std::uint64_t seed);

  Tensor<T> forward(const Tensor<T>& x, Trace* trace = nullptr) const;
  // Accumulates parameter gradients of a loss with gradient dy at the output.
  void backward(const Trace& trace, const Tensor<T>& dy);

  std::vector<ParamView<T>> params();
  void zero_grad();

 private:
  GeneratorSpec spec_;
  Conv2d<T> head_;
  std::vector<std::array<Conv2d<T>, 2>> blocks_;
  Conv2d<T> tail_;
};

// Strided conv stages with leaky relu, global average pool, linear, sigmoid.
struct DiscriminatorSpec {
  std::vector<int> widths{64, 128, 256, 512};  // one stride-2 stage each
  double leaky_slope = 0.2;

  int min_input() const;  // smallest side accepted
  void validate() const;
};

nlohmann::json to_json(const DiscriminatorSpec& spec);

template <class T>
class Discriminator {
 public:
  struct Trace {
    std::vector<Tensor<T>> stage_in;
    std::vector<Tensor<T>> stage_pre;  // conv outputs before the activation
    std::vector<T> pooled;
    T logit = T(0);
  };

  explicit Discriminator(const DiscriminatorSpec& spec);

  const DiscriminatorSpec& spec() const { return spec_; }
  void init(std::uint64_t seed);

  // Pre-sigmoid score. Throws ShapeError for undersized or non-RGB input.
  T logit(const Tensor<T>& frame, Trace* trace = nullptr) const;
  T score(const Tensor<T>& frame) const { return sigmoid(logit(frame)); }

  // Back-propagates d(loss)/d(logit). Parameter gradients are accumulated only
  // when accumulate is set; the input gradient is returned when need_dx is set.
  Tensor<T> backward(const Trace& trace, T dlogit, bool need_dx, bool accumulate);

  std::vector<ParamView<T>> params();
  void zero_grad();

 private:
  DiscriminatorSpec spec_;
  std::vector<Conv2d<T>> stages_;
  std::vector<T> fc_weight_;
  std::vector<T> fc_grad_weight_;
  std::vector<T> fc_bias_{T(0)};
  std::vector<T> fc_grad_bias_{T(0)};
};

// Frozen feature extractor for the perceptual loss: a fixed-seed random conv
// stack with relu activations and two stride-2 stages.
struct FeatureExtractorSpec {
  std::vector<int> widths{16, 16, 32, 32};
  std::vector<int> strides{1, 2, 1, 2};
  std::uint64_t seed = 0x5eedf00dULL;

  void validate() const;
};

nlohmann::json to_json(const FeatureExtractorSpec& spec);

template <class T>
class FeatureExtractor {
 public:
  struct Trace {
    std::vector<Tensor<T>> layer_in;
    std::vector<Tensor<T>> layer_pre;
  };

  explicit FeatureExtractor(const FeatureExtractorSpec& spec = {});

  const FeatureExtractorSpec& spec() const { return spec_; }
  Tensor<T> forward(const Tensor<T>& frame, Trace* trace = nullptr) const;
  // Input gradient only; the weights never change.
  Tensor<T> backward(const Trace& trace, const Tensor<T>& dy) const;

 private:
  FeatureExtractorSpec spec_;
  mutable std::vector<Conv2d<T>> layers_;
};

// Inference helpers on full frames.
Image stabnet_forward(const Generator<float>& net, std::span<const Image> window);
Image refiner_forward(const Generator<float>& net, const std::array<Image, 4>& neighbors,
                      const Image& degraded);

// Runs the stabilization network on every frame with clamped (edge-replicated)
// neighbours; outputs are clamped to [0,1]. Per-frame wall-clock time in
// milliseconds goes to frame_ms when given.
FrameSequence net_stabilize(const Generator<float>& net, const FrameSequence& seq,
                            std::vector<double>* frame_ms = nullptr);

}  // namespace stabkit::nn
