#include <doctest.h>

#include <cmath>
#include <fstream>

#include "gradcheck.hpp"
#include "stabkit/core/error.hpp"
#include "stabkit/core/image_ops.hpp"
#include "stabkit/nn/checkpoint.hpp"
#include "stabkit/nn/networks.hpp"
#include "stabkit/synth/synth.hpp"
#include "test_helpers.hpp"

using namespace stabkit;
using namespace stabkit::nn;

namespace {

// Direct 3x3 convolution with zero padding.
Tensor<double> naive_conv(const Conv2d<double>& conv, const Tensor<double>& x) {
  const int s = conv.stride();
  Tensor<double> y(conv.out_channels(), conv.output_size(x.height), conv.output_size(x.width));
  for (int o = 0; o < y.channels; ++o)
    for (int oy = 0; oy < y.height; ++oy)
      for (int ox = 0; ox < y.width; ++ox) {
        double acc = conv.bias[o];
        for (int c = 0; c < x.channels; ++c)
          for (int ky = 0; ky < 3; ++ky)
            for (int kx = 0; kx < 3; ++kx) {
              const int iy = oy * s + ky - 1;
              const int ix = ox * s + kx - 1;
              if (iy < 0 || ix < 0 || iy >= x.height || ix >= x.width) continue;
              acc += conv.weight[(o * x.channels + c) * 9 + ky * 3 + kx] * x.at(c, iy, ix);
            }
        y.at(o, oy, ox) = acc;
      }
  return y;
}

std::array<Image, 5> window_of(const FrameSequence& seq, std::size_t t) {
  std::array<Image, 5> w;
  for (int k = -2; k <= 2; ++k) w[k + 2] = seq[clamp_index(static_cast<long long>(t) + k, seq.size())];
  return w;
}

}  // namespace

TEST_CASE("conv matches direct evaluation") {
  for (int stride : {1, 2}) {
    for (auto [h, w] : {std::pair{7, 9}, {8, 8}, {5, 12}}) {
      Conv2d<double> conv(3, 4, stride);
      test::randomize_params(std::vector<ParamView<double>>{{"w", conv.weight, conv.grad_weight},
                                                            {"b", conv.bias, conv.grad_bias}},
                             stride * 100 + h, 0.5);
      const auto x = test::random_tensor(3, h, w, 7 + h, -1.0, 1.0);
      const auto y = conv.forward(x);
      const auto ref = naive_conv(conv, x);
      REQUIRE(y.same_shape(ref));
      for (std::size_t i = 0; i < y.size(); ++i) CHECK(y.data[i] == doctest::Approx(ref.data[i]).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(Conv2d<float>(3, 4, 3), ConfigError);
  CHECK_THROWS_AS(Conv2d<float>(3, 4).forward(Tensor<float>(2, 8, 8)), ShapeError);
}

TEST_CASE("conv input gradient matches finite differences") {
  for (int stride : {1, 2}) {
    Conv2d<double> conv(2, 3, stride);
    std::mt19937_64 rng(5);
    conv.init(rng);
    const auto x = test::random_tensor(2, 6, 7, 11);
    const auto probe = test::random_tensor(3, conv.output_size(6), conv.output_size(7), 12, -1, 1);
    const auto dx = conv.backward(x, probe, true, false);
    auto xp = x;
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double keep = xp.data[k];
      xp.data[k] = keep + 1e-5;
      const double up = test::dot(conv.forward(xp), probe);
      xp.data[k] = keep - 1e-5;
      const double down = test::dot(conv.forward(xp), probe);
      xp.data[k] = keep;
      CHECK(dx.data[k] == doctest::Approx((up - down) / 2e-5).epsilon(1e-6));
    }
    // Without accumulate the parameter gradients stay untouched.
    for (double g : conv.grad_weight) CHECK(g == 0.0);
  }
}

TEST_CASE("generators: identity at init and shape contract") {
  const FrameSequence seq = test::random_sequence(5, 32, 24, 3);
  Generator<float> stab(stabnet_spec(2, 8));
  stab.init(1);
  const auto window = window_of(seq, 2);
  CHECK(stabnet_forward(stab, window) == seq[2]);

  Generator<float> refiner(refiner_spec(2, 8));
  refiner.init(2);
  const std::array<Image, 4> neighbors{seq[0], seq[1], seq[3], seq[4]};
  const Image degraded = average(seq[1], seq[3]);
  CHECK(refiner_forward(refiner, neighbors, degraded) == degraded);

  SUBCASE("trained-like weights keep shape and finiteness") {
    Generator<float> net(refiner_spec(2, 8));
    std::mt19937_64 rng(9);
    std::normal_distribution<float> normal(0.0f, 0.05f);
    for (auto& p : net.params())
      for (float& v : p.value) v = normal(rng);
    const FrameSequence big = test::random_sequence(5, 32, 32, 4);
    const Image out = refiner_forward(net, {big[0], big[1], big[3], big[4]}, big[2]);
    CHECK(out.width() == 32);
    CHECK(out.height() == 32);
    for (float v : out.data()) CHECK(std::isfinite(v));
  }
  SUBCASE("shape errors") {
    auto bad = window;
    bad[4] = Image(16, 24, 3);
    CHECK_THROWS_AS(stabnet_forward(stab, bad), ShapeError);
    CHECK_THROWS_AS(stabnet_forward(stab, std::span<const Image>(window.data(), 4)), ShapeError);
    CHECK_THROWS_AS(refiner_forward(refiner, neighbors, Image(8, 8, 3)), ShapeError);
  }
  SUBCASE("spec validation") {
    CHECK_THROWS_AS(Generator<float>(stabnet_spec(0, 8)), ConfigError);
    GeneratorSpec odd = stabnet_spec(1, 8);
    odd.in_channels = 12;
    CHECK_THROWS_AS(Generator<float>{odd}, ConfigError);
    CHECK(generator_spec_from_json(to_json(refiner_spec(3, 5))).width == 5);
  }
}

TEST_CASE("net_stabilize with an identity network returns the input") {
  const FrameSequence seq = test::random_sequence(5, 16, 16, 8);
  Generator<float> net(stabnet_spec(1, 4));
  net.init(4);
  std::vector<double> ms;
  const FrameSequence out = net_stabilize(net, seq, &ms);
  CHECK(out == seq);
  CHECK(ms.size() == 5);
}

TEST_CASE("discriminator") {
  Discriminator<float> disc({{8, 8, 16, 16}, 0.2});
  disc.init(3);
  const Image frame = synth::make_source_image(24, 20, 1);
  const float s = disc.score(to_tensor<float>(frame));
  CHECK(s > 0.0f);
  CHECK(s < 1.0f);
  CHECK(disc.score(to_tensor<float>(frame)) == s);
  CHECK(DiscriminatorSpec{}.min_input() == 16);
  CHECK_THROWS_AS(disc.score(Tensor<float>(3, 15, 32)), ShapeError);
  CHECK_THROWS_AS(disc.score(Tensor<float>(1, 32, 32)), ShapeError);
  CHECK_NOTHROW(Discriminator<float>(DiscriminatorSpec{}).score(Tensor<float>(3, 16, 16, 0.5f)));
}

TEST_CASE("feature extractor is frozen and shift sensitive") {
  const FeatureExtractor<float> phi;
  const Image frame = synth::make_source_image(48, 48, 2);
  const auto a = phi.forward(to_tensor<float>(frame));
  const auto b = phi.forward(to_tensor<float>(frame));
  CHECK(a.data == b.data);
  CHECK(FeatureExtractor<float>().forward(to_tensor<float>(frame)).data == a.data);
  CHECK(a.height == 12);
  const auto shifted = phi.forward(to_tensor<float>(translate(frame, 5.0, 0.0)));
  double dist = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) dist += std::pow(a.data[i] - shifted.data[i], 2);
  CHECK(dist > 0.0);
  FeatureExtractorSpec shallow;
  shallow.strides = {1, 1, 1, 2};
  CHECK_THROWS_AS(FeatureExtractor<float>{shallow}, ConfigError);
}

TEST_CASE("feature extractor input gradient") {
  const FeatureExtractor<double> phi;
  const auto x = test::random_tensor(3, 12, 12, 21);
  FeatureExtractor<double>::Trace trace;
  const auto f = phi.forward(x, &trace);
  const auto probe = test::random_tensor(f.channels, f.height, f.width, 22, -1, 1);
  const auto dx = phi.backward(trace, probe);
  auto xp = x;
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::size_t> pick(0, x.size() - 1);
  for (int i = 0; i < 40; ++i) {
    const std::size_t k = pick(rng);
    const double keep = xp.data[k];
    xp.data[k] = keep + 1e-4;
    const double up = test::dot(phi.forward(xp), probe);
    xp.data[k] = keep - 1e-4;
    const double down = test::dot(phi.forward(xp), probe);
    xp.data[k] = keep;
    CHECK(test::rel_error(dx.data[k], (up - down) / 2e-4) <= 1e-3);
  }
}

TEST_CASE("analytic gradients match finite differences") {
  SUBCASE("stabnet") {
    const auto r = test::gradcheck_generator(stabnet_spec(2, 4), 16, 31);
    INFO(r.worst);
    CHECK(r.max_rel_error <= 1e-3);
    CHECK(r.checked > 30);
  }
  SUBCASE("refiner") {
    const auto r = test::gradcheck_generator(refiner_spec(2, 4), 16, 41);
    INFO(r.worst);
    CHECK(r.max_rel_error <= 1e-3);
  }
  SUBCASE("discriminator") {
    const auto r = test::gradcheck_discriminator({{4, 8, 8, 16}, 0.2}, 16, 51);
    INFO(r.worst);
    CHECK(r.max_rel_error <= 1e-3);
  }
}

TEST_CASE("checkpoint round trip and integrity") {
  test::TempDir dir("ckpt");
  Generator<float> net(stabnet_spec(2, 6));
  net.init(12);
  for (auto& p : net.params())
    for (std::size_t i = 0; i < p.value.size(); ++i) p.value[i] += 0.001f * static_cast<float>(i % 7);
  CheckpointInfo info{net.spec(), 1, 250, 99, "loss.csv"};
  save_checkpoint(dir.path() / "c", net, info);

  CheckpointInfo back;
  Generator<float> loaded = load_checkpoint(dir.path() / "c", &back);
  CHECK(back.stage == 1);
  CHECK(back.iteration == 250);
  CHECK(back.seed == 99);
  CHECK(back.loss_history_path == "loss.csv");
  auto a = net.params();
  auto b = loaded.params();
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK(std::equal(a[i].value.begin(), a[i].value.end(), b[i].value.begin()));

  {
    std::fstream f(dir.path() / "c" / "params.bin", std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(40);
    f.put('\x7f');
  }
  CHECK_THROWS_AS(load_checkpoint(dir.path() / "c"), IntegrityError);
  CHECK_THROWS_AS(load_checkpoint(dir.path() / "missing"), IoError);
}
