#include <chrono>
#include <fstream>
#include <numeric>
#include <optional>

#include <spdlog/spdlog.h>

#include "cli.hpp"
#include "stabkit/core/error.hpp"
#include "stabkit/core/sequence_io.hpp"
#include "stabkit/interp/iterative.hpp"

namespace stabkit::cli {

namespace {

struct StabilizeOptions {
  std::string input;
  std::string method = "iterative";
  std::string checkpoint;
  std::string refiner;
  int k = 4;
  int m = 5;
  int skip = 1;
};

void run_stabilize(const Globals& g, const StabilizeOptions& o) {
  const FrameSequence input = load_sequence(o.input);

  std::optional<nn::Generator<float>> net;
  std::optional<nn::Generator<float>> refiner_net;
  interp::StabilizeConfig cfg{o.m, o.k, o.skip};
  if (o.method == "net") {
    if (o.checkpoint.empty()) throw ConfigError("--method net needs --checkpoint");
    net.emplace(nn::load_checkpoint(o.checkpoint));
    if (net->spec().kind != "stabnet")
      throw ConfigError("--checkpoint does not hold a stabilization network");
  } else {
    cfg.validate();
    if (!o.refiner.empty()) {
      refiner_net.emplace(nn::load_checkpoint(o.refiner));
      if (refiner_net->spec().kind != "refiner")
        throw ConfigError("--refiner does not hold a refiner network");
    }
  }

  std::vector<double> frame_ms;
  const auto t0 = std::chrono::steady_clock::now();
  std::optional<FrameSequence> output;
  if (net) {
    output.emplace(nn::net_stabilize(*net, input, &frame_ms));
  } else {
    interp::Refiner refine;
    if (refiner_net) {
      refine = [&](const std::array<Image, 4>& nb, const Image& cur) {
        return nn::refiner_forward(*refiner_net, nb, cur);
      };
    }
    output.emplace(interp::iterative_stabilize(input, interp::builtin_interp,
                                               refiner_net ? &refine : nullptr, cfg));
    // The iterations sweep all frames together; report the mean per frame.
    const double total =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    frame_ms.assign(input.size(), total / static_cast<double>(input.size()));
  }
  const double mean_ms =
      std::accumulate(frame_ms.begin(), frame_ms.end(), 0.0) / static_cast<double>(frame_ms.size());

  const auto out = ensure_out_dir(g);
  save_sequence(*output, out);
  {
    std::ofstream t(out / "timing.csv");
    if (!t) throw IoError("cannot write timing.csv");
    t << "frame,ms\n";
    for (std::size_t i = 0; i < frame_ms.size(); ++i) t << i << ',' << frame_ms[i] << '\n';
  }
  spdlog::info("stabilized {} frames with {} in {:.2f} ms/frame", input.size(), o.method,
               mean_ms);

  nlohmann::json opts{{"input", o.input}, {"method", o.method}};
  if (net) {
    opts["checkpoint"] = o.checkpoint;
  } else {
    opts.update({{"k", o.k}, {"m", o.m}, {"skip", o.skip}, {"refiner", o.refiner}});
  }
  write_run_json(g, {"stabilize"}, opts);
}

}  // namespace

void add_stabilize(CLI::App& app, Globals& g) {
  static StabilizeOptions o;
  auto* s = app.add_subcommand("stabilize", "Stabilize a frame sequence");
  s->add_option("--input", o.input, "Input sequence directory")->required();
  s->add_option("--method", o.method, "iterative or net")
      ->check(CLI::IsMember({"iterative", "net"}))
      ->capture_default_str();
  s->add_option("--checkpoint", o.checkpoint, "Stabilization network (method net)");
  s->add_option("--refiner", o.refiner, "Refiner checkpoint (method iterative)");
  s->add_option("--k", o.k, "Refine every k iterations")->capture_default_str();
  s->add_option("--m", o.m, "Interpolation iterations")->capture_default_str();
  s->add_option("--skip", o.skip, "Interpolation neighbour distance")->capture_default_str();
  actions().emplace_back(s, [&g] { run_stabilize(g, o); });
}

}  // namespace stabkit::cli
