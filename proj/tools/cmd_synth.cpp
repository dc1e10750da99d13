#include <algorithm>
#include <cstdio>

#include <spdlog/spdlog.h>

#include "cli.hpp"
#include "stabkit/core/error.hpp"
#include "stabkit/core/sequence_io.hpp"
#include "stabkit/synth/synth.hpp"

namespace stabkit::cli {

namespace {

struct PairOptions {
  std::string image;
  int count = 1;
  std::size_t length = 64;
  int width = 128;
  int height = 128;
  double jitter_px = 3.0;
  std::string jitter_rad = "auto";  // scales with jitter_px when left at auto
  int min_freq_bin = 7;
  double speed = 2.0;
  double turn_rate = 0.002;
};

struct RefinerOptions {
  std::string image;
  int count = 1;
  std::size_t length = 16;
  int width = 128;
  int height = 128;
  int iterations = 4;
  int skip = 1;
  double speed = 1.3;
};

double resolve_jitter_rad(const PairOptions& o) {
  if (o.jitter_rad == "auto") return o.jitter_px * (0.01 / 3.0);
  try {
    std::size_t used = 0;
    const double v = std::stod(o.jitter_rad, &used);
    if (used == o.jitter_rad.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("--jitter-rad must be a number or auto, got " + o.jitter_rad);
}

std::filesystem::path item_dir(const std::filesystem::path& out, int count, int i,
                               const char* prefix) {
  if (count == 1) return out;
  char name[32];
  std::snprintf(name, sizeof name, "%s_%03d", prefix, i);
  return out / name;
}

void run_pair(const Globals& g, const PairOptions& o) {
  synth::JitterSpec jitter;
  jitter.amplitude_px = o.jitter_px;
  jitter.amplitude_rad = resolve_jitter_rad(o);
  jitter.min_freq_bin = o.min_freq_bin;
  jitter.seed = g.seed;
  jitter.validate();
  if (o.count < 1) throw ConfigError("--count must be positive");

  const auto out = ensure_out_dir(g);
  const int side = 2 * std::max(o.width, o.height);
  for (int i = 0; i < o.count; ++i) {
    const std::uint64_t seed = g.seed + static_cast<std::uint64_t>(i);
    const Image source = source_image(o.image, side, side, seed);
    const synth::StabPair pair = synth::make_stab_pair(
        source, o.length, {o.width, o.height}, jitter, seed, {o.speed, o.turn_rate});
    const auto dir = item_dir(out, o.count, i, "pair");
    save_sequence(pair.stable, dir / "stable");
    save_sequence(pair.unstable, dir / "unstable");
    write_trajectory_csv(pair.stable_traj, dir / "stable_traj.csv");
    write_trajectory_csv(pair.unstable_traj, dir / "unstable_traj.csv");
    spdlog::info("wrote pair {} ({} frames) to {}", i, o.length, dir.string());
  }
  write_run_json(g, {"synth", "pair"},
                 {{"image", o.image}, {"count", o.count}, {"length", o.length},
                  {"width", o.width}, {"height", o.height}, {"jitter-px", o.jitter_px},
                  {"jitter-rad", jitter.amplitude_rad}, {"min-freq-bin", o.min_freq_bin},
                  {"speed", o.speed}, {"turn-rate", o.turn_rate}});
}

void run_refiner(const Globals& g, const RefinerOptions& o) {
  if (o.count < 1) throw ConfigError("--count must be positive");
  synth::DegradeSettings degrade;
  degrade.iterations = o.iterations;
  degrade.skip = o.skip;

  const auto out = ensure_out_dir(g);
  const int side = 2 * std::max(o.width, o.height);
  for (int i = 0; i < o.count; ++i) {
    const std::uint64_t seed = g.seed + static_cast<std::uint64_t>(i);
    const Image source = source_image(o.image, side, side, seed);
    const synth::RefinerClip clip =
        synth::make_refiner_clip(source, o.length, {o.width, o.height}, degrade, seed, o.speed);
    const auto dir = item_dir(out, o.count, i, "clip");
    save_sequence(clip.clean, dir / "clean");
    save_sequence(clip.degraded, dir / "degraded");
    write_trajectory_csv(clip.path, dir / "trajectory.csv");
    spdlog::info("wrote refiner clip {} ({} frames) to {}", i, o.length, dir.string());
  }
  write_run_json(g, {"synth", "refiner"},
                 {{"image", o.image}, {"count", o.count}, {"length", o.length},
                  {"width", o.width}, {"height", o.height}, {"iterations", o.iterations},
                  {"skip", o.skip}, {"speed", o.speed}});
}

}  // namespace

void add_synth(CLI::App& app, Globals& g) {
  auto* synth = app.add_subcommand("synth", "Generate synthetic training and test data");
  synth->require_subcommand(1);

  static PairOptions pair;
  auto* p = synth->add_subcommand("pair", "Stable/unstable sequence pair with known trajectories");
  p->add_option("--image", pair.image, "Source image (procedural scene when omitted)");
  p->add_option("--count", pair.count, "Number of pairs")->capture_default_str();
  p->add_option("--length", pair.length, "Frames per sequence")->capture_default_str();
  p->add_option("--width", pair.width, "Frame width")->capture_default_str();
  p->add_option("--height", pair.height, "Frame height")->capture_default_str();
  p->add_option("--jitter-px", pair.jitter_px, "Peak translation jitter")->capture_default_str();
  p->add_option("--jitter-rad", pair.jitter_rad, "Peak rotation jitter or auto")
      ->capture_default_str();
  p->add_option("--min-freq-bin", pair.min_freq_bin, "Lowest jitter DFT bin")
      ->capture_default_str();
  p->add_option("--speed", pair.speed, "Mean intended motion per frame (px)")
      ->capture_default_str();
  p->add_option("--turn-rate", pair.turn_rate, "Mean intended rotation per frame (rad)")
      ->capture_default_str();
  actions().emplace_back(p, [&g] { run_pair(g, pair); });

  static RefinerOptions ref;
  auto* r = synth->add_subcommand("refiner", "Clean and interpolation-degraded clip");
  r->add_option("--image", ref.image, "Source image (procedural scene when omitted)");
  r->add_option("--count", ref.count, "Number of clips")->capture_default_str();
  r->add_option("--length", ref.length, "Frames per clip")->capture_default_str();
  r->add_option("--width", ref.width, "Frame width")->capture_default_str();
  r->add_option("--height", ref.height, "Frame height")->capture_default_str();
  r->add_option("--iterations", ref.iterations, "Interpolation passes")->capture_default_str();
  r->add_option("--skip", ref.skip, "Interpolation neighbour distance")->capture_default_str();
  r->add_option("--speed", ref.speed, "Window speed (px/frame)")->capture_default_str();
  actions().emplace_back(r, [&g] { run_refiner(g, ref); });
}

}  // namespace stabkit::cli
