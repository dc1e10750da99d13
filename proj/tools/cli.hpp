#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "stabkit/train/trainer.hpp"

namespace stabkit::cli {

struct Globals {
  std::uint64_t seed = 0;
  std::string profile = "desk";
  std::string out = "out";
  std::string log_level = "info";
  std::string config;

  train::Profile resolved_profile() const { return train::parse_profile(profile); }
};

// Echo of the fully resolved invocation; `stabkit --config run.json` replays it.
void write_run_json(const Globals& g, const std::vector<std::string>& command,
                    const nlohmann::json& options);

std::filesystem::path ensure_out_dir(const Globals& g);

// Loads a source image, or synthesizes one when path is empty.
Image source_image(const std::string& path, int width, int height, std::uint64_t seed);

// Subcommand actions, run after parsing once logging is configured.
using Actions = std::vector<std::pair<CLI::App*, std::function<void()>>>;
Actions& actions();

void add_synth(CLI::App& app, Globals& g);
void add_train(CLI::App& app, Globals& g);
void add_stabilize(CLI::App& app, Globals& g);
void add_evaluate(CLI::App& app, Globals& g);
void add_smooth_demo(CLI::App& app, Globals& g);

}  // namespace stabkit::cli
