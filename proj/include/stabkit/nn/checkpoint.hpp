#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "stabkit/nn/networks.hpp"

namespace stabkit::nn {

// Checkpoint directory layout: params.bin (opaque parameter blob) and
// checkpoint.json (spec, stage, iteration, seed, loss_history_path and the
// blob's SHA-256).
struct CheckpointInfo {
  GeneratorSpec spec;
  int stage = 1;
  long long iteration = 0;
  std::uint64_t seed = 0;
  std::string loss_history_path;
};

void save_checkpoint(const std::filesystem::path& dir, Generator<float>& net,
                     const CheckpointInfo& info);

// Throws IoError when missing, FormatError on malformed content and
// IntegrityError when the blob does not match its recorded digest.
Generator<float> load_checkpoint(const std::filesystem::path& dir, CheckpointInfo* info = nullptr);

CheckpointInfo read_checkpoint_info(const std::filesystem::path& dir);

}  // namespace stabkit::nn
