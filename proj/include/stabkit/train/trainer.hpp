#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "stabkit/nn/checkpoint.hpp"
#include "stabkit/nn/networks.hpp"
#include "stabkit/synth/synth.hpp"
#include "stabkit/train/augment.hpp"

namespace stabkit::train {

enum class Profile { Desk, Paper };
Profile parse_profile(const std::string& name);
std::string to_string(Profile p);

enum class Schedule { Plateau, Linear };

struct TrainConfig {
  int stage = 1;
  double lr_init = 1e-4;
  Schedule lr_schedule = Schedule::Plateau;
  double lambda_adv = 0.01;
  int patch_size = 48;
  int batch_size = 5;          // sampled videos per iteration
  int patches_per_batch = 5;   // patch windows drawn from each sampled video
  long long max_iters = 2000;
  std::uint64_t seed = 0;
  int residual_blocks = 8;
  int width = 64;
  bool use_l1 = false;         // stage-1 reconstruction with L1 instead of L2
  int eval_interval = 50;      // iterations between plateau evaluations
  int validation_patches = 16;
  int plateau_patience = 5;
  double plateau_factor = 0.5;
  AugmentSpec augment;

  void validate() const;
};

// Defaults for the generator stages (1 or 2) and for the refiner (stage 0).
TrainConfig default_config(Profile profile, int stage);

nlohmann::json to_json(const TrainConfig& cfg);
// Overlays keys present in j onto cfg; unknown keys throw ConfigError.
void merge_json(TrainConfig& cfg, const nlohmann::json& j);

struct LossRecord {
  long long iter = 0;
  double loss_total = 0.0;
  double loss_content = 0.0;
  double loss_adv = 0.0;
  double lr = 0.0;
  // Mean discriminator scores over the batch (stage 2 only).
  double d_real = std::numeric_limits<double>::quiet_NaN();
  double d_fake = std::numeric_limits<double>::quiet_NaN();
};

struct TrainResult {
  std::vector<LossRecord> history;
  std::vector<std::pair<long long, double>> validation;  // (iter, loss)
};

using ProgressFn = std::function<void(const LossRecord&)>;

// Columns iter, loss_total, loss_content, loss_adv, lr.
void write_loss_csv(const std::filesystem::path& file, const std::vector<LossRecord>& history);
// Columns iter, d_real, d_fake.
void write_disc_csv(const std::filesystem::path& file, const std::vector<LossRecord>& history);

// Minimizes the reconstruction loss between net(unstable t-2..t+2) and
// stable t over random synchronized patch windows. Throws ConfigError when
// frames are smaller than the patch, ValidationError on an empty dataset.
TrainResult train_stage1(std::span<const synth::StabPair> data, nn::Generator<float>& net,
                         const TrainConfig& cfg, const ProgressFn& progress = {});

// Alternating discriminator / generator updates on perceptual plus weighted
// adversarial loss. `init` describes the stage-1 checkpoint net was loaded
// from; without one this throws StateError.
TrainResult train_stage2(std::span<const synth::StabPair> data, nn::Generator<float>& net,
                         const nn::CheckpointInfo* init, nn::Discriminator<float>& disc,
                         const nn::FeatureExtractor<float>& phi, const TrainConfig& cfg,
                         const ProgressFn& progress = {});

// Minimizes L2 between refiner output and the clean centre.
TrainResult train_refiner(std::span<const synth::RefinerSample> samples,
                          nn::Generator<float>& net, const TrainConfig& cfg,
                          const ProgressFn& progress = {});

// Mean full-frame L2 between net outputs and stable targets over every
// `stride`-th frame of each pair, with edge-replicated windows.
double heldout_l2(const nn::Generator<float>& net, std::span<const synth::StabPair> data,
                  int stride = 1);

// Mean PSNR of refined and of degraded centres against the clean centres.
struct RefinerScore {
  double refined_psnr = 0.0;
  double degraded_psnr = 0.0;
};
RefinerScore refiner_psnr(const nn::Generator<float>& net,
                          std::span<const synth::RefinerSample> samples);

// Procedural desk dataset: `count` stabilization pairs over independent
// source scenes.
std::vector<synth::StabPair> make_desk_pairs(std::size_t count, std::size_t length,
                                             synth::WindowSize window, std::uint64_t seed);
std::vector<synth::RefinerSample> make_desk_refiner_samples(std::size_t clips,
                                                            std::size_t length,
                                                            synth::WindowSize window,
                                                            std::uint64_t seed);

}  // namespace stabkit::train
