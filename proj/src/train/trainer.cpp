#include "stabkit/train/trainer.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>

#include "stabkit/core/error.hpp"
#include "stabkit/core/image_ops.hpp"
#include "stabkit/core/patch.hpp"
#include "stabkit/train/losses.hpp"
#include "stabkit/train/schedule.hpp"

namespace stabkit::train {

namespace {

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9E3779B97F4A7C15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Where a training patch comes from; drawn before any pixels are touched so
// the sample order depends on the seed alone.
struct Draw {
  std::size_t item = 0;
  std::size_t t = 0;
  PatchOrigin origin;
  std::uint64_t augment_seed = 0;
};

Draw draw(std::mt19937_64& rng, std::size_t items, std::size_t length, int height, int width,
          int patch) {
  Draw d;
  d.item = std::uniform_int_distribution<std::size_t>(0, items - 1)(rng);
  d.t = std::uniform_int_distribution<std::size_t>(0, length - 1)(rng);
  d.origin.row = std::uniform_int_distribution<int>(0, height - patch)(rng);
  d.origin.col = std::uniform_int_distribution<int>(0, width - patch)(rng);
  d.augment_seed = rng();
  return d;
}

TrainSample pair_sample(const synth::StabPair& pair, std::size_t t, PatchOrigin o, int patch) {
  TrainSample s;
  for (const Patch& p : extract_patch_windows(pair.unstable, t, 2, patch, o))
    s.inputs.push_back(p.pixels);
  s.target = crop(pair.stable[t], o.row, o.col, patch, patch);
  s.ordered = 5;
  return s;
}

TrainSample refiner_sample(const synth::RefinerSample& r, PatchOrigin o, int patch) {
  TrainSample s;
  for (const Image& n : r.clean_neighbors) s.inputs.push_back(crop(n, o.row, o.col, patch, patch));
  s.inputs.push_back(crop(r.degraded_center, o.row, o.col, patch, patch));
  s.target = crop(r.clean_center, o.row, o.col, patch, patch);
  s.ordered = 4;
  return s;
}

void check_patch(int height, int width, int patch) {
  if (patch > height || patch > width)
    throw ConfigError("patch size " + std::to_string(patch) + " exceeds frame size " +
                      std::to_string(width) + "x" + std::to_string(height));
}

void check_pairs(std::span<const synth::StabPair> data, int patch) {
  if (data.empty()) throw ValidationError("training dataset is empty");
  for (const auto& pair : data) check_patch(pair.stable.height(), pair.stable.width(), patch);
}

double reconstruction(const TrainConfig& cfg, const nn::Tensor<float>& pred,
                      const nn::Tensor<float>& target, nn::Tensor<float>* grad) {
  return cfg.use_l1 ? loss_l1(pred, target, grad) : loss_l2(pred, target, grad);
}

void scale_into(nn::Tensor<float>& g, float s) {
  for (float& v : g.data) v *= s;
}

// Shared supervised loop for stage 1 and the refiner. make(draw) builds the
// un-augmented sample for one draw.
template <class MakeSample>
TrainResult supervised_loop(std::size_t items, std::size_t length, int height, int width,
                            nn::Generator<float>& net, const TrainConfig& cfg,
                            MakeSample make, const ProgressFn& progress) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  std::mt19937_64 val_rng(mix(cfg.seed, 0xA11));

  std::vector<TrainSample> validation;
  for (int i = 0; i < cfg.validation_patches; ++i)
    validation.push_back(make(draw(val_rng, items, length, height, width, cfg.patch_size)));
  auto validate = [&] {
    double sum = 0.0;
    for (const auto& s : validation)
      sum += reconstruction(cfg, net.forward(nn::stack_frames<float>(s.inputs)),
                            nn::to_tensor<float>(s.target), nullptr);
    return validation.empty() ? 0.0 : sum / static_cast<double>(validation.size());
  };

  Adam<float> adam(net.params());
  PlateauScheduler plateau(cfg.lr_init, cfg.plateau_patience, cfg.plateau_factor);
  TrainResult result;
  const int per_iter = cfg.batch_size * cfg.patches_per_batch;
  nn::Generator<float>::Trace trace;
  for (long long it = 0; it < cfg.max_iters; ++it) {
    const double lr = cfg.lr_schedule == Schedule::Linear
                          ? lr_linear(it, cfg.max_iters, cfg.lr_init)
                          : plateau.lr();
    net.zero_grad();
    double loss = 0.0;
    for (int b = 0; b < cfg.batch_size; ++b) {
      // One video per batch element, several patch windows from it.
      const Draw video = draw(rng, items, length, height, width, cfg.patch_size);
      for (int p = 0; p < cfg.patches_per_batch; ++p) {
        Draw d = draw(rng, items, length, height, width, cfg.patch_size);
        d.item = video.item;
        AugmentSpec aug = cfg.augment;
        aug.seed = d.augment_seed;
        const TrainSample s = augment(make(d), aug);
        const auto pred = net.forward(nn::stack_frames<float>(s.inputs), &trace);
        nn::Tensor<float> grad;
        loss += reconstruction(cfg, pred, nn::to_tensor<float>(s.target), &grad);
        scale_into(grad, 1.0f / static_cast<float>(per_iter));
        net.backward(trace, grad);
      }
    }
    adam.step(lr);
    loss /= per_iter;
    LossRecord rec{it, loss, loss, 0.0, lr};
    result.history.push_back(rec);
    if (progress) progress(rec);
    if (cfg.eval_interval > 0 && (it + 1) % cfg.eval_interval == 0) {
      const double v = validate();
      result.validation.emplace_back(it + 1, v);
      if (cfg.lr_schedule == Schedule::Plateau) plateau.step(v);
    }
  }
  return result;
}

}  // namespace

Profile parse_profile(const std::string& name) {
  if (name == "desk") return Profile::Desk;
  if (name == "paper") return Profile::Paper;
  throw ConfigError("unknown profile '" + name + "' (expected desk or paper)");
}

std::string to_string(Profile p) { return p == Profile::Desk ? "desk" : "paper"; }

void TrainConfig::validate() const {
  if (stage < 0 || stage > 2) throw ConfigError("stage must be 1 or 2 (0 for the refiner)");
  if (!(lr_init > 0.0)) throw ConfigError("learning rate must be positive");
  if (!(lambda_adv >= 0.0)) throw ConfigError("lambda_adv must be non-negative");
  if (patch_size < 16) throw ConfigError("patch size must be at least 16");
  if (batch_size < 1 || patches_per_batch < 1) throw ConfigError("batch sizes must be positive");
  if (max_iters < 0) throw ConfigError("max_iters must be non-negative");
  if (residual_blocks < 1 || width < 1) throw ConfigError("network size must be positive");
  if (validation_patches < 0 || eval_interval < 0) throw ConfigError("negative evaluation settings");
  augment.validate();
}

TrainConfig default_config(Profile profile, int stage) {
  TrainConfig cfg;
  cfg.stage = stage;
  if (profile == Profile::Paper) {
    cfg.patch_size = 220;
    cfg.residual_blocks = 64;
    cfg.width = 64;
    cfg.max_iters = 70000;
    cfg.patches_per_batch = 5;
    cfg.eval_interval = 500;
  } else {
    // Desk scale: one core, minutes not days.
    cfg.patch_size = 48;
    cfg.residual_blocks = 8;
    cfg.width = 24;
    cfg.max_iters = 2000;
    cfg.patches_per_batch = 1;
    cfg.eval_interval = 50;
  }
  if (stage == 2) {
    cfg.lr_init = 5e-5;
    cfg.lr_schedule = Schedule::Linear;
    cfg.batch_size = 3;
    if (profile == Profile::Desk) cfg.max_iters = 500;
  }
  if (stage == 0) {
    cfg.residual_blocks = profile == Profile::Desk ? 6 : cfg.residual_blocks;
    if (profile == Profile::Desk) cfg.max_iters = 1500;
  }
  return cfg;
}

nlohmann::json to_json(const TrainConfig& cfg) {
  const AugmentSpec& a = cfg.augment;
  return {{"stage", cfg.stage},
          {"lr_init", cfg.lr_init},
          {"lr_schedule", cfg.lr_schedule == Schedule::Plateau ? "plateau" : "linear"},
          {"lambda_adv", cfg.lambda_adv},
          {"patch_size", cfg.patch_size},
          {"batch_size", cfg.batch_size},
          {"patches_per_batch", cfg.patches_per_batch},
          {"max_iters", cfg.max_iters},
          {"seed", cfg.seed},
          {"residual_blocks", cfg.residual_blocks},
          {"width", cfg.width},
          {"use_l1", cfg.use_l1},
          {"eval_interval", cfg.eval_interval},
          {"validation_patches", cfg.validation_patches},
          {"plateau_patience", cfg.plateau_patience},
          {"plateau_factor", cfg.plateau_factor},
          {"augment",
           {{"flip_h", a.flip_h},
            {"flip_v", a.flip_v},
            {"reverse_order", a.reverse_order},
            {"probability", a.probability},
            {"resize_min", a.resize_min},
            {"resize_max", a.resize_max},
            {"brightness", a.brightness},
            {"hue", a.hue},
            {"gamma_min", a.gamma_min},
            {"gamma_max", a.gamma_max},
            {"contrast_min", a.contrast_min},
            {"contrast_max", a.contrast_max}}}};
}

void merge_json(TrainConfig& cfg, const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("training config must be a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "stage") cfg.stage = v.get<int>();
      else if (key == "lr_init") cfg.lr_init = v.get<double>();
      else if (key == "lr_schedule") {
        const auto s = v.get<std::string>();
        if (s != "plateau" && s != "linear") throw ConfigError("lr_schedule must be plateau or linear");
        cfg.lr_schedule = s == "plateau" ? Schedule::Plateau : Schedule::Linear;
      } else if (key == "lambda_adv") cfg.lambda_adv = v.get<double>();
      else if (key == "patch_size") cfg.patch_size = v.get<int>();
      else if (key == "batch_size") cfg.batch_size = v.get<int>();
      else if (key == "patches_per_batch") cfg.patches_per_batch = v.get<int>();
      else if (key == "max_iters") cfg.max_iters = v.get<long long>();
      else if (key == "seed") cfg.seed = v.get<std::uint64_t>();
      else if (key == "residual_blocks") cfg.residual_blocks = v.get<int>();
      else if (key == "width") cfg.width = v.get<int>();
      else if (key == "use_l1") cfg.use_l1 = v.get<bool>();
      else if (key == "eval_interval") cfg.eval_interval = v.get<int>();
      else if (key == "validation_patches") cfg.validation_patches = v.get<int>();
      else if (key == "plateau_patience") cfg.plateau_patience = v.get<int>();
      else if (key == "plateau_factor") cfg.plateau_factor = v.get<double>();
      else if (key == "augment") {
        AugmentSpec& a = cfg.augment;
        for (const auto& [k, x] : v.items()) {
          if (k == "flip_h") a.flip_h = x.get<bool>();
          else if (k == "flip_v") a.flip_v = x.get<bool>();
          else if (k == "reverse_order") a.reverse_order = x.get<bool>();
          else if (k == "probability") a.probability = x.get<double>();
          else if (k == "resize_min") a.resize_min = x.get<double>();
          else if (k == "resize_max") a.resize_max = x.get<double>();
          else if (k == "brightness") a.brightness = x.get<double>();
          else if (k == "hue") a.hue = x.get<double>();
          else if (k == "gamma_min") a.gamma_min = x.get<double>();
          else if (k == "gamma_max") a.gamma_max = x.get<double>();
          else if (k == "contrast_min") a.contrast_min = x.get<double>();
          else if (k == "contrast_max") a.contrast_max = x.get<double>();
          else throw ConfigError("unknown augment key '" + k + "'");
        }
      } else {
        throw ConfigError("unknown training config key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad training config value: ") + e.what());
  }
}

void write_loss_csv(const std::filesystem::path& file, const std::vector<LossRecord>& history) {
  std::ofstream out(file);
  if (!out) throw IoError("cannot write " + file.string());
  out << "iter,loss_total,loss_content,loss_adv,lr\n" << std::setprecision(17);
  for (const auto& r : history)
    out << r.iter << ',' << r.loss_total << ',' << r.loss_content << ',' << r.loss_adv << ','
        << r.lr << '\n';
}

void write_disc_csv(const std::filesystem::path& file, const std::vector<LossRecord>& history) {
  std::ofstream out(file);
  if (!out) throw IoError("cannot write " + file.string());
  out << "iter,d_real,d_fake\n" << std::setprecision(17);
  for (const auto& r : history) out << r.iter << ',' << r.d_real << ',' << r.d_fake << '\n';
}

TrainResult train_stage1(std::span<const synth::StabPair> data, nn::Generator<float>& net,
                         const TrainConfig& cfg, const ProgressFn& progress) {
  if (cfg.stage != 1) throw ConfigError("stage-1 training needs cfg.stage = 1");
  if (net.spec().kind != "stabnet") throw ConfigError("stage-1 training needs a stabnet");
  check_pairs(data, cfg.patch_size);
  const auto& first = data.front();
  std::size_t length = first.stable.size();
  for (const auto& p : data) length = std::min(length, p.stable.size());
  return supervised_loop(
      data.size(), length, first.stable.height(), first.stable.width(), net, cfg,
      [&](const Draw& d) { return pair_sample(data[d.item], d.t, d.origin, cfg.patch_size); },
      progress);
}

TrainResult train_refiner(std::span<const synth::RefinerSample> samples,
                          nn::Generator<float>& net, const TrainConfig& cfg,
                          const ProgressFn& progress) {
  if (samples.empty()) throw ValidationError("refiner dataset is empty");
  if (net.spec().kind != "refiner") throw ConfigError("refiner training needs a refiner net");
  const Image& c = samples.front().clean_center;
  check_patch(c.height(), c.width(), cfg.patch_size);
  TrainConfig local = cfg;
  local.stage = 0;
  return supervised_loop(
      samples.size(), 1, c.height(), c.width(), net, local,
      [&](const Draw& d) { return refiner_sample(samples[d.item], d.origin, cfg.patch_size); },
      progress);
}

TrainResult train_stage2(std::span<const synth::StabPair> data, nn::Generator<float>& net,
                         const nn::CheckpointInfo* init, nn::Discriminator<float>& disc,
                         const nn::FeatureExtractor<float>& phi, const TrainConfig& cfg,
                         const ProgressFn& progress) {
  if (!init || init->stage != 1)
    throw StateError("stage-2 training needs a stage-1 checkpoint");
  if (cfg.stage != 2) throw ConfigError("stage-2 training needs cfg.stage = 2");
  cfg.validate();
  check_pairs(data, cfg.patch_size);
  const auto& first = data.front();
  std::size_t length = first.stable.size();
  for (const auto& p : data) length = std::min(length, p.stable.size());
  const int height = first.stable.height();
  const int width = first.stable.width();

  std::mt19937_64 rng(cfg.seed);
  Adam<float> g_adam(net.params());
  Adam<float> d_adam(disc.params());
  PlateauScheduler plateau(cfg.lr_init, cfg.plateau_patience, cfg.plateau_factor);
  TrainResult result;
  const int per_iter = cfg.batch_size * cfg.patches_per_batch;
  const float inv = 1.0f / static_cast<float>(per_iter);
  nn::Generator<float>::Trace g_trace;
  nn::Discriminator<float>::Trace real_trace, fake_trace;
  for (long long it = 0; it < cfg.max_iters; ++it) {
    const double lr = cfg.lr_schedule == Schedule::Linear
                          ? lr_linear(it, cfg.max_iters, cfg.lr_init)
                          : plateau.lr();
    net.zero_grad();
    disc.zero_grad();
    double content = 0.0, adv = 0.0, d_real = 0.0, d_fake = 0.0;
    for (int b = 0; b < cfg.batch_size; ++b) {
      const Draw video = draw(rng, data.size(), length, height, width, cfg.patch_size);
      for (int p = 0; p < cfg.patches_per_batch; ++p) {
        Draw d = draw(rng, data.size(), length, height, width, cfg.patch_size);
        d.item = video.item;
        AugmentSpec aug = cfg.augment;
        aug.seed = d.augment_seed;
        const TrainSample s = augment(pair_sample(data[d.item], d.t, d.origin, cfg.patch_size), aug);
        const auto target = nn::to_tensor<float>(s.target);
        const auto pred = net.forward(nn::stack_frames<float>(s.inputs), &g_trace);

        // Generator gradient against the current discriminator.
        nn::Tensor<float> grad;
        content += loss_perceptual(pred, target, phi, &grad);
        const float zf = disc.logit(pred, &fake_trace);
        const float sf = nn::sigmoid(zf);
        // -log sigmoid(z) = softplus(-z), stable for large |z|.
        adv += std::log1p(std::exp(-std::abs(static_cast<double>(zf)))) + std::max(0.0, -double(zf));
        if (cfg.lambda_adv > 0.0) {
          const auto dadv = disc.backward(fake_trace, sf - 1.0f, true, false);
          const float w = static_cast<float>(cfg.lambda_adv);
          for (std::size_t i = 0; i < grad.size(); ++i) grad.data[i] += w * dadv.data[i];
        }
        scale_into(grad, inv);
        net.backward(g_trace, grad);

        // Discriminator: cross-entropy with target real, prediction fake.
        const float zr = disc.logit(target, &real_trace);
        const float sr = nn::sigmoid(zr);
        disc.backward(real_trace, (sr - 1.0f) * inv, false, true);
        disc.backward(fake_trace, sf * inv, false, true);
        d_real += sr;
        d_fake += sf;
      }
    }
    g_adam.step(lr);
    d_adam.step(lr);
    LossRecord rec;
    rec.iter = it;
    rec.loss_content = content / per_iter;
    rec.loss_adv = adv / per_iter;
    rec.loss_total = rec.loss_content + cfg.lambda_adv * rec.loss_adv;
    rec.lr = lr;
    rec.d_real = d_real / per_iter;
    rec.d_fake = d_fake / per_iter;
    result.history.push_back(rec);
    if (progress) progress(rec);
  }
  return result;
}

double heldout_l2(const nn::Generator<float>& net, std::span<const synth::StabPair> data,
                  int stride) {
  if (data.empty()) throw ValidationError("held-out set is empty");
  if (stride < 1) throw RangeError("stride must be positive");
  double sum = 0.0;
  int count = 0;
  for (const auto& pair : data) {
    const auto n = static_cast<long long>(pair.unstable.size());
    for (long long t = 0; t < n; t += stride) {
      std::array<Image, 5> window;
      for (int k = -2; k <= 2; ++k) window[k + 2] = pair.unstable[clamp_index(t + k, pair.unstable.size())];
      sum += loss_l2(nn::stabnet_forward(net, window), pair.stable[t]);
      ++count;
    }
  }
  return sum / count;
}

RefinerScore refiner_psnr(const nn::Generator<float>& net,
                          std::span<const synth::RefinerSample> samples) {
  if (samples.empty()) throw ValidationError("held-out set is empty");
  RefinerScore score;
  for (const auto& s : samples) {
    Image refined = nn::refiner_forward(net, s.clean_neighbors, s.degraded_center);
    clamp_unit(refined);
    score.refined_psnr += psnr(refined, s.clean_center);
    score.degraded_psnr += psnr(s.degraded_center, s.clean_center);
  }
  score.refined_psnr /= static_cast<double>(samples.size());
  score.degraded_psnr /= static_cast<double>(samples.size());
  return score;
}

std::vector<synth::StabPair> make_desk_pairs(std::size_t count, std::size_t length,
                                             synth::WindowSize window, std::uint64_t seed) {
  std::vector<synth::StabPair> pairs;
  const int side = 2 * std::max(window.width, window.height);
  for (std::size_t i = 0; i < count; ++i) {
    const Image source = synth::make_source_image(side, side, mix(seed, 2 * i));
    pairs.push_back(synth::make_stab_pair(source, length, window, synth::JitterSpec{},
                                          mix(seed, 2 * i + 1)));
  }
  return pairs;
}

std::vector<synth::RefinerSample> make_desk_refiner_samples(std::size_t clips,
                                                            std::size_t length,
                                                            synth::WindowSize window,
                                                            std::uint64_t seed) {
  std::vector<synth::RefinerSample> out;
  const int side = 2 * std::max(window.width, window.height);
  for (std::size_t i = 0; i < clips; ++i) {
    const Image source = synth::make_source_image(side, side, mix(seed, 2 * i));
    auto samples = synth::make_refiner_samples(source, length, window, synth::DegradeSettings{},
                                               mix(seed, 2 * i + 1));
    for (auto& s : samples) out.push_back(std::move(s));
  }
  return out;
}

}  // namespace stabkit::train
