#include <chrono>
#include <fstream>
#include <optional>

#include <spdlog/spdlog.h>

#include "cli.hpp"
#include "plot.hpp"
#include "stabkit/core/error.hpp"
#include "stabkit/core/sequence_io.hpp"

namespace stabkit::cli {

namespace {

struct TrainOptions {
  std::string stage = "1";
  std::string data;
  std::string init;
  std::optional<long long> iters;
  std::optional<double> lr;
  std::optional<int> width;
  std::optional<int> blocks;
  std::optional<int> patch;
  std::optional<int> batch;
  std::optional<int> patches_per_batch;
  std::optional<double> lambda_adv;
  bool l1 = false;
  bool augment = true;
  int pairs = 20;
  std::size_t length = 64;
};

namespace fs = std::filesystem;

bool has_dirs(const fs::path& dir, const char* a, const char* b) {
  return fs::is_directory(dir / a) && fs::is_directory(dir / b);
}

// DIR itself when it holds the two sequences, otherwise its direct
// subdirectories that do, in name order.
std::vector<fs::path> scan(const fs::path& root, const char* a, const char* b) {
  if (!fs::is_directory(root)) throw IoError("data directory not found: " + root.string());
  if (has_dirs(root, a, b)) return {root};
  std::vector<fs::path> found;
  for (const auto& e : fs::directory_iterator(root))
    if (e.is_directory() && has_dirs(e.path(), a, b)) found.push_back(e.path());
  std::sort(found.begin(), found.end());
  if (found.empty())
    throw ValidationError("no " + std::string(a) + "/" + b + " sequences under " + root.string());
  return found;
}

Trajectory trajectory_or_zero(const fs::path& file, std::size_t length) {
  return fs::exists(file) ? read_trajectory_csv(file) : Trajectory(length);
}

std::vector<synth::StabPair> load_pairs(const fs::path& root) {
  std::vector<synth::StabPair> pairs;
  for (const auto& dir : scan(root, "stable", "unstable")) {
    FrameSequence stable = load_sequence(dir / "stable");
    FrameSequence unstable = load_sequence(dir / "unstable");
    if (!stable.width() || stable.size() != unstable.size() || !stable[0].same_shape(unstable[0]))
      throw ValidationError("stable and unstable sequences differ in shape under " + dir.string());
    const std::size_t n = stable.size();
    pairs.push_back({std::move(unstable), std::move(stable),
                     trajectory_or_zero(dir / "unstable_traj.csv", n),
                     trajectory_or_zero(dir / "stable_traj.csv", n)});
  }
  return pairs;
}

std::vector<synth::RefinerSample> load_refiner_samples(const fs::path& root) {
  std::vector<synth::RefinerSample> samples;
  for (const auto& dir : scan(root, "clean", "degraded")) {
    FrameSequence clean = load_sequence(dir / "clean");
    FrameSequence degraded = load_sequence(dir / "degraded");
    if (clean.size() != degraded.size() || !clean[0].same_shape(degraded[0]))
      throw ValidationError("clean and degraded clips differ in shape under " + dir.string());
    const std::size_t n = clean.size();
    const synth::RefinerClip clip{std::move(clean), std::move(degraded),
                                  trajectory_or_zero(dir / "trajectory.csv", n)};
    auto more = synth::refiner_samples_from(clip);
    samples.insert(samples.end(), std::make_move_iterator(more.begin()),
                   std::make_move_iterator(more.end()));
  }
  return samples;
}

train::TrainConfig resolve_config(const Globals& g, const TrainOptions& o, int stage) {
  train::TrainConfig cfg = train::default_config(g.resolved_profile(), stage);
  cfg.seed = g.seed;
  if (o.iters) cfg.max_iters = *o.iters;
  if (o.lr) cfg.lr_init = *o.lr;
  if (o.width) cfg.width = *o.width;
  if (o.blocks) cfg.residual_blocks = *o.blocks;
  if (o.patch) cfg.patch_size = *o.patch;
  if (o.batch) cfg.batch_size = *o.batch;
  if (o.patches_per_batch) cfg.patches_per_batch = *o.patches_per_batch;
  if (o.lambda_adv) cfg.lambda_adv = *o.lambda_adv;
  cfg.use_l1 = o.l1;
  if (!o.augment) {
    const std::uint64_t seed = cfg.augment.seed;
    cfg.augment = train::AugmentSpec::none();
    cfg.augment.seed = seed;
  }
  cfg.validate();
  return cfg;
}

void plot_losses(const train::TrainResult& res, const fs::path& file) {
  Series total{"loss_total", {}, 0};
  Series adv{"loss_adv", {}, 1};
  Series lr{"lr", {}, 2};
  for (const auto& r : res.history) {
    total.y.push_back(r.loss_total);
    adv.y.push_back(r.loss_adv);
    lr.y.push_back(r.lr);
  }
  std::vector<Panel> panels{{"training loss", {total}}, {"learning rate", {lr}}};
  if (std::any_of(adv.y.begin(), adv.y.end(), [](double v) { return v != 0.0; }))
    panels.insert(panels.begin() + 1, Panel{"adversarial loss", {adv}});
  write_line_plot(panels, file);
}

void run_train(const Globals& g, const TrainOptions& o) {
  const int stage = o.stage == "refiner" ? 0 : std::stoi(o.stage);
  const train::TrainConfig cfg = resolve_config(g, o, stage);

  // Load and validate everything before touching the output directory.
  std::optional<nn::Generator<float>> net;
  nn::CheckpointInfo init_info;
  bool have_init = false;
  if (!o.init.empty()) {
    net.emplace(nn::load_checkpoint(o.init, &init_info));
    have_init = true;
  }
  if (stage == 2 && !have_init)
    throw StateError("stage 2 needs a stage-1 checkpoint (--init)");
  if (stage == 2 && init_info.stage != 1)
    throw StateError("stage 2 must start from a stage-1 checkpoint, got stage " +
                     std::to_string(init_info.stage));

  const auto t0 = std::chrono::steady_clock::now();
  const auto progress = [&](const train::LossRecord& r) {
    if ((r.iter + 1) % 100 == 0 || r.iter + 1 == cfg.max_iters)
      spdlog::info("iter {}/{} loss {:.6g} lr {:.3g}", r.iter + 1, cfg.max_iters, r.loss_total,
                   r.lr);
  };

  train::TrainResult res;
  nn::GeneratorSpec spec;
  std::vector<synth::StabPair> pairs;
  std::vector<synth::RefinerSample> samples;
  if (stage == 0) {
    samples = o.data.empty()
                  ? train::make_desk_refiner_samples(static_cast<std::size_t>(o.pairs) / 2,
                                                     16, {128, 128}, g.seed)
                  : load_refiner_samples(o.data);
    spdlog::info("training refiner on {} samples", samples.size());
    if (!net) {
      net.emplace(nn::refiner_spec(cfg.residual_blocks, cfg.width));
      net->init(cfg.seed);
    } else if (net->spec().kind != "refiner") {
      throw ConfigError("--init does not hold a refiner network");
    }
    ensure_out_dir(g);
    res = train::train_refiner(samples, *net, cfg, progress);
  } else {
    pairs = o.data.empty() ? train::make_desk_pairs(static_cast<std::size_t>(o.pairs), o.length,
                                                    {128, 128}, g.seed)
                           : load_pairs(o.data);
    spdlog::info("training stage {} on {} pairs", stage, pairs.size());
    if (!net) {
      net.emplace(nn::stabnet_spec(cfg.residual_blocks, cfg.width));
      net->init(cfg.seed);
    } else if (net->spec().kind != "stabnet") {
      throw ConfigError("--init does not hold a stabilization network");
    }
    ensure_out_dir(g);
    if (stage == 1) {
      res = train::train_stage1(pairs, *net, cfg, progress);
    } else {
      nn::Discriminator<float> disc{nn::DiscriminatorSpec{}};
      disc.init(cfg.seed ^ 0xd15cULL);
      const nn::FeatureExtractor<float> phi;
      res = train::train_stage2(pairs, *net, &init_info, disc, phi, cfg, progress);
    }
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const fs::path out(g.out);
  train::write_loss_csv(out / "loss.csv", res.history);
  if (stage == 2) train::write_disc_csv(out / "disc.csv", res.history);
  {
    std::ofstream v(out / "validation.csv");
    v << "iter,loss\n";
    for (const auto& [iter, loss] : res.validation) v << iter << ',' << loss << '\n';
  }
  plot_losses(res, out / "loss.png");

  nn::CheckpointInfo info;
  info.spec = net->spec();
  info.stage = stage;
  info.iteration = cfg.max_iters + (stage == 2 ? init_info.iteration : 0);
  info.seed = cfg.seed;
  info.loss_history_path = fs::absolute(out / "loss.csv").string();
  save_checkpoint(out / "checkpoint", *net, info);
  {
    std::ofstream c(out / "train_config.json");
    c << train::to_json(cfg).dump(2) << '\n';
  }
  spdlog::info("trained {} iterations in {:.1f}s, checkpoint at {}", cfg.max_iters, seconds,
               (out / "checkpoint").string());

  nlohmann::json opts{{"stage", o.stage}, {"data", o.data},       {"init", o.init},
                      {"iters", cfg.max_iters}, {"lr", cfg.lr_init}, {"width", cfg.width},
                      {"blocks", cfg.residual_blocks}, {"patch", cfg.patch_size},
                      {"batch", cfg.batch_size}, {"patches-per-batch", cfg.patches_per_batch},
                      {"lambda-adv", cfg.lambda_adv}, {"l1", o.l1}, {"augment", o.augment},
                      {"pairs", o.pairs}, {"length", o.length}};
  write_run_json(g, {"train"}, opts);
}

}  // namespace

void add_train(CLI::App& app, Globals& g) {
  static TrainOptions o;
  auto* t = app.add_subcommand("train", "Train the stabilization network or the refiner");
  t->add_option("--stage", o.stage, "1 (reconstruction), 2 (adversarial) or refiner")
      ->check(CLI::IsMember({"1", "2", "refiner"}))
      ->capture_default_str();
  t->add_option("--data", o.data, "Directory of synth outputs (procedural desk set when omitted)");
  t->add_option("--init", o.init, "Checkpoint to start from (required for stage 2)");
  t->add_option("--iters", o.iters, "Training iterations");
  t->add_option("--lr", o.lr, "Initial learning rate");
  t->add_option("--width", o.width, "Feature channels");
  t->add_option("--blocks", o.blocks, "Residual blocks");
  t->add_option("--patch", o.patch, "Patch size");
  t->add_option("--batch", o.batch, "Videos per iteration");
  t->add_option("--patches-per-batch", o.patches_per_batch, "Patch windows per video");
  t->add_option("--lambda-adv", o.lambda_adv, "Adversarial weight (stage 2)");
  t->add_flag("--l1", o.l1, "Use L1 instead of L2 in stage 1");
  t->add_flag("--augment,!--no-augment", o.augment, "Data augmentation")->capture_default_str();
  t->add_option("--pairs", o.pairs, "Procedural pairs when --data is omitted")
      ->capture_default_str();
  t->add_option("--length", o.length, "Procedural sequence length")->capture_default_str();
  actions().emplace_back(t, [&g] { run_train(g, o); });
}

}  // namespace stabkit::cli
