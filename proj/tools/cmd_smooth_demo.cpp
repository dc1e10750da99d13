#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>

#include <spdlog/spdlog.h>

#include "cli.hpp"
#include "plot.hpp"
#include "stabkit/core/error.hpp"
#include "stabkit/interp/iterative.hpp"
#include "stabkit/metrics/spectrum.hpp"
#include "stabkit/synth/synth.hpp"

namespace stabkit::cli {

namespace {

struct DemoOptions {
  std::size_t length = 64;
  int m = 5;
  double speed = 2.0;
  double turn_rate = 0.002;
  double jitter_px = 3.0;
  double jitter_rad = 0.01;
};

// Bins without input content have no defined attenuation.
double ratio(const metrics::Spectrum& after, const metrics::Spectrum& before, std::size_t k) {
  const double peak = *std::max_element(before.bins.begin(), before.bins.end());
  if (before.at(k) <= 1e-9 * peak) return std::numeric_limits<double>::quiet_NaN();
  return after.at(k) / before.at(k);
}

// Applies the pose-space smoother to a jittered path and compares the measured
// per-bin attenuation with the |cos w|^m response of m averaging passes.
void run_demo(const Globals& g, const DemoOptions& o) {
  if (o.m < 0) throw ConfigError("--m must be non-negative");
  synth::JitterSpec jitter;
  jitter.amplitude_px = o.jitter_px;
  jitter.amplitude_rad = o.jitter_rad;
  jitter.seed = g.seed;
  jitter.validate();
  const Trajectory smooth = synth::gen_smooth_trajectory(o.length, o.speed, o.turn_rate, g.seed);
  const Trajectory before = synth::inject_jitter(smooth, jitter);
  const Trajectory after = interp::trajectory_smooth_oracle(before, o.m);

  const auto out = ensure_out_dir(g);
  write_trajectory_csv(before, out / "before.csv");
  write_trajectory_csv(after, out / "after.csv");

  const auto sb = [](const std::vector<double>& s) { return metrics::spectrum(s); };
  const auto btx = sb(before.tx), bty = sb(before.ty), bth = sb(before.theta);
  const auto atx = sb(after.tx), aty = sb(after.ty), ath = sb(after.theta);
  std::ofstream f(out / "attenuation.csv");
  if (!f) throw IoError("cannot write attenuation.csv");
  f.precision(17);
  f << "k,omega,predicted,measured_tx,measured_ty,measured_theta\n";
  std::vector<double> predicted, measured;
  for (std::size_t k = 1; k <= btx.n(); ++k) {
    const double omega = 2.0 * std::numbers::pi * static_cast<double>(k) /
                         static_cast<double>(o.length);
    const double p = std::pow(std::abs(std::cos(omega)), o.m);
    f << k << ',' << omega << ',' << p << ',' << ratio(atx, btx, k) << ','
      << ratio(aty, bty, k) << ',' << ratio(ath, bth, k) << '\n';
    predicted.push_back(p);
    measured.push_back(ratio(atx, btx, k));
  }

  const double s_before = metrics::stability_score(before).final_score;
  const double s_after = metrics::stability_score(after).final_score;
  spdlog::info("stability {:.4f} -> {:.4f} after {} passes", s_before, s_after, o.m);
  write_line_plot({{"tx (px)", {{"before", before.tx, 1}, {"after", after.tx, 0}}},
                   {"theta (rad)", {{"before", before.theta, 1}, {"after", after.theta, 0}}},
                   {"attenuation per bin (tx)",
                    {{"predicted", predicted, 2}, {"measured", measured, 0}}}},
                  out / "smooth_demo.png");

  write_run_json(g, {"smooth-demo"},
                 {{"length", o.length}, {"m", o.m}, {"speed", o.speed},
                  {"turn-rate", o.turn_rate}, {"jitter-px", o.jitter_px},
                  {"jitter-rad", o.jitter_rad}});
}

}  // namespace

void add_smooth_demo(CLI::App& app, Globals& g) {
  static DemoOptions o;
  auto* d = app.add_subcommand("smooth-demo", "Frequency response of repeated midpoint averaging");
  d->add_option("--length", o.length, "Trajectory length")->capture_default_str();
  d->add_option("--m", o.m, "Averaging passes")->capture_default_str();
  d->add_option("--speed", o.speed, "Mean intended motion per frame (px)")->capture_default_str();
  d->add_option("--turn-rate", o.turn_rate, "Mean intended rotation per frame (rad)")
      ->capture_default_str();
  d->add_option("--jitter-px", o.jitter_px, "Peak translation jitter")->capture_default_str();
  d->add_option("--jitter-rad", o.jitter_rad, "Peak rotation jitter")->capture_default_str();
  actions().emplace_back(d, [&g] { run_demo(g, o); });
}

}  // namespace stabkit::cli
