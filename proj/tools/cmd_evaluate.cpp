#include <fstream>
#include <numeric>

#include <spdlog/spdlog.h>

#include "cli.hpp"
#include "plot.hpp"
#include "stabkit/core/error.hpp"
#include "stabkit/core/sequence_io.hpp"
#include "stabkit/metrics/report.hpp"

namespace stabkit::cli {

namespace {

struct EvaluateOpts {
  std::string input;
  std::string output;
  std::string method = "unknown";
  std::string trajectory = "estimated";
  std::string traj_csv;
  std::string reference;
  std::string timing;
  double runtime_ms = 0.0;
  std::string spectrum = "magnitude";
  bool plot = false;
};

double mean_timing(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open timing file " + file.string());
  std::string line;
  std::getline(in, line);
  double sum = 0.0;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    if (comma == std::string::npos) continue;
    try {
      sum += std::stod(line.substr(comma + 1));
    } catch (const std::exception&) {
      throw FormatError("malformed timing row: " + line);
    }
    ++n;
  }
  if (n == 0) throw FormatError("timing file has no rows: " + file.string());
  return sum / static_cast<double>(n);
}

void write_spectrum_csv(const std::filesystem::path& file, const Trajectory& in,
                        const Trajectory& out, metrics::SpectrumKind kind) {
  std::ofstream f(file);
  if (!f) throw IoError("cannot write " + file.string());
  f << "k,input_tx,input_ty,input_theta,output_tx,output_ty,output_theta\n";
  const std::vector<const std::vector<double>*> signals{&in.tx,  &in.ty,  &in.theta,
                                                        &out.tx, &out.ty, &out.theta};
  std::vector<metrics::Spectrum> spectra;
  for (const auto* s : signals) spectra.push_back(metrics::spectrum(*s, kind));
  f.precision(17);
  for (std::size_t k = 1; k <= spectra[0].n(); ++k) {
    f << k;
    for (const auto& s : spectra) f << ',' << s.at(k);
    f << '\n';
  }
}

void run_evaluate(const Globals& g, const EvaluateOpts& o) {
  metrics::EvaluateOptions opt;
  opt.method = o.method;
  opt.spectrum = o.spectrum == "energy" ? metrics::SpectrumKind::Energy
                                        : metrics::SpectrumKind::Magnitude;
  if (o.trajectory == "ground-truth") {
    if (o.traj_csv.empty()) throw ConfigError("--trajectory ground-truth needs --traj-csv");
    opt.source = metrics::TrajectorySource::GroundTruth;
    opt.ground_truth = read_trajectory_csv(o.traj_csv);
    if (!o.reference.empty()) opt.reference.emplace(load_sequence(o.reference));
  } else if (!o.traj_csv.empty() || !o.reference.empty()) {
    throw ConfigError("--traj-csv and --reference apply to --trajectory ground-truth only");
  }

  const FrameSequence input = load_sequence(o.input);
  const FrameSequence output = load_sequence(o.output);
  const double runtime = o.timing.empty() ? o.runtime_ms : mean_timing(o.timing);

  const metrics::MetricsReport report = metrics::evaluate(input, output, runtime, opt);
  const auto out = ensure_out_dir(g);
  {
    nlohmann::json j = report;
    std::ofstream f(out / "report.json");
    if (!f) throw IoError("cannot write report.json");
    f << j.dump(2) << '\n';
  }
  spdlog::info("stability {:.4f} (t {:.4f}, theta {:.4f}) distortion {:.4f} cropping {:.4f}",
               report.stability, report.stability_t, report.stability_theta, report.distortion,
               report.cropping);
  if (report.frames_failed > 0)
    spdlog::warn("{} frames could not be tracked and were bridged", report.frames_failed);

  if (o.plot) {
    // The input path is measured the same way as the output's whenever a
    // reference anchors both; otherwise it is chained from its own frames.
    const bool anchored = opt.source == metrics::TrajectorySource::GroundTruth && opt.reference;
    const Trajectory in_traj =
        anchored ? metrics::evaluation_trajectory(input, opt).trajectory
                 : metrics::chain_trajectory(input, opt.tracking).trajectory;
    const Trajectory out_traj = metrics::evaluation_trajectory(output, opt).trajectory;
    write_trajectory_csv(in_traj, out / "input_traj.csv");
    write_trajectory_csv(out_traj, out / "output_traj.csv");
    write_spectrum_csv(out / "spectrum.csv", in_traj, out_traj, opt.spectrum);
    write_line_plot({{"tx (px)", {{"input", in_traj.tx, 1}, {"output", out_traj.tx, 0}}},
                     {"ty (px)", {{"input", in_traj.ty, 1}, {"output", out_traj.ty, 0}}},
                     {"theta (rad)", {{"input", in_traj.theta, 1}, {"output", out_traj.theta, 0}}}},
                    out / "trajectory.png");
    const auto spec_of = [&](const std::vector<double>& s) {
      return metrics::spectrum(s, opt.spectrum).bins;
    };
    write_line_plot(
        {{"tx spectrum", {{"input", spec_of(in_traj.tx), 1}, {"output", spec_of(out_traj.tx), 0}}},
         {"ty spectrum", {{"input", spec_of(in_traj.ty), 1}, {"output", spec_of(out_traj.ty), 0}}},
         {"theta spectrum",
          {{"input", spec_of(in_traj.theta), 1}, {"output", spec_of(out_traj.theta), 0}}}},
        out / "spectrum.png");
  }

  write_run_json(g, {"evaluate"},
                 {{"input", o.input}, {"output", o.output}, {"method", o.method},
                  {"trajectory", o.trajectory}, {"traj-csv", o.traj_csv},
                  {"reference", o.reference}, {"timing", o.timing},
                  {"runtime-ms", o.timing.empty() ? nlohmann::json(runtime) : nlohmann::json()},
                  {"spectrum", o.spectrum}, {"plot", o.plot}});
}

}  // namespace

void add_evaluate(CLI::App& app, Globals& g) {
  static EvaluateOpts o;
  auto* e = app.add_subcommand("evaluate", "Stability, distortion and cropping of an output");
  e->add_option("--input", o.input, "Original (unstable) sequence")->required();
  e->add_option("--output", o.output, "Stabilized sequence")->required();
  e->add_option("--method", o.method, "Label stored in the report")->capture_default_str();
  e->add_option("--trajectory", o.trajectory, "Trajectory source")
      ->check(CLI::IsMember({"estimated", "ground-truth"}))
      ->capture_default_str();
  e->add_option("--traj-csv", o.traj_csv, "Known trajectory (t,tx,ty,theta)");
  e->add_option("--reference", o.reference, "Sequence the known trajectory belongs to");
  auto* timing = e->add_option("--timing", o.timing, "Per-frame timing CSV from stabilize");
  e->add_option("--runtime-ms", o.runtime_ms, "Runtime per frame when no timing file")
      ->excludes(timing);
  e->add_option("--spectrum", o.spectrum, "magnitude or energy")
      ->check(CLI::IsMember({"magnitude", "energy"}))
      ->capture_default_str();
  e->add_flag("--plot", o.plot, "Write trajectory and spectrum plots");
  actions().emplace_back(e, [&g] { run_evaluate(g, o); });
}

}  // namespace stabkit::cli
