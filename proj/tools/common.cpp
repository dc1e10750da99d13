#include <algorithm>
#include <fstream>

#include <spdlog/spdlog.h>

#include "cli.hpp"
#include "stabkit/core/error.hpp"
#include "stabkit/core/sequence_io.hpp"
#include "stabkit/synth/synth.hpp"

namespace stabkit::cli {

void write_run_json(const Globals& g, const std::vector<std::string>& command,
                    const nlohmann::json& options) {
  nlohmann::json j;
  j["command"] = command;
  j["globals"] = {{"seed", g.seed}, {"profile", g.profile}, {"out", g.out},
                  {"log-level", g.log_level}};
  // Unset paths are dropped so a replay does not pass empty values.
  nlohmann::json opts = nlohmann::json::object();
  for (const auto& [key, v] : options.items())
    if (!(v.is_string() && v.get<std::string>().empty())) opts[key] = v;
  j["options"] = opts;
  const auto file = std::filesystem::path(g.out) / "run.json";
  std::ofstream out(file);
  if (!out) throw IoError("cannot write " + file.string());
  out << j.dump(2) << '\n';
}

std::filesystem::path ensure_out_dir(const Globals& g) {
  const std::filesystem::path dir(g.out);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

Image source_image(const std::string& path, int width, int height, std::uint64_t seed) {
  if (!path.empty()) return read_image(path);
  spdlog::debug("no source image given, synthesizing a {}x{} scene", width, height);
  return synth::make_source_image(width, height, seed);
}

Actions& actions() {
  static Actions registry;
  return registry;
}

}  // namespace stabkit::cli
