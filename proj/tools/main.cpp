#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "cli.hpp"
#include "stabkit/core/error.hpp"

namespace {

using stabkit::cli::Globals;

constexpr int kExitUsage = 2;
constexpr int kExitState = 3;
constexpr int kExitData = 4;

std::string flag_value(const nlohmann::json& v) {
  return v.is_string() ? v.get<std::string>() : v.dump();
}

void append_flags(const nlohmann::json& options, std::vector<std::string>& args) {
  for (const auto& [key, v] : options.items()) {
    if (v.is_null()) continue;
    if (v.is_boolean()) {
      args.push_back("--" + key + (v.get<bool>() ? "" : "=false"));
    } else {
      args.push_back("--" + key);
      args.push_back(flag_value(v));
    }
  }
}

bool is_command_word(const std::string& s) {
  return s == "synth" || s == "train" || s == "stabilize" || s == "evaluate" ||
         s == "smooth-demo";
}

// Expands `--config FILE` into ordinary flags placed before the user's own,
// so explicit flags win (options keep the last value given).
std::vector<std::string> expand_config(const std::vector<std::string>& argv) {
  std::vector<std::string> user;
  std::string config;
  for (std::size_t i = 1; i < argv.size(); ++i) {
    if (argv[i] == "--config" && i + 1 < argv.size()) {
      config = argv[++i];
    } else if (argv[i].rfind("--config=", 0) == 0) {
      config = argv[i].substr(9);
    } else {
      user.push_back(argv[i]);
    }
  }
  if (config.empty()) return argv;

  std::ifstream in(config);
  if (!in) throw stabkit::IoError("cannot open config file " + config);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw stabkit::FormatError("config file is not valid JSON: " + std::string(e.what()));
  }
  if (!j.is_object()) throw stabkit::FormatError("config file must hold a JSON object");

  std::vector<std::string> out{argv[0]};
  if (j.contains("globals")) append_flags(j["globals"], out);

  // Split the user's arguments into leading globals, command words, and the rest.
  std::size_t pos = 0;
  std::vector<std::string> user_globals, user_command;
  while (pos < user.size() && !is_command_word(user[pos])) user_globals.push_back(user[pos++]);
  if (pos < user.size()) {
    user_command.push_back(user[pos++]);
    if (user_command[0] == "synth" && pos < user.size() && user[pos][0] != '-')
      user_command.push_back(user[pos++]);
  }
  out.insert(out.end(), user_globals.begin(), user_globals.end());
  if (!user_command.empty()) {
    out.insert(out.end(), user_command.begin(), user_command.end());
  } else if (j.contains("command")) {
    for (const auto& w : j["command"]) out.push_back(w.get<std::string>());
  }
  if (j.contains("options")) append_flags(j["options"], out);
  out.insert(out.end(), user.begin() + static_cast<std::ptrdiff_t>(pos), user.end());
  return out;
}

void setup_logging(const std::string& level) {
  auto logger = spdlog::stderr_color_mt("stabkit");
  logger->set_pattern("[%H:%M:%S] [%^%l%$] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::from_str(level));
}

}  // namespace

int main(int argc, char** argv) {
  Globals g;
  CLI::App app{"Video stabilization toolkit: synthetic data, iterative and learned stabilization, metrics."};
  app.require_subcommand(1);
  app.fallthrough();
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--profile", g.profile, "Scale profile")
      ->check(CLI::IsMember({"desk", "paper"}))
      ->capture_default_str();
  app.add_option("--out", g.out, "Output directory")->capture_default_str();
  app.add_option("--log-level", g.log_level, "Log level")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}))
      ->capture_default_str();
  // Handled before parsing; declared so it shows up in --help.
  app.add_option("--config", g.config, "JSON config (e.g. a run.json) supplying defaults");

  stabkit::cli::add_synth(app, g);
  stabkit::cli::add_train(app, g);
  stabkit::cli::add_stabilize(app, g);
  stabkit::cli::add_evaluate(app, g);
  stabkit::cli::add_smooth_demo(app, g);

  try {
    std::vector<std::string> args(argv, argv + argc);
    args = expand_config(args);
    std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitUsage;
  } catch (const stabkit::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }

  setup_logging(g.log_level);
  try {
    for (auto& [sub, action] : stabkit::cli::actions())
      if (sub->parsed()) action();
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitUsage;
  } catch (const stabkit::StateError& e) {
    spdlog::error("{}", e.what());
    return kExitState;
  } catch (const stabkit::ConfigError& e) {
    spdlog::error("{}", e.what());
    return kExitState;
  } catch (const stabkit::Error& e) {
    spdlog::error("{}", e.what());
    return kExitData;
  } catch (const std::exception& e) {
    spdlog::error("unexpected failure: {}", e.what());
    return 1;
  }
  return 0;
}
