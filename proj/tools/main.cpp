#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "nav2goal/pipeline.hpp"

namespace {

nav2goal::KeyValueConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  auto cfg = path.empty() ? nav2goal::KeyValueConfig{} : nav2goal::KeyValueConfig::from_file(path);
  for (const auto& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw nav2goal::ConfigError("--set expects key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Goal-conditioned navigation pipeline"};
  app.require_subcommand(1, 1);
  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_dir;
  std::vector<std::string> overrides;
  app.add_option("--config", config_path, "Run configuration file")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "Pipeline seed (overrides pipeline.seed)");
  app.add_option("--out", out_dir, "Output directory (overrides pipeline.out)");
  app.add_option("--set", overrides, "Override a configuration key, key=value");

  std::vector<std::string> commands = nav2goal::pipeline::command_names();
  commands.push_back("all");
  for (const auto& name : commands) {
    auto* sub = app.add_subcommand(name, name == "all" ? "Run every stage in order" : "Pipeline stage " + name);
    sub->fallthrough();
  }

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    auto cfg = load_config(config_path, overrides);
    if (app.count("--seed")) cfg.set("pipeline.seed", std::to_string(seed));
    if (!out_dir.empty()) cfg.set("pipeline.out", out_dir);
    const auto run = nav2goal::pipeline::RunConfig::from_config(cfg);
    if (command != "all") return nav2goal::pipeline::run_command(command, run, std::cout);
    int worst = 0;
    for (const auto& stage : nav2goal::pipeline::command_names()) {
      const int rc = nav2goal::pipeline::run_command(stage, run, std::cout);
      worst = std::max(worst, rc);
    }
    return worst;
  } catch (const nav2goal::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
