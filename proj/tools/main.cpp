#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <unistd.h>

#include <CLI11.hpp>

#include "fleq/errors.hpp"
#include "fleq/experiments.hpp"
#include "fleq/scenario.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

bool color_enabled() {
  return std::getenv("NO_COLOR") == nullptr && isatty(fileno(stderr)) != 0;
}

void print_error(const std::string& message) {
  if (color_enabled())
    std::cerr << "\x1b[31merror:\x1b[0m " << message << '\n';
  else
    std::cerr << "error: " << message << '\n';
}

std::filesystem::path resolve_out_dir(const fleq::ScenarioConfig& config,
                                      const std::string& out_flag) {
  if (!out_flag.empty()) return out_flag;
  if (config.out_dir) return config.base_dir / *config.out_dir;
  throw fleq::ConfigError("no output directory: pass --out or set out_dir in the config");
}

int run_experiment_command(const std::string& config_path, const std::string& out_flag,
                           std::optional<fleq::ExperimentKind> forced) {
  const fleq::ScenarioConfig config = fleq::load_config(config_path);
  if (forced && config.experiment != *forced)
    throw fleq::ConfigError("config names experiment '" +
                            fleq::experiment_name(config.experiment) +
                            "', expected '" + fleq::experiment_name(*forced) + "'");
  const auto out_dir = resolve_out_dir(config, out_flag);
  for (const auto& path : fleq::run_experiment(config, out_dir))
    std::cout << "wrote " << path.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"energy storage fleet equilibria, cost alignment, and tariff bargaining"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;

  CLI::App* run = app.add_subcommand("run", "run the experiment named in the config");
  run->add_option("--config", config_path, "scenario JSON file")->required();
  run->add_option("--out", out_dir, "output directory (overrides the config)");

  CLI::App* bargain = app.add_subcommand("bargain", "run the tariff bargaining experiment");
  bargain->add_option("--config", config_path, "scenario JSON file")->required();
  bargain->add_option("--out", out_dir, "output directory (overrides the config)");

  CLI::App* validate = app.add_subcommand("validate", "check a config without running it");
  validate->add_option("--config", config_path, "scenario JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (validate->parsed()) {
      const fleq::ScenarioConfig config = fleq::load_config(config_path);
      if (config.beta || config.beta_csv) fleq::build_scenario(config);
      std::cout << "ok\n";
      return 0;
    }
    const auto forced = bargain->parsed()
                            ? std::optional(fleq::ExperimentKind::kBargain)
                            : std::nullopt;
    return run_experiment_command(config_path, out_dir, forced);
  } catch (const fleq::ConfigError& e) {
    print_error(e.what());
    return kExitConfig;
  } catch (const fleq::ParseError& e) {
    print_error(e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    print_error(e.what());
    return kExitNumerical;
  }
}
