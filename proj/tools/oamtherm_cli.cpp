// Command-line driver for the mode-sorter thermodynamics pipeline.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <cstdint>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oamtherm/oamtherm.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mode-sorter quantum-thermodynamics simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool quiet = false;

  const std::vector<std::string> names = {"calibrate", "simulate",
                                          "reconstruct", "work-stats",
                                          "demon", "mc-band", "pipeline"};
  for (const auto& name : names) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON configuration file");
    sub->add_option("--seed", seed, "override the config seed")
        ->each([&](const std::string&) { seed_set = true; });
    sub->add_option("--out", out_dir, "override the output directory");
    sub->add_flag("--quiet", quiet, "suppress progress output");
  }

  CLI11_PARSE(app, argc, argv);
  const std::string subcommand = app.get_subcommands().front()->get_name();

  try {
    oamtherm::ExperimentConfig cfg;
    if (!config_path.empty()) {
      cfg = oamtherm::load_config(config_path);
    } else {
      cfg.validate();
    }
    if (seed_set) cfg.seed = seed;
    if (!out_dir.empty()) cfg.outputs = out_dir;

    if (!quiet)
      std::cout << "running " << subcommand << " (seed " << cfg.seed
                << ") -> " << cfg.outputs << "\n";
    oamtherm::run_subcommand(subcommand, cfg);
    if (!quiet) std::cout << "done\n";
  } catch (const oamtherm::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const oamtherm::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return 0;
}
