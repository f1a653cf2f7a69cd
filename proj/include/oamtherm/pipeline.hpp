#pragma once

// Subcommand execution: calibrate -> simulate -> reconstruct -> analyze,
// with deterministic file outputs suitable for golden-file testing.

#include <cmath>
#include <filesystem>
#include <stdexcept>
#include <string>

#include "oamtherm/config.hpp"
#include "oamtherm/io.hpp"
#include "oamtherm/reconstruct.hpp"
#include "oamtherm/stats.hpp"

namespace oamtherm {

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::uint64_t obs_seed(const ExperimentConfig& cfg) {
  return derive_seed(cfg.seed, 0x6f627331ull);  // observation substream
}

}  // namespace detail

inline void run_calibrate(const ExperimentConfig& cfg,
                          const std::filesystem::path& out_dir) {
  CalibrationSet calib = calibration_profiles(cfg.geometry);
  write_profiles_csv(calib.profiles, out_dir / "calibration.csv");
}

inline void run_simulate(const ExperimentConfig& cfg,
                         const std::filesystem::path& out_dir) {
  CalibrationSet calib = calibration_profiles(cfg.geometry);
  auto obs = simulate_observations(cfg.kernel(), calib, cfg.noise,
                                   detail::obs_seed(cfg));
  write_profiles_csv(obs, out_dir / "observations.csv");
}

inline FitReport run_reconstruct(const ExperimentConfig& cfg,
                                 const std::filesystem::path& out_dir) {
  CalibrationSet calib = calibration_profiles(cfg.geometry);
  auto obs = simulate_observations(cfg.kernel(), calib, cfg.noise,
                                   detail::obs_seed(cfg));
  FitReport report = fit_transition_matrix(calib, obs);
  write_kernel_csv(report.kernel, out_dir / "kernel.csv");
  write_fit_report_json(report, out_dir / "fit_report.json");
  if (!report.converged)
    throw NumericalError("reconstruction did not converge");
  return report;
}

inline void run_work_stats(const ExperimentConfig& cfg,
                           const std::filesystem::path& out_dir) {
  TransitionKernel kernel = cfg.kernel();
  ThermalEnsemble ens(2.0, cfg.cutoff);
  write_work_csv(work_distribution(ens, kernel), out_dir / "work_distribution.csv");
  auto curve = fluctuation_curve(kernel, cfg.cutoff, cfg.beta_grid.values(),
                                 cfg.process.delta_F);
  write_curve_csv(curve, out_dir / "curve.csv");
}

inline void run_demon(const ExperimentConfig& cfg,
                      const std::filesystem::path& out_dir) {
  TransitionKernel kernel = demon_kernel(cfg.process.demon_shift, cfg.input_range);
  auto curve = fluctuation_curve(kernel, cfg.cutoff, cfg.beta_grid.values(),
                                 cfg.process.delta_F, std::log(2.0));
  write_curve_csv(curve, out_dir / "demon_curve.csv");
}

inline void run_mc_band(const ExperimentConfig& cfg,
                        const std::filesystem::path& out_dir) {
  MonteCarloConfig mc;
  mc.geometry = cfg.geometry;
  mc.kernel = cfg.kernel();
  mc.noise = cfg.noise;
  mc.cutoff = cfg.cutoff;
  mc.beta_grid = cfg.beta_grid.values();
  mc.delta_F = cfg.process.delta_F;
  mc.information = cfg.process.kind == ProcessKind::demon ? std::log(2.0) : 0.0;
  mc.trials = cfg.trials;
  mc.seed = cfg.seed;
  write_band_csv(monte_carlo_band(mc), out_dir / "band.csv");
}

/// Runs one named subcommand; creates the output directory if needed.
/// Throws ConfigError for bad input, NumericalError for solver failure.
inline void run_subcommand(const std::string& name,
                           const ExperimentConfig& cfg) {
  cfg.validate();
  std::filesystem::path out_dir(cfg.outputs);
  std::filesystem::create_directories(out_dir);
  if (name == "calibrate") {
    run_calibrate(cfg, out_dir);
  } else if (name == "simulate") {
    run_simulate(cfg, out_dir);
  } else if (name == "reconstruct") {
    run_reconstruct(cfg, out_dir);
  } else if (name == "work-stats") {
    run_work_stats(cfg, out_dir);
  } else if (name == "demon") {
    run_demon(cfg, out_dir);
  } else if (name == "mc-band") {
    run_mc_band(cfg, out_dir);
  } else if (name == "pipeline") {
    run_calibrate(cfg, out_dir);
    run_simulate(cfg, out_dir);
    run_reconstruct(cfg, out_dir);
    run_work_stats(cfg, out_dir);
    run_demon(cfg, out_dir);
    run_mc_band(cfg, out_dir);
  } else {
    throw ConfigError("unknown subcommand: " + name);
  }
}

}  // namespace oamtherm
