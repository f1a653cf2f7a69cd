#pragma once

// Experiment configuration: JSON parsing with per-module defaults, so a
// minimal config like {"process": {"kind": "shift_superposition"}} runs
// the standard experiment.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "oamtherm/kernel.hpp"
#include "oamtherm/optics.hpp"
#include "oamtherm/stats.hpp"

namespace oamtherm {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  SorterGeometry geometry;
  ProcessSpec process;
  LRange input_range{-7, 7};
  NoiseModel noise;
  int cutoff = 7;
  BetaGrid beta_grid;
  int trials = 1000;
  std::uint64_t seed = 20260823;
  std::string outputs = "out";

  TransitionKernel kernel() const { return make_kernel(process, input_range); }

  void validate() const {
    try {
      geometry.validate();
      noise.validate();
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
    if (cutoff < 0) throw ConfigError("cutoff: must be >= 0");
    if (trials < 1) throw ConfigError("trials: must be >= 1");
    if (!(beta_grid.min > 0.0)) throw ConfigError("beta_grid.min: must be > 0");
    if (!(beta_grid.step > 0.0)) throw ConfigError("beta_grid.step: must be > 0");
    if (beta_grid.max < beta_grid.min)
      throw ConfigError("beta_grid.max: must be >= beta_grid.min");
    if (cutoff > 0 && !input_range.contains(LRange(-cutoff, cutoff)))
      throw ConfigError("cutoff: thermal support exceeds process.input range");
  }
};

namespace detail {

template <typename T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string(key) + ": invalid value");
  }
}

}  // namespace detail

inline ExperimentConfig parse_config(const nlohmann::json& j) {
  ExperimentConfig cfg;
  if (j.contains("geometry")) {
    const auto& g = j.at("geometry");
    cfg.geometry.pixels = detail::get_or(g, "pixels", cfg.geometry.pixels);
    cfg.geometry.center0 = detail::get_or(g, "center0", cfg.geometry.center0);
    cfg.geometry.slope = detail::get_or(g, "slope", cfg.geometry.slope);
    cfg.geometry.width = detail::get_or(g, "width", cfg.geometry.width);
    int lo = detail::get_or(g, "ell_min", cfg.geometry.ell_range.lo);
    int hi = detail::get_or(g, "ell_max", cfg.geometry.ell_range.hi);
    if (lo > hi) throw ConfigError("geometry.ell_min: must be <= ell_max");
    cfg.geometry.ell_range = LRange(lo, hi);
  }
  if (j.contains("process")) {
    const auto& p = j.at("process");
    std::string kind = detail::get_or<std::string>(p, "kind", "shift_superposition");
    if (kind == "shift_superposition")
      cfg.process.kind = ProcessKind::shift_superposition;
    else if (kind == "demon")
      cfg.process.kind = ProcessKind::demon;
    else if (kind == "identity")
      cfg.process.kind = ProcessKind::identity;
    else
      throw ConfigError("process.kind: unknown value '" + kind + "'");
    if (p.contains("shifts")) {
      cfg.process.shifts.clear();
      for (const auto& s : p.at("shifts")) {
        if (!s.is_array() || s.size() != 2)
          throw ConfigError("process.shifts: expected [shift, weight] pairs");
        cfg.process.shifts.emplace_back(s.at(0).get<int>(),
                                        s.at(1).get<double>());
      }
    }
    cfg.process.demon_shift =
        detail::get_or(p, "demon_shift", cfg.process.demon_shift);
    cfg.process.delta_F = detail::get_or(p, "delta_F", cfg.process.delta_F);
    int lo = detail::get_or(p, "input_min", cfg.input_range.lo);
    int hi = detail::get_or(p, "input_max", cfg.input_range.hi);
    if (lo > hi) throw ConfigError("process.input_min: must be <= input_max");
    cfg.input_range = LRange(lo, hi);
  }
  if (j.contains("noise")) {
    const auto& n = j.at("noise");
    cfg.noise.rel_std = detail::get_or(n, "rel_std", cfg.noise.rel_std);
    cfg.noise.floor_frac = detail::get_or(n, "floor_frac", cfg.noise.floor_frac);
  }
  cfg.cutoff = detail::get_or(j, "cutoff", cfg.cutoff);
  if (j.contains("beta_grid")) {
    const auto& b = j.at("beta_grid");
    cfg.beta_grid.min = detail::get_or(b, "min", cfg.beta_grid.min);
    cfg.beta_grid.max = detail::get_or(b, "max", cfg.beta_grid.max);
    cfg.beta_grid.step = detail::get_or(b, "step", cfg.beta_grid.step);
  }
  cfg.trials = detail::get_or(j, "trials", cfg.trials);
  cfg.seed = detail::get_or(j, "seed", cfg.seed);
  cfg.outputs = detail::get_or(j, "outputs", cfg.outputs);
  cfg.validate();
  return cfg;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return parse_config(j);
}

inline nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["geometry"] = {{"pixels", cfg.geometry.pixels},
                   {"center0", cfg.geometry.center0},
                   {"slope", cfg.geometry.slope},
                   {"width", cfg.geometry.width},
                   {"ell_min", cfg.geometry.ell_range.lo},
                   {"ell_max", cfg.geometry.ell_range.hi}};
  const char* kind = nullptr;
  switch (cfg.process.kind) {
    case ProcessKind::shift_superposition: kind = "shift_superposition"; break;
    case ProcessKind::demon: kind = "demon"; break;
    case ProcessKind::identity: kind = "identity"; break;
    case ProcessKind::custom: kind = "custom"; break;
  }
  nlohmann::json shifts = nlohmann::json::array();
  for (auto [s, w] : cfg.process.shifts) shifts.push_back({s, w});
  j["process"] = {{"kind", kind},
                  {"shifts", shifts},
                  {"demon_shift", cfg.process.demon_shift},
                  {"delta_F", cfg.process.delta_F},
                  {"input_min", cfg.input_range.lo},
                  {"input_max", cfg.input_range.hi}};
  j["noise"] = {{"rel_std", cfg.noise.rel_std},
                {"floor_frac", cfg.noise.floor_frac}};
  j["cutoff"] = cfg.cutoff;
  j["beta_grid"] = {{"min", cfg.beta_grid.min},
                    {"max", cfg.beta_grid.max},
                    {"step", cfg.beta_grid.step}};
  j["trials"] = cfg.trials;
  j["seed"] = cfg.seed;
  j["outputs"] = cfg.outputs;
  return j;
}

}  // namespace oamtherm
