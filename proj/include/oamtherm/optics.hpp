#pragma once

// Synthetic mode-sorter measurement channel: per-order calibration
// profiles on an 80-bin camera marginal, incoherent rendering of process
// outputs, and the multiplicative-plus-floor noise model.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "oamtherm/kernel.hpp"
#include "oamtherm/modes.hpp"
#include "oamtherm/rng.hpp"

namespace oamtherm {

struct SorterGeometry {
  int pixels = 80;
  double center0 = 40.0;  // pixel coordinate of ell = 0
  double slope = 2.5;     // pixels per unit ell
  double width = 1.8;     // Gaussian sigma in pixels
  LRange ell_range{-15, 15};

  double center(int ell) const { return center0 + slope * ell; }

  void validate() const {
    if (pixels <= 0) throw std::invalid_argument("SorterGeometry: pixels <= 0");
    if (!(slope > 0.0)) throw std::invalid_argument("SorterGeometry: slope <= 0");
    if (!(width > 0.0)) throw std::invalid_argument("SorterGeometry: width <= 0");
    for (int ell : {ell_range.lo, ell_range.hi}) {
      double c = center(ell);
      if (c < 0.0 || c >= pixels)
        throw std::invalid_argument(
            "SorterGeometry: calibration center outside pixel range");
    }
  }
};

struct IntensityProfile {
  std::vector<double> bins;

  double total() const {
    double s = 0.0;
    for (double b : bins) s += b;
    return s;
  }

  int argmax() const {
    return static_cast<int>(std::max_element(bins.begin(), bins.end()) -
                            bins.begin());
  }
};

/// One unit-power profile per ell in the geometry's range (the matrix X).
struct CalibrationSet {
  SorterGeometry geometry;
  std::map<int, IntensityProfile> profiles;

  const IntensityProfile& profile(int ell) const {
    auto it = profiles.find(ell);
    if (it == profiles.end())
      throw std::out_of_range("CalibrationSet: ell outside calibration range");
    return it->second;
  }
};

struct NoiseModel {
  double rel_std = 0.05;     // sigma = rel_std * mu + floor_frac * max(mu)
  double floor_frac = 0.001;

  void validate() const {
    if (rel_std < 0.0 || rel_std > 0.10)
      throw std::invalid_argument("NoiseModel: rel_std must be in [0, 0.10]");
    if (floor_frac < 0.0)
      throw std::invalid_argument("NoiseModel: floor_frac must be >= 0");
  }
};

/// Discretized Gaussian bump per OAM order, each normalized to unit sum.
inline CalibrationSet calibration_profiles(const SorterGeometry& geometry) {
  geometry.validate();
  CalibrationSet set;
  set.geometry = geometry;
  for (int ell = geometry.ell_range.lo; ell <= geometry.ell_range.hi; ++ell) {
    IntensityProfile p;
    p.bins.resize(geometry.pixels);
    double c = geometry.center(ell);
    double sum = 0.0;
    for (int k = 0; k < geometry.pixels; ++k) {
      double z = (k - c) / geometry.width;
      double v = std::exp(-0.5 * z * z);
      // Flush far-tail subnormals so serialized values stay parseable.
      p.bins[k] = v < 1e-300 ? 0.0 : v;
      sum += p.bins[k];
    }
    for (double& b : p.bins) b /= sum;
    set.profiles[ell] = std::move(p);
  }
  return set;
}

/// Incoherent mixture sum_l w(l) * x_l of calibration profiles.
inline IntensityProfile render_output(const std::map<int, double>& weights,
                                      const CalibrationSet& calib) {
  double wsum = 0.0;
  for (const auto& [ell, w] : weights) {
    if (!calib.geometry.ell_range.contains(ell))
      throw std::out_of_range("render_output: weight outside calibration range");
    wsum += w;
  }
  if (std::abs(wsum - 1.0) > 1e-9)
    throw std::invalid_argument("render_output: weights must sum to 1");
  IntensityProfile out;
  out.bins.assign(calib.geometry.pixels, 0.0);
  for (const auto& [ell, w] : weights) {
    const auto& x = calib.profile(ell);
    for (int k = 0; k < calib.geometry.pixels; ++k) out.bins[k] += w * x.bins[k];
  }
  return out;
}

/// Independent per-bin Gaussian noise, sigma = rel_std*mu + floor_frac*max,
/// clamped at zero. Pure function of (profile, model, seed).
inline IntensityProfile apply_noise(const IntensityProfile& profile,
                                    const NoiseModel& model,
                                    std::uint64_t seed) {
  model.validate();
  if (model.rel_std == 0.0 && model.floor_frac == 0.0) return profile;
  double peak = profile.bins.empty()
                    ? 0.0
                    : *std::max_element(profile.bins.begin(), profile.bins.end());
  Rng rng(derive_seed(seed, 0x6e6f6973ull));
  IntensityProfile out;
  out.bins.reserve(profile.bins.size());
  for (double mu : profile.bins) {
    double sigma = model.rel_std * mu + model.floor_frac * peak;
    double v = sigma > 0.0 ? rng.normal(mu, sigma) : mu;
    out.bins.push_back(std::max(0.0, v));
  }
  return out;
}

/// Synthetic observation set Y: one noisy rendered profile per input ell.
/// Per-mode seeds derive from (seed, ell) so modes are independent.
inline std::map<int, IntensityProfile> simulate_observations(
    const TransitionKernel& kernel, const CalibrationSet& calib,
    const NoiseModel& model, std::uint64_t seed) {
  if (!calib.geometry.ell_range.contains(kernel.output_range()))
    throw std::out_of_range(
        "simulate_observations: kernel output outside calibration range");
  std::map<int, IntensityProfile> obs;
  LRange in = kernel.input_range();
  for (int ell = in.lo; ell <= in.hi; ++ell) {
    IntensityProfile clean = render_output(kernel.row(ell), calib);
    std::uint64_t mode_seed =
        derive_seed(seed, static_cast<std::uint64_t>(static_cast<std::int64_t>(ell)));
    obs[ell] = apply_noise(clean, model, mode_seed);
  }
  return obs;
}

}  // namespace oamtherm
