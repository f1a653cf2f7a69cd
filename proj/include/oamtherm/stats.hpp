#pragma once

// Two-point-measurement work statistics: work distribution, Jarzynski and
// feedback-modified exponential averages, fluctuation curves over a
// temperature grid, and the Monte Carlo uncertainty engine.

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "oamtherm/kernel.hpp"
#include "oamtherm/optics.hpp"
#include "oamtherm/reconstruct.hpp"
#include "oamtherm/thermal.hpp"

namespace oamtherm {

/// Work of a single transition, in units of hbar*omega.
inline double work_value(int ell_in, int ell_out) {
  return static_cast<double>(std::abs(ell_out) - std::abs(ell_in));
}

/// Discrete distribution of work values. Atoms with work values closer
/// than 1e-9 are merged.
class WorkDistribution {
 public:
  WorkDistribution() = default;

  void add(double work, double prob) {
    if (prob < 0.0) throw std::invalid_argument("WorkDistribution: p < 0");
    if (prob == 0.0) return;
    auto it = atoms_.lower_bound(work - 1e-9);
    if (it != atoms_.end() && std::abs(it->first - work) <= 1e-9)
      it->second += prob;
    else
      atoms_[work] = prob;
  }

  const std::map<double, double>& atoms() const { return atoms_; }

  double total() const {
    double s = 0.0;
    for (const auto& [w, p] : atoms_) s += p;
    return s;
  }

 private:
  std::map<double, double> atoms_;
};

inline WorkDistribution work_distribution(const ThermalEnsemble& ensemble,
                                          const TransitionKernel& kernel) {
  if (!kernel.input_range().contains(ensemble.support()))
    throw std::invalid_argument(
        "work_distribution: ensemble support exceeds kernel input range");
  WorkDistribution dist;
  for (int ell = -ensemble.cutoff(); ell <= ensemble.cutoff(); ++ell) {
    double p_ell = ensemble.prob(ell);
    for (const auto& [lp, cond] : kernel.row(ell))
      dist.add(work_value(ell, lp), p_ell * cond);
  }
  return dist;
}

/// <exp(-beta (W - dF))> over the distribution.
inline double exp_avg(const WorkDistribution& dist, double beta_hw,
                      double delta_F = 0.0) {
  if (beta_hw < 0.0) throw std::domain_error("exp_avg: beta_hw must be >= 0");
  double s = 0.0;
  for (const auto& [w, p] : dist.atoms())
    s += p * std::exp(-beta_hw * (w - delta_F));
  return s;
}

/// Feedback variant: exp(-I) * <exp(-beta (W - dF))>, with the acquired
/// information I fixed per realization.
inline double demon_avg(const WorkDistribution& dist, double beta_hw,
                        double delta_F, double information) {
  if (information < 0.0)
    throw std::domain_error("demon_avg: information must be >= 0");
  return std::exp(-information) * exp_avg(dist, beta_hw, delta_F);
}

inline double mean_work(const WorkDistribution& dist) {
  double s = 0.0;
  for (const auto& [w, p] : dist.atoms()) s += w * p;
  return s;
}

struct FluctuationResult {
  double beta_hw = 0.0;
  double value = 0.0;       // <exp(-sigma)> or <exp(-sigma - I)>
  double mean_work = 0.0;   // in hbar*omega
  double delta_F = 0.0;
  double information = 0.0; // nats
};

struct BetaGrid {
  double min = 0.05;
  double max = 5.0;
  double step = 0.05;

  std::vector<double> values() const {
    if (!(min > 0.0) || !(step > 0.0) || max < min)
      throw std::invalid_argument("BetaGrid: need 0 < min <= max, step > 0");
    std::vector<double> v;
    for (int i = 0;; ++i) {
      double b = min + step * i;
      if (b > max + 1e-12) break;
      v.push_back(b);
    }
    return v;
  }
};

/// Evaluates the fluctuation average per grid point; a fresh thermal
/// ensemble at the given cutoff is built for each temperature.
inline std::vector<FluctuationResult> fluctuation_curve(
    const TransitionKernel& kernel, int cutoff,
    const std::vector<double>& beta_grid, double delta_F = 0.0,
    double information = 0.0) {
  std::vector<FluctuationResult> out;
  out.reserve(beta_grid.size());
  for (double beta : beta_grid) {
    if (!(beta > 0.0))
      throw std::domain_error("fluctuation_curve: grid values must be > 0");
    ThermalEnsemble ens(beta, cutoff);
    WorkDistribution dist = work_distribution(ens, kernel);
    FluctuationResult r;
    r.beta_hw = beta;
    r.delta_F = delta_F;
    r.information = information;
    r.value = information > 0.0 ? demon_avg(dist, beta, delta_F, information)
                                : exp_avg(dist, beta, delta_F);
    r.mean_work = mean_work(dist);
    out.push_back(r);
  }
  return out;
}

/// Cutoff large enough that the omitted tail contribution to the
/// exponential average is negligible (< 1e-12). The margin term covers the
/// exp(+beta*shift) amplification of boundary transitions, which dominates
/// the plain tail mass at low temperature.
inline int untruncated_cutoff(double beta_min, int max_shift = 5) {
  if (!(beta_min > 0.0))
    throw std::domain_error("untruncated_cutoff: beta_min must be > 0");
  return static_cast<int>(std::ceil(30.0 / beta_min)) + 2 * max_shift;
}

struct UncertaintyBand {
  std::vector<double> beta_grid;
  std::vector<double> mean;
  std::vector<double> std_dev;
  std::vector<double> ci95_lo;
  std::vector<double> ci95_hi;
  int trials = 0;           // trials that produced a converged fit
  int excluded_trials = 0;  // fits that failed to converge
};

struct MonteCarloConfig {
  SorterGeometry geometry;
  TransitionKernel kernel{LRange(0, 0), LRange(0, 0), {1.0}};  // true process
  NoiseModel noise;
  int cutoff = 7;
  std::vector<double> beta_grid;
  double delta_F = 0.0;
  double information = 0.0;
  int trials = 1000;
  std::uint64_t seed = 0;
};

/// Monte Carlo uncertainty propagation: per trial, regenerate noisy observations,
/// refit the transition matrix and recompute the fluctuation curve. Per-trial
/// seeds derive from (seed, trial index), so results are independent of
/// scheduling.
inline UncertaintyBand monte_carlo_band(const MonteCarloConfig& config) {
  if (config.trials < 2)
    throw std::invalid_argument("monte_carlo_band: trials must be >= 2");
  CalibrationSet calib = calibration_profiles(config.geometry);
  const std::size_t npts = config.beta_grid.size();
  std::vector<std::vector<double>> samples(npts);

  UncertaintyBand band;
  band.beta_grid = config.beta_grid;
  for (int t = 0; t < config.trials; ++t) {
    std::uint64_t trial_seed =
        derive_seed(config.seed, 0x4d43000000000000ull + t);
    auto obs = simulate_observations(config.kernel, calib, config.noise,
                                     trial_seed);
    FitReport fit = fit_transition_matrix(calib, obs);
    if (!fit.converged) {
      ++band.excluded_trials;
      continue;
    }
    auto curve = fluctuation_curve(fit.kernel, config.cutoff, config.beta_grid,
                                   config.delta_F, config.information);
    for (std::size_t i = 0; i < npts; ++i) samples[i].push_back(curve[i].value);
    ++band.trials;
  }
  if (band.trials < 2)
    throw std::runtime_error("monte_carlo_band: fewer than 2 converged trials");

  band.mean.resize(npts);
  band.std_dev.resize(npts);
  band.ci95_lo.resize(npts);
  band.ci95_hi.resize(npts);
  const double n = band.trials;
  for (std::size_t i = 0; i < npts; ++i) {
    double sum = 0.0;
    for (double v : samples[i]) sum += v;
    band.mean[i] = sum / n;
    // Two-pass variance; the one-pass form loses all precision when the
    // spread is tiny relative to the mean.
    double ss = 0.0;
    for (double v : samples[i]) ss += (v - band.mean[i]) * (v - band.mean[i]);
    band.std_dev[i] = std::sqrt(ss / (n - 1.0));
    band.ci95_lo[i] = band.mean[i] - 1.96 * band.std_dev[i];
    band.ci95_hi[i] = band.mean[i] + 1.96 * band.std_dev[i];
  }
  return band;
}

}  // namespace oamtherm
