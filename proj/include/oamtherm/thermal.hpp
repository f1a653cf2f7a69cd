#pragma once

// Truncated thermal ensembles over the azimuthal index, seeded sampling and
// Boltzmann-fit temperature recovery.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <vector>

#include "oamtherm/modes.hpp"
#include "oamtherm/rng.hpp"

namespace oamtherm {

/// Boltzmann distribution over ell, truncated to |ell| <= cutoff and
/// renormalized. Probabilities depend on |ell| only, so every level except
/// ell = 0 carries the two-fold degeneracy explicitly.
class ThermalEnsemble {
 public:
  ThermalEnsemble(double beta_hw, int cutoff)
      : beta_hw_(beta_hw), cutoff_(cutoff) {
    if (!(beta_hw > 0.0))
      throw std::domain_error("ThermalEnsemble: beta_hw must be positive");
    if (cutoff < 0)
      throw std::invalid_argument("ThermalEnsemble: cutoff must be >= 0");
    // Weights relative to the ground state; dividing out exp(-beta) first
    // keeps the sum well conditioned at large beta.
    std::vector<double> rel(cutoff + 1);
    double total = 0.0;
    for (int a = 0; a <= cutoff; ++a) {
      rel[a] = std::exp(-beta_hw * a);
      total += (a == 0 ? 1.0 : 2.0) * rel[a];
    }
    abs_probs_.resize(cutoff + 1);
    for (int a = 0; a <= cutoff; ++a) abs_probs_[a] = rel[a] / total;
  }

  double beta_hw() const { return beta_hw_; }
  int cutoff() const { return cutoff_; }

  /// Probability of a single ell value (not the level probability).
  double prob(int ell) const {
    int a = std::abs(ell);
    if (a > cutoff_) return 0.0;
    return abs_probs_[a];
  }

  LRange support() const { return LRange(-cutoff_, cutoff_); }

  std::map<int, double> probs() const {
    std::map<int, double> out;
    for (int ell = -cutoff_; ell <= cutoff_; ++ell) out[ell] = prob(ell);
    return out;
  }

 private:
  double beta_hw_;
  int cutoff_;
  std::vector<double> abs_probs_;  // indexed by |ell|
};

/// Sum of Boltzmann weights exp(-beta_hw*(|ell|+1)) over |ell| <= cutoff.
inline double partition_sum(double beta_hw, int cutoff) {
  if (!(beta_hw > 0.0))
    throw std::domain_error("partition_sum: beta_hw must be positive");
  if (cutoff < 0)
    throw std::invalid_argument("partition_sum: cutoff must be >= 0");
  double q = std::exp(-beta_hw);
  double sum = q;
  double term = q;
  for (int a = 1; a <= cutoff; ++a) {
    term *= q;
    sum += 2.0 * term;
  }
  return sum;
}

/// Closed form of the untruncated sum: q(1+q)/(1-q) with q = exp(-beta_hw).
inline double partition_sum(double beta_hw) {
  if (!(beta_hw > 0.0))
    throw std::domain_error("partition_sum: beta_hw must be positive");
  double q = std::exp(-beta_hw);
  return q * (1.0 + q) / (1.0 - q);
}

inline ThermalEnsemble thermal_distribution(double beta_hw, int cutoff) {
  return ThermalEnsemble(beta_hw, cutoff);
}

/// n independent inverse-CDF draws; identical (ensemble, n, seed) inputs
/// give identical output.
inline std::vector<ModeIndex> sample_modes(const ThermalEnsemble& ensemble,
                                           int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_modes: n must be >= 1");
  const int L = ensemble.cutoff();
  std::vector<double> cdf;
  cdf.reserve(2 * L + 1);
  double acc = 0.0;
  for (int ell = -L; ell <= L; ++ell) {
    acc += ensemble.prob(ell);
    cdf.push_back(acc);
  }
  cdf.back() = 1.0;  // absorb rounding in the last bin

  Rng rng(derive_seed(seed, /*tag=*/0x5a4d504cull));  // "sample" substream
  std::vector<ModeIndex> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    double u = rng.uniform();
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    int idx = static_cast<int>(it - cdf.begin());
    if (idx > 2 * L) idx = 2 * L;
    out.push_back(ModeIndex(idx - L));
  }
  return out;
}

struct BoltzmannFit {
  double beta_hw_est = 0.0;
  double normalization = 0.0;
  double stderr_beta = 0.0;
};

namespace detail {

// Residual sum of squares of the model N*exp(-beta*(a+1)) against the
// normalized histogram, with N eliminated in closed form for each beta.
inline double boltzmann_rss(const std::vector<int>& abs_ell,
                            const std::vector<double>& y, double beta,
                            double* n_opt = nullptr) {
  double gg = 0.0, gy = 0.0;
  std::vector<double> g(abs_ell.size());
  for (std::size_t k = 0; k < abs_ell.size(); ++k) {
    g[k] = std::exp(-beta * (abs_ell[k] + 1));
    gg += g[k] * g[k];
    gy += g[k] * y[k];
  }
  double N = gy / gg;
  if (n_opt) *n_opt = N;
  double rss = 0.0;
  for (std::size_t k = 0; k < abs_ell.size(); ++k) {
    double r = y[k] - N * g[k];
    rss += r * r;
  }
  return rss;
}

}  // namespace detail

/// Least-squares fit of normalized counts to N*exp(-beta_hw*(|ell|+1)).
/// Counts keyed by |ell|; at least two bins with nonzero counts required.
/// Nondecreasing counts are legal and yield beta_hw_est <= 0.
inline BoltzmannFit fit_boltzmann(const std::map<int, double>& counts) {
  std::vector<int> abs_ell;
  std::vector<double> y;
  double total = 0.0;
  int nonzero = 0;
  for (const auto& [a, c] : counts) {
    if (a < 0) throw std::invalid_argument("fit_boltzmann: keys are |ell|");
    if (c < 0.0) throw std::invalid_argument("fit_boltzmann: negative count");
    abs_ell.push_back(a);
    y.push_back(c);
    total += c;
    if (c > 0.0) ++nonzero;
  }
  if (nonzero < 2)
    throw std::invalid_argument(
        "fit_boltzmann: need at least two nonzero |ell| bins");
  for (double& v : y) v /= total;

  // Coarse bracket then golden-section refinement. The RSS is smooth in
  // beta and unimodal near the optimum for any decreasing histogram.
  double best_beta = 0.0;
  double best_rss = std::numeric_limits<double>::infinity();
  for (int i = -200; i <= 200; ++i) {
    double b = 0.05 * i;
    double rss = detail::boltzmann_rss(abs_ell, y, b);
    if (rss < best_rss) {
      best_rss = rss;
      best_beta = b;
    }
  }
  double lo = best_beta - 0.05, hi = best_beta + 0.05;
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - invphi * (hi - lo);
  double d = lo + invphi * (hi - lo);
  double fc = detail::boltzmann_rss(abs_ell, y, c);
  double fd = detail::boltzmann_rss(abs_ell, y, d);
  while (hi - lo > 1e-13) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - invphi * (hi - lo);
      fc = detail::boltzmann_rss(abs_ell, y, c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + invphi * (hi - lo);
      fd = detail::boltzmann_rss(abs_ell, y, d);
    }
  }
  double beta = 0.5 * (lo + hi);
  BoltzmannFit fit;
  double rss = detail::boltzmann_rss(abs_ell, y, beta, &fit.normalization);
  fit.beta_hw_est = beta;

  // Covariance from the Gauss-Newton normal matrix of (N, beta).
  const std::size_t n = abs_ell.size();
  if (n > 2) {
    double jnn = 0.0, jnb = 0.0, jbb = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      double g = std::exp(-beta * (abs_ell[k] + 1));
      double dN = g;
      double dB = -fit.normalization * (abs_ell[k] + 1) * g;
      jnn += dN * dN;
      jnb += dN * dB;
      jbb += dB * dB;
    }
    double det = jnn * jbb - jnb * jnb;
    double sigma2 = rss / static_cast<double>(n - 2);
    fit.stderr_beta = det > 0.0 ? std::sqrt(sigma2 * jnn / det) : 0.0;
  }
  return fit;
}

}  // namespace oamtherm
