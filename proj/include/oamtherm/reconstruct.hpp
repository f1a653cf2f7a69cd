#pragma once

// Recovery of the transition matrix A from calibration profiles X and
// observed output profiles Y: per-row least squares over the probability
// simplex, solved by projected gradient with Barzilai-Borwein steps and
// exact sort-based simplex projection.

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "oamtherm/kernel.hpp"
#include "oamtherm/optics.hpp"

namespace oamtherm {

struct FitReport {
  TransitionKernel kernel{LRange(0, 0), LRange(0, 0), {1.0}};
  double residual = 0.0;  // Frobenius norm of Y - A X
  int iterations = 0;
  bool converged = false;
};

/// Euclidean projection onto the probability simplex (Held et al.).
inline void project_simplex(std::vector<double>& v) {
  const int n = static_cast<int>(v.size());
  std::vector<double> u(v);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double css = 0.0, theta = 0.0;
  int rho = 0;
  for (int i = 0; i < n; ++i) {
    css += u[i];
    double t = (css - 1.0) / (i + 1);
    if (u[i] - t > 0.0) {
      rho = i + 1;
      theta = t;
    }
  }
  for (double& x : v) x = std::max(0.0, x - theta);
}

namespace detail {

// min ||y - X^T a||^2 over the simplex, where gram = X X^T and xy = X y.
// Returns iterations used; sets converged.
inline int solve_simplex_lsq(const std::vector<std::vector<double>>& gram,
                             const std::vector<double>& xy, double tol,
                             int max_iter, std::vector<double>& a,
                             bool& converged) {
  const int n = static_cast<int>(xy.size());
  a.assign(n, 1.0 / n);

  // Lipschitz bound from the Gram row sums, for the fallback step.
  double lips = 0.0;
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += std::abs(gram[i][j]);
    lips = std::max(lips, s);
  }
  lips = std::max(lips, 1e-300);
  const double fixed_step = 1.0 / (2.0 * lips);

  auto gradient = [&](const std::vector<double>& x, std::vector<double>& g) {
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int j = 0; j < n; ++j) s += gram[i][j] * x[j];
      g[i] = 2.0 * (s - xy[i]);
    }
  };
  auto objective = [&](const std::vector<double>& x) {
    // Up to the constant ||y||^2: x^T G x - 2 x^T (X y).
    double q = 0.0;
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int j = 0; j < n; ++j) s += gram[i][j] * x[j];
      q += x[i] * (s - 2.0 * xy[i]);
    }
    return q;
  };

  std::vector<double> g(n), g_prev(n), a_prev(n), trial(n);
  gradient(a, g);
  double f_prev = objective(a);
  double step = fixed_step;
  converged = false;
  int it = 0;
  for (; it < max_iter; ++it) {
    // Projected-gradient stationarity check at unit step.
    double pg_norm = 0.0;
    for (int i = 0; i < n; ++i) trial[i] = a[i] - g[i];
    project_simplex(trial);
    for (int i = 0; i < n; ++i)
      pg_norm = std::max(pg_norm, std::abs(trial[i] - a[i]));
    if (pg_norm <= tol) {
      converged = true;
      break;
    }

    a_prev = a;
    g_prev = g;
    for (int i = 0; i < n; ++i) a[i] -= step * g[i];
    project_simplex(a);
    gradient(a, g);

    double f = objective(a);
    if (f > f_prev + 1e-15) {
      // Non-monotone BB step; redo from the previous iterate with the
      // safe fixed step.
      a = a_prev;
      for (int i = 0; i < n; ++i) a[i] -= fixed_step * g_prev[i];
      project_simplex(a);
      gradient(a, g);
      f = objective(a);
    }
    f_prev = f;

    // Barzilai-Borwein step for the next iteration.
    double ss = 0.0, sy = 0.0;
    for (int i = 0; i < n; ++i) {
      double si = a[i] - a_prev[i];
      ss += si * si;
      sy += si * (g[i] - g_prev[i]);
    }
    step = (sy > 1e-300) ? std::clamp(ss / sy, 1e-12, 1e12) : fixed_step;
  }
  return it;
}

}  // namespace detail

/// Frobenius norm of Y - A X for a given kernel A.
inline double residual_norm(const TransitionKernel& kernel,
                            const CalibrationSet& calib,
                            const std::map<int, IntensityProfile>& observations) {
  const int pixels = calib.geometry.pixels;
  double ss = 0.0;
  for (const auto& [ell, y] : observations) {
    if (static_cast<int>(y.bins.size()) != pixels)
      throw std::invalid_argument("residual_norm: bin count mismatch");
    std::vector<double> model(pixels, 0.0);
    for (const auto& [lp, w] : kernel.row(ell)) {
      const auto& x = calib.profile(lp);
      for (int k = 0; k < pixels; ++k) model[k] += w * x.bins[k];
    }
    for (int k = 0; k < pixels; ++k) {
      double r = y.bins[k] - model[k];
      ss += r * r;
    }
  }
  return std::sqrt(ss);
}

/// Fits one simplex-constrained row per observed input mode; rows decouple,
/// so the result is deterministic regardless of evaluation order.
inline FitReport fit_transition_matrix(
    const CalibrationSet& calib,
    const std::map<int, IntensityProfile>& observations, double tol = 1e-10,
    int max_iter = 10000) {
  if (observations.empty())
    throw std::invalid_argument("fit_transition_matrix: no observations");
  const int pixels = calib.geometry.pixels;
  const LRange out_range = calib.geometry.ell_range;
  const int n = out_range.size();

  // Gram matrix X X^T over calibration profiles, shared by all rows.
  std::vector<std::vector<double>> gram(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) {
    const auto& xi = calib.profile(out_range.lo + i);
    for (int j = i; j < n; ++j) {
      const auto& xj = calib.profile(out_range.lo + j);
      double s = std::inner_product(xi.bins.begin(), xi.bins.end(),
                                    xj.bins.begin(), 0.0);
      gram[i][j] = gram[j][i] = s;
    }
  }

  const int in_lo = observations.begin()->first;
  const int in_hi = observations.rbegin()->first;
  LRange in_range(in_lo, in_hi);
  if (static_cast<int>(observations.size()) != in_range.size())
    throw std::invalid_argument(
        "fit_transition_matrix: observations must cover a contiguous ell range");

  std::vector<double> entries;
  entries.reserve(static_cast<std::size_t>(in_range.size()) * n);
  FitReport report;
  report.converged = true;
  for (const auto& [ell, y] : observations) {
    if (static_cast<int>(y.bins.size()) != pixels)
      throw std::invalid_argument("fit_transition_matrix: bin count mismatch");
    std::vector<double> xy(n);
    for (int j = 0; j < n; ++j) {
      const auto& xj = calib.profile(out_range.lo + j);
      xy[j] = std::inner_product(xj.bins.begin(), xj.bins.end(),
                                 y.bins.begin(), 0.0);
    }
    std::vector<double> a;
    bool row_converged = false;
    int it = detail::solve_simplex_lsq(gram, xy, tol, max_iter, a, row_converged);
    report.iterations = std::max(report.iterations, it);
    report.converged = report.converged && row_converged;
    entries.insert(entries.end(), a.begin(), a.end());
  }
  report.kernel = TransitionKernel(in_range, out_range, std::move(entries));
  report.residual = residual_norm(report.kernel, calib, observations);
  return report;
}

}  // namespace oamtherm
