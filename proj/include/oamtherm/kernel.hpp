#pragma once

// Row-stochastic transition kernels over the azimuthal index: the
// shift-superposition process, the measurement-and-feedback (demon)
// process, and perturbed variants for noise studies.

#include <algorithm>
#include <climits>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "oamtherm/modes.hpp"
#include "oamtherm/rng.hpp"

namespace oamtherm {

/// Conditional probabilities p(ell_out | ell_in) on rectangular index
/// ranges. Rows always sum to 1; entries are nonnegative.
class TransitionKernel {
 public:
  TransitionKernel(LRange input_range, LRange output_range,
                   std::vector<double> entries)
      : input_(input_range), output_(output_range),
        entries_(std::move(entries)) {
    const std::size_t expected =
        static_cast<std::size_t>(input_.size()) * output_.size();
    if (entries_.size() != expected)
      throw std::invalid_argument("TransitionKernel: entry count mismatch");
    for (int i = 0; i < input_.size(); ++i) {
      double row_sum = 0.0;
      for (int j = 0; j < output_.size(); ++j) {
        double v = entries_[idx(i, j)];
        if (v < 0.0)
          throw std::invalid_argument("TransitionKernel: negative entry");
        row_sum += v;
      }
      if (std::abs(row_sum - 1.0) > 1e-9)
        throw std::invalid_argument("TransitionKernel: row sum != 1");
    }
  }

  LRange input_range() const { return input_; }
  LRange output_range() const { return output_; }

  double prob(int ell_in, int ell_out) const {
    if (!input_.contains(ell_in))
      throw std::out_of_range("TransitionKernel: input ell out of range");
    if (!output_.contains(ell_out)) return 0.0;
    return entries_[idx(input_.index_of(ell_in), output_.index_of(ell_out))];
  }

  /// Row as a map from output ell to probability, zero entries omitted.
  std::map<int, double> row(int ell_in) const {
    std::map<int, double> out;
    int i = input_.index_of(ell_in);
    if (i < 0 || i >= input_.size())
      throw std::out_of_range("TransitionKernel: input ell out of range");
    for (int j = 0; j < output_.size(); ++j) {
      double v = entries_[idx(i, j)];
      if (v != 0.0) out[output_.lo + j] = v;
    }
    return out;
  }

  const std::vector<double>& entries() const { return entries_; }

  friend bool operator==(const TransitionKernel& a, const TransitionKernel& b) {
    return a.input_ == b.input_ && a.output_ == b.output_ &&
           a.entries_ == b.entries_;
  }

 private:
  std::size_t idx(int i, int j) const {
    return static_cast<std::size_t>(i) * output_.size() + j;
  }

  LRange input_;
  LRange output_;
  std::vector<double> entries_;  // row-major, input x output
};

enum class ProcessKind { shift_superposition, demon, identity, custom };

/// Declarative description of a built-in process; delta_F is 0 for all of
/// them since none changes the Hamiltonian.
struct ProcessSpec {
  ProcessKind kind = ProcessKind::shift_superposition;
  std::vector<std::pair<int, double>> shifts = {{+5, 0.5}, {-5, 0.5}};
  int demon_shift = 5;
  double delta_F = 0.0;
};

/// Kernel of a weighted superposition of index shifts. The branch weights
/// are probabilities: components are measured incoherently, so amplitudes
/// never enter.
inline TransitionKernel shift_superposition_kernel(
    const std::vector<std::pair<int, double>>& shifts, LRange input_range) {
  if (shifts.empty())
    throw std::domain_error("shift_superposition_kernel: no shifts");
  double wsum = 0.0;
  int min_shift = shifts.front().first, max_shift = shifts.front().first;
  for (std::size_t i = 0; i < shifts.size(); ++i) {
    auto [s, w] = shifts[i];
    if (w < 0.0)
      throw std::domain_error("shift_superposition_kernel: negative weight");
    for (std::size_t j = 0; j < i; ++j)
      if (shifts[j].first == s)
        throw std::domain_error("shift_superposition_kernel: duplicate shift");
    wsum += w;
    min_shift = std::min(min_shift, s);
    max_shift = std::max(max_shift, s);
  }
  if (std::abs(wsum - 1.0) > 1e-12)
    throw std::domain_error("shift_superposition_kernel: weights must sum to 1");

  LRange output(input_range.lo + min_shift, input_range.hi + max_shift);
  std::vector<double> entries(
      static_cast<std::size_t>(input_range.size()) * output.size(), 0.0);
  for (int i = 0; i < input_range.size(); ++i) {
    int ell = input_range.lo + i;
    for (auto [s, w] : shifts)
      entries[static_cast<std::size_t>(i) * output.size() +
              output.index_of(ell + s)] += w;
  }
  return TransitionKernel(input_range, output, std::move(entries));
}

inline TransitionKernel identity_kernel(LRange range) {
  return shift_superposition_kernel({{0, 1.0}}, range);
}

/// Feedback kernel: shift toward zero for ell != 0; the ell = 0 row keeps
/// both branches with weight 1/2 each.
inline TransitionKernel demon_kernel(int shift, LRange input_range) {
  if (shift < 1) throw std::domain_error("demon_kernel: shift must be >= 1");
  // Output range is exactly the reachable set's hull.
  int out_lo = INT_MAX, out_hi = INT_MIN;
  for (int ell = input_range.lo; ell <= input_range.hi; ++ell) {
    int target = ell == 0 ? shift : (ell < 0 ? ell + shift : ell - shift);
    int target2 = ell == 0 ? -shift : target;
    out_lo = std::min({out_lo, target, target2});
    out_hi = std::max({out_hi, target, target2});
  }
  LRange out(out_lo, out_hi);
  std::vector<double> entries(
      static_cast<std::size_t>(input_range.size()) * out.size(), 0.0);
  for (int i = 0; i < input_range.size(); ++i) {
    int ell = input_range.lo + i;
    auto put = [&](int ell_out, double w) {
      entries[static_cast<std::size_t>(i) * out.size() +
              out.index_of(ell_out)] += w;
    };
    if (ell == 0) {
      put(shift, 0.5);
      put(-shift, 0.5);
    } else if (ell < 0) {
      put(ell + shift, 1.0);
    } else {
      put(ell - shift, 1.0);
    }
  }
  return TransitionKernel(input_range, out, std::move(entries));
}

inline TransitionKernel make_kernel(const ProcessSpec& spec, LRange input_range) {
  switch (spec.kind) {
    case ProcessKind::shift_superposition:
      return shift_superposition_kernel(spec.shifts, input_range);
    case ProcessKind::demon:
      return demon_kernel(spec.demon_shift, input_range);
    case ProcessKind::identity:
      return identity_kernel(input_range);
    case ProcessKind::custom:
      throw std::invalid_argument("make_kernel: custom kernels are built directly");
  }
  throw std::invalid_argument("make_kernel: unknown kind");
}

/// Column sums per output ell. All columns equal to 1 on an untruncated
/// kernel certify double stochasticity.
inline std::map<int, double> column_sums(const TransitionKernel& kernel) {
  std::map<int, double> sums;
  LRange in = kernel.input_range(), out = kernel.output_range();
  for (int ell_out = out.lo; ell_out <= out.hi; ++ell_out) {
    double s = 0.0;
    for (int ell_in = in.lo; ell_in <= in.hi; ++ell_in)
      s += kernel.prob(ell_in, ell_out);
    sums[ell_out] = s;
  }
  return sums;
}

enum class PerturbMode { uniform, jitter };

/// Noisy variant of a kernel. uniform: convex mix with the uniform row.
/// jitter: adds seeded nonnegative noise proportional to `leakage` and
/// renormalizes each row.
inline TransitionKernel perturb_kernel(const TransitionKernel& kernel,
                                       double leakage, std::uint64_t seed,
                                       PerturbMode mode) {
  if (leakage < 0.0 || leakage > 1.0)
    throw std::domain_error("perturb_kernel: leakage must be in [0,1]");
  if (leakage == 0.0) return kernel;

  LRange in = kernel.input_range(), out = kernel.output_range();
  const int cols = out.size();
  std::vector<double> entries;
  entries.reserve(static_cast<std::size_t>(in.size()) * cols);
  Rng rng(derive_seed(seed, 0x6b65726eull));
  for (int i = 0; i < in.size(); ++i) {
    int ell = in.lo + i;
    std::vector<double> row(cols);
    for (int j = 0; j < cols; ++j) row[j] = kernel.prob(ell, out.lo + j);
    if (mode == PerturbMode::uniform) {
      for (double& v : row) v = (1.0 - leakage) * v + leakage / cols;
    } else {
      double sum = 0.0;
      for (double& v : row) {
        v += leakage * rng.uniform();
        sum += v;
      }
      for (double& v : row) v /= sum;
    }
    entries.insert(entries.end(), row.begin(), row.end());
  }
  return TransitionKernel(in, out, std::move(entries));
}

}  // namespace oamtherm
