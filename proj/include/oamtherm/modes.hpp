#pragma once

// Mode indices and energies of the 2-D isotropic harmonic oscillator,
// restricted to the zero-radial-number subspace where the azimuthal index
// alone determines the energy.

#include <cstdlib>
#include <stdexcept>

namespace oamtherm {

struct ModeIndex {
  int ell = 0;  // azimuthal quantum number, may be negative
  int p = 0;    // radial quantum number, 0 for everything this library builds

  constexpr ModeIndex() = default;
  constexpr explicit ModeIndex(int ell_, int p_ = 0) : ell(ell_), p(p_) {
    if (p_ < 0) throw std::invalid_argument("ModeIndex: p must be >= 0");
  }

  friend constexpr bool operator==(ModeIndex a, ModeIndex b) {
    return a.ell == b.ell && a.p == b.p;
  }
};

/// Energy in units of hbar*omega: |ell| + 2p + 1.
constexpr double energy(ModeIndex mode) {
  int a = mode.ell < 0 ? -mode.ell : mode.ell;
  return static_cast<double>(a + 2 * mode.p + 1);
}

/// Inclusive integer interval of azimuthal indices.
struct LRange {
  int lo = 0;
  int hi = 0;

  constexpr LRange() = default;
  constexpr LRange(int lo_, int hi_) : lo(lo_), hi(hi_) {
    if (lo_ > hi_) throw std::invalid_argument("LRange: lo > hi");
  }

  constexpr int size() const { return hi - lo + 1; }
  constexpr bool contains(int ell) const { return ell >= lo && ell <= hi; }
  constexpr bool contains(LRange other) const {
    return lo <= other.lo && other.hi <= hi;
  }
  /// Zero-based offset of ell within the range.
  constexpr int index_of(int ell) const { return ell - lo; }

  friend constexpr bool operator==(LRange a, LRange b) {
    return a.lo == b.lo && a.hi == b.hi;
  }
};

}  // namespace oamtherm
