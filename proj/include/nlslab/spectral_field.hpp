#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "nlslab/errors.hpp"
#include "nlslab/fft.hpp"

namespace nlslab {

using cdouble = std::complex<double>;

// Dealiasing rule applied when a product window must be truncated.
enum class Dealias { none, two_thirds };

// Product windows grow exactly until they would exceed hard_cap; past that the
// window is clamped and the rule is applied. Both knobs surface in configs so
// a run can certify truncation-insensitivity by doubling them.
struct TruncationPolicy {
  int hard_cap = 4096;
  Dealias rule = Dealias::two_thirds;
};

// A 2*pi-periodic function represented by its Fourier coefficients a_n,
// u(x) = sum_{|n| <= nmax} a_n exp(i n x), stored densely over [-nmax, nmax].
// Coefficients outside the window read as zero; writes grow the window.
class SpectralField {
 public:
  SpectralField() : nmax_(0), a_(1, cdouble(0.0, 0.0)) {}

  explicit SpectralField(int nmax) : nmax_(nmax), a_(2 * static_cast<size_t>(nmax) + 1) {
    if (nmax < 0) throw InvalidArgument("SpectralField: nmax must be >= 0");
  }

  static SpectralField single_mode(int n, cdouble amp) {
    SpectralField f(std::abs(n));
    f.set(n, amp);
    return f;
  }

  int nmax() const { return nmax_; }

  cdouble coeff(int n) const {
    if (std::abs(n) > nmax_) return {0.0, 0.0};
    return a_[static_cast<size_t>(n + nmax_)];
  }

  void set(int n, cdouble amp) {
    grow(std::abs(n));
    a_[static_cast<size_t>(n + nmax_)] = amp;
  }

  void add(int n, cdouble amp) {
    grow(std::abs(n));
    a_[static_cast<size_t>(n + nmax_)] += amp;
  }

  // Widen the window to at least new_nmax (no-op if already wide enough).
  void grow(int new_nmax) {
    if (new_nmax <= nmax_) return;
    std::vector<cdouble> b(2 * static_cast<size_t>(new_nmax) + 1);
    for (int n = -nmax_; n <= nmax_; ++n)
      b[static_cast<size_t>(n + new_nmax)] = a_[static_cast<size_t>(n + nmax_)];
    a_ = std::move(b);
    nmax_ = new_nmax;
  }

  // Drop every coefficient with |n| > new_nmax. Explicit, never implicit.
  void truncate(int new_nmax) {
    if (new_nmax < 0) throw InvalidArgument("truncate: nmax must be >= 0");
    if (new_nmax >= nmax_) return;
    std::vector<cdouble> b(2 * static_cast<size_t>(new_nmax) + 1);
    for (int n = -new_nmax; n <= new_nmax; ++n)
      b[static_cast<size_t>(n + new_nmax)] = a_[static_cast<size_t>(n + nmax_)];
    a_ = std::move(b);
    nmax_ = new_nmax;
  }

  // Largest |n| carrying a nonzero coefficient (0 for the zero field).
  int support_nmax() const {
    for (int n = nmax_; n > 0; --n)
      if (coeff(n) != cdouble(0.0, 0.0) || coeff(-n) != cdouble(0.0, 0.0)) return n;
    return 0;
  }

  SpectralField& operator+=(const SpectralField& g) {
    grow(g.nmax());
    for (int n = -g.nmax(); n <= g.nmax(); ++n) add(n, g.coeff(n));
    return *this;
  }

  SpectralField& operator-=(const SpectralField& g) {
    grow(g.nmax());
    for (int n = -g.nmax(); n <= g.nmax(); ++n) add(n, -g.coeff(n));
    return *this;
  }

  SpectralField& operator*=(cdouble c) {
    for (auto& v : a_) v *= c;
    return *this;
  }

  friend SpectralField operator+(SpectralField f, const SpectralField& g) { return f += g; }
  friend SpectralField operator-(SpectralField f, const SpectralField& g) { return f -= g; }
  friend SpectralField operator*(SpectralField f, cdouble c) { return f *= c; }
  friend SpectralField operator*(cdouble c, SpectralField f) { return f *= c; }

  bool finite() const {
    for (const auto& v : a_)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
  }

  // Pointwise evaluation, u(x) = sum a_n exp(i n x). Handy for oracles; the
  // solver path always goes through the grid transforms below.
  cdouble at(double x) const {
    cdouble u(0.0, 0.0);
    for (int n = -nmax_; n <= nmax_; ++n)
      u += coeff(n) * std::exp(cdouble(0.0, n * x));
    return u;
  }

 private:
  int nmax_;
  std::vector<cdouble> a_;  // index n + nmax_
};

inline SpectralField conj(const SpectralField& f) {
  SpectralField g(f.nmax());
  for (int n = -f.nmax(); n <= f.nmax(); ++n) g.set(n, std::conj(f.coeff(-n)));
  return g;
}

// Exact convolution (coefficients of f*g as functions). The result window is
// nmax(f)+nmax(g); if that exceeds policy.hard_cap the window is clamped and
// the policy rule applied.
inline SpectralField product(const SpectralField& f, const SpectralField& g,
                             const TruncationPolicy& policy = {}) {
  const int full = f.nmax() + g.nmax();
  SpectralField h(full);
  for (int n = -f.nmax(); n <= f.nmax(); ++n) {
    const cdouble fn = f.coeff(n);
    if (fn == cdouble(0.0, 0.0)) continue;
    for (int k = -g.nmax(); k <= g.nmax(); ++k) h.add(n + k, fn * g.coeff(k));
  }
  if (full > policy.hard_cap) {
    h.truncate(policy.hard_cap);
    if (policy.rule == Dealias::two_thirds) {
      const int keep = (2 * policy.hard_cap) / 3;
      for (int n = keep + 1; n <= h.nmax(); ++n) {
        h.set(n, {0.0, 0.0});
        h.set(-n, {0.0, 0.0});
      }
    }
  }
  return h;
}

// |u|^(p-1) u for odd p = 2m+1, computed in coefficient space.
inline SpectralField power_nonlinearity(const SpectralField& f, int p,
                                        const TruncationPolicy& policy = {}) {
  if (p < 3 || p % 2 == 0) throw InvalidArgument("power_nonlinearity: p must be odd and >= 3");
  const SpectralField fc = conj(f);
  SpectralField mod2 = product(f, fc, policy);  // |u|^2
  SpectralField out = f;
  for (int i = 0; i < (p - 1) / 2; ++i) out = product(out, mod2, policy);
  return out;
}

// ---- grid transforms ------------------------------------------------------

// Samples u on the uniform grid x_j = 2*pi*j/gridsize. Requires
// gridsize > 2*nmax so every mode has its own bin.
inline std::vector<cdouble> to_physical(const SpectralField& f, int gridsize, Fft& fft) {
  if (fft.size() != gridsize) throw InvalidArgument("to_physical: Fft size mismatch");
  if (gridsize <= 2 * f.nmax())
    throw AliasError("to_physical: gridsize " + std::to_string(gridsize) +
                     " cannot hold modes up to " + std::to_string(f.nmax()));
  std::vector<cdouble> bins(static_cast<size_t>(gridsize), cdouble(0.0, 0.0));
  for (int n = -f.nmax(); n <= f.nmax(); ++n)
    bins[static_cast<size_t>((n + gridsize) % gridsize)] = f.coeff(n);
  return fft.synth(bins);
}

inline std::vector<cdouble> to_physical(const SpectralField& f, int gridsize) {
  Fft fft(gridsize);
  return to_physical(f, gridsize, fft);
}

// Recovers coefficients for |n| <= nmax from grid samples; exact when the
// samples come from a field band-limited within the grid.
inline SpectralField from_physical(const std::vector<cdouble>& grid, int nmax, Fft& fft) {
  const int gridsize = static_cast<int>(grid.size());
  if (fft.size() != gridsize) throw InvalidArgument("from_physical: Fft size mismatch");
  if (gridsize <= 2 * nmax)
    throw AliasError("from_physical: gridsize " + std::to_string(gridsize) +
                     " cannot resolve modes up to " + std::to_string(nmax));
  std::vector<cdouble> bins = fft.analyze(grid);
  SpectralField f(nmax);
  for (int n = -nmax; n <= nmax; ++n)
    f.set(n, bins[static_cast<size_t>((n + gridsize) % gridsize)]);
  return f;
}

inline SpectralField from_physical(const std::vector<cdouble>& grid, int nmax) {
  Fft fft(static_cast<int>(grid.size()));
  return from_physical(grid, nmax, fft);
}

}  // namespace nlslab
