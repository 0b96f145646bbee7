#pragma once

#include <cmath>

#include "nlslab/errors.hpp"
#include "nlslab/kahan.hpp"
#include "nlslab/spectral_field.hpp"

namespace nlslab {

// Regularity index for the weighted norms below. Negative values are the
// interesting regime here; |s| is capped to keep the weights representable.
struct SobolevIndex {
  double s = 0.0;

  SobolevIndex() = default;
  explicit SobolevIndex(double s_) : s(s_) {
    if (!std::isfinite(s) || std::abs(s) > 16.0)
      throw InvalidArgument("SobolevIndex: s must be finite with |s| <= 16");
  }
};

// ||f|| = ( sum_n (1+|n|)^(2s) |a_n|^2 )^(1/2), with compensated summation.
// Note the weight is (1+|n|), not (1+n^2)^(1/2); tests pin this choice.
inline double sobolev_norm(const SpectralField& f, SobolevIndex s) {
  KahanSum sum;
  for (int n = -f.nmax(); n <= f.nmax(); ++n) {
    const double w = std::pow(1.0 + std::abs(n), 2.0 * s.s);
    sum.add(w * std::norm(f.coeff(n)));
  }
  return std::sqrt(sum.value());
}

inline double l2_norm(const SpectralField& f) { return sobolev_norm(f, SobolevIndex(0.0)); }
inline double h1_norm(const SpectralField& f) { return sobolev_norm(f, SobolevIndex(1.0)); }

// Root mean square of grid samples; equals l2_norm of the underlying field
// when the field is band-limited within the grid (Parseval).
inline double grid_rms(const std::vector<cdouble>& grid) {
  KahanSum sum;
  for (const auto& u : grid) sum.add(std::norm(u));
  return std::sqrt(sum.value() / static_cast<double>(grid.size()));
}

}  // namespace nlslab
