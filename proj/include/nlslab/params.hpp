#pragma once

#include <cmath>
#include <complex>

#include "nlslab/errors.hpp"
#include "nlslab/spectral_field.hpp"

namespace nlslab {

// Equation parameters for -i u_t + u_xx = omega |u|^(p-1) u on the torus.
// omega = +1 defocusing, -1 focusing; p odd, p = 2m+1.
struct NlsParams {
  int p = 3;
  int omega = +1;

  NlsParams() = default;
  NlsParams(int p_, int omega_) : p(p_), omega(omega_) {
    if (p < 3 || p % 2 == 0) throw InvalidArgument("NlsParams: p must be odd and >= 3");
    if (omega != 1 && omega != -1) throw InvalidArgument("NlsParams: omega must be +1 or -1");
  }

  int m() const { return (p - 1) / 2; }
};

// Amplitudes of the two seeded modes (frequency 0 and 1) plus the declared
// smallness bound sigma. The closed-form machinery is only trusted for small
// sigma, so construction enforces sigma <= cap (0.25 unless a caller opts out).
struct TwoModeData {
  cdouble alpha;
  cdouble beta;
  double sigma;

  TwoModeData(cdouble alpha_, cdouble beta_, double sigma_, double sigma_cap = 0.25)
      : alpha(alpha_), beta(beta_), sigma(sigma_) {
    if (!(sigma >= 0.0) || !std::isfinite(sigma))
      throw InvalidArgument("TwoModeData: sigma must be a finite nonnegative real");
    if (sigma > sigma_cap)
      throw InvalidArgument("TwoModeData: sigma exceeds the smallness cap");
    const double tol = 1e-12;
    if (std::abs(alpha) > sigma + tol || std::abs(beta) > sigma + tol)
      throw InvalidArgument("TwoModeData: |alpha|, |beta| must not exceed sigma");
  }

  SpectralField initial_field() const {
    SpectralField f(1);
    f.set(0, alpha);
    f.set(1, beta);
    return f;
  }
};

// The frequency/amplitude/time scaling that turns a unit-scale solution into
// one concentrated at frequency N: amplitudes gain N^(1/m), frequencies gain
// a factor N, and time contracts by N^2.
struct ScalingMap {
  int N = 1;
  int m = 1;

  ScalingMap() = default;
  ScalingMap(int N_, int m_) : N(N_), m(m_) {
    if (N < 1) throw InvalidArgument("ScalingMap: N must be >= 1");
    if (m < 1) throw InvalidArgument("ScalingMap: m must be >= 1");
  }

  double amplitude_factor() const { return std::pow(static_cast<double>(N), 1.0 / m); }
  double time_factor() const { return static_cast<double>(N) * N; }
};

// Frequency k -> N k with the amplitude lift; pure relabeling plus scaling.
inline SpectralField rescale_field(const SpectralField& f, const ScalingMap& sm) {
  SpectralField g(f.nmax() * sm.N);
  const double amp = sm.amplitude_factor();
  for (int n = -f.nmax(); n <= f.nmax(); ++n) g.set(n * sm.N, amp * f.coeff(n));
  return g;
}

}  // namespace nlslab
