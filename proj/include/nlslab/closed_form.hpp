#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include "nlslab/errors.hpp"
#include "nlslab/params.hpp"
#include "nlslab/spectral_field.hpp"

namespace nlslab {

inline long long binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

inline double ipow(double x, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

inline cdouble ipow(cdouble x, int e) {
  cdouble r(1.0, 0.0);
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

// Nonlinear phase rate of the mode carrying amplitude a when paired with a
// mode carrying b:  Phi(a, b) = sum_j C(m+1, j) C(m, j) a^(2m-2j) b^(2j).
// For m = 1 this is a^2 + 2 b^2; for m = 2, a^4 + 6 a^2 b^2 + 3 b^4.
inline double two_mode_phase(const NlsParams& params, double a, double b) {
  const int m = params.m();
  double phi = 0.0;
  for (int j = 0; j <= m; ++j)
    phi += static_cast<double>(binom(m + 1, j) * binom(m, j)) * ipow(a, 2 * (m - j)) * ipow(b, 2 * j);
  return phi;
}

// Exact single-mode solution: alpha exp(i (N^2 + omega |alpha|^(p-1)) t) at
// frequency N. This pins the sign conventions for everything else.
inline SpectralField plane_wave(const NlsParams& params, cdouble alpha, int N, double t) {
  const double rate = static_cast<double>(N) * N + params.omega * ipow(std::abs(alpha), params.p - 1);
  return SpectralField::single_mode(N, alpha * std::exp(cdouble(0.0, rate * t)));
}

// Two-mode approximate solution: mode 0 rotates at omega Phi(|alpha|, |beta|),
// mode 1 at omega Phi(|beta|, |alpha|) plus its linear phase e^(it).
inline SpectralField approx_two_mode(const NlsParams& params, const TwoModeData& data, double t) {
  const double aa = std::abs(data.alpha), bb = std::abs(data.beta);
  const double phi0 = params.omega * two_mode_phase(params, aa, bb);
  const double phi1 = params.omega * two_mode_phase(params, bb, aa) + 1.0;
  SpectralField f(1);
  f.set(0, data.alpha * std::exp(cdouble(0.0, phi0 * t)));
  f.set(1, data.beta * std::exp(cdouble(0.0, phi1 * t)));
  return f;
}

// ---- mechanical expansion of the two-mode nonlinearity ---------------------
//
// With u = a + b e^(ix), |u|^(2m) u = (a + b e^(ix))^(m+1) (conj a + conj b e^(-ix))^m
// expands into monomials indexed by (r, s): r unconjugated b-factors, s
// conjugated ones, landing at frequency k = r - s with an integer weight
// C(m+1, r) C(m, s). Everything downstream (truncated ODE right-hand side,
// error-mode tables, correction denominators) evaluates these terms rather
// than hand-copied polynomials.

struct TwoModeTerm {
  int k;            // output frequency r - s
  long long coeff;  // C(m+1, r) * C(m, s)
  int pa, pb;       // powers of a and b
  int pac, pbc;     // powers of conj(a) and conj(b)
};

inline std::vector<TwoModeTerm> two_mode_expansion(int m) {
  if (m < 1) throw InvalidArgument("two_mode_expansion: m must be >= 1");
  std::vector<TwoModeTerm> terms;
  for (int r = 0; r <= m + 1; ++r)
    for (int s = 0; s <= m; ++s)
      terms.push_back({r - s, binom(m + 1, r) * binom(m, s), m + 1 - r, r, m - s, s});
  return terms;
}

// Frequency-k coefficient of |u|^(2m) u at t = 0 for u = alpha + beta e^(ix).
inline cdouble two_mode_coefficient(int m, cdouble alpha, cdouble beta, int k) {
  cdouble c(0.0, 0.0);
  for (const auto& term : two_mode_expansion(m)) {
    if (term.k != k) continue;
    c += static_cast<double>(term.coeff) * ipow(alpha, term.pa) * ipow(beta, term.pb) *
         ipow(std::conj(alpha), term.pac) * ipow(std::conj(beta), term.pbc);
  }
  return c;
}

// One frequency component of the nonlinearity along the two-mode ansatz:
// coefficient c_k and phase rate lambda_k in  c_k exp(i omega lambda_k t) exp(i k (x+t)).
// Inserting the ansatz phases into a monomial at frequency k leaves
// lambda_k = (1-k) Phi(|alpha|, |beta|) + k Phi(|beta|, |alpha|), independent
// of which (r, s) produced it.
struct ErrorMode {
  int k;
  cdouble c;
  double lambda;
};

inline std::vector<ErrorMode> two_mode_nonlinearity_modes(const NlsParams& params,
                                                          const TwoModeData& data) {
  const int m = params.m();
  const double aa = std::abs(data.alpha), bb = std::abs(data.beta);
  const double phi_a = two_mode_phase(params, aa, bb);
  const double phi_b = two_mode_phase(params, bb, aa);
  std::vector<ErrorMode> modes;
  for (int k = -m; k <= m + 1; ++k) {
    const cdouble c = two_mode_coefficient(m, data.alpha, data.beta, k);
    modes.push_back({k, c, (1.0 - k) * phi_a + k * phi_b});
  }
  return modes;
}

// The part the two-mode ansatz fails to capture: every frequency outside
// {0, 1}. Each is non-resonant (k != k^2) so it forces only a bounded,
// oscillatory response.
inline std::vector<ErrorMode> two_mode_error_modes(const NlsParams& params,
                                                   const TwoModeData& data) {
  std::vector<ErrorMode> out;
  for (const auto& mode : two_mode_nonlinearity_modes(params, data))
    if (mode.k != 0 && mode.k != 1) out.push_back(mode);
  return out;
}

// p = 5 error structure: four modes at k = -2, -1, 2, 3 with quintic
// coefficients and quartic phase rates.
inline std::vector<ErrorMode> quintic_error_modes(const TwoModeData& data, int omega) {
  return two_mode_error_modes(NlsParams(5, omega), data);
}

// ---- explicit first-order correction (cubic case) --------------------------
//
// Solves (-i d/dt + dxx) v = omega E with v(0) = 0 for the two cubic error
// modes; component k evolves as amp * (exp(i rate t) - 1) * exp(i k^2 t) with
//   amp_{-1} = omega alpha^2 conj(beta) / (-2 + 3 omega |beta|^2),  rate_{-1} = 3 omega |beta|^2 - 2,
//   amp_{+2} = omega beta^2 conj(alpha) / (-2 + 3 omega |alpha|^2), rate_{+2} = 3 omega |alpha|^2 - 2.

struct CorrectionMode {
  int k;
  cdouble amp;
  double rate;
};

struct CubicCorrection {
  std::array<CorrectionMode, 2> modes;

  SpectralField at(double t) const {
    SpectralField v(2);
    for (const auto& mode : modes) {
      const cdouble osc = std::exp(cdouble(0.0, mode.rate * t)) - 1.0;
      const cdouble lin = std::exp(cdouble(0.0, static_cast<double>(mode.k) * mode.k * t));
      v.set(mode.k, mode.amp * osc * lin);
    }
    return v;
  }
};

inline CubicCorrection cubic_correction(const TwoModeData& data, int omega,
                                        double resonance_floor = 1e-6) {
  const double na = std::norm(data.alpha), nb = std::norm(data.beta);
  const double den1 = -2.0 + 3.0 * omega * nb;
  const double den2 = -2.0 + 3.0 * omega * na;
  if (std::abs(den1) < resonance_floor || std::abs(den2) < resonance_floor)
    throw NearResonanceError("cubic_correction: denominator within " +
                             std::to_string(resonance_floor) + " of zero");
  const cdouble w(static_cast<double>(omega), 0.0);
  CorrectionMode m1{-1, w * data.alpha * data.alpha * std::conj(data.beta) / den1,
                    3.0 * omega * nb - 2.0};
  CorrectionMode m2{+2, w * data.beta * data.beta * std::conj(data.alpha) / den2,
                    3.0 * omega * na - 2.0};
  return CubicCorrection{{m1, m2}};
}

}  // namespace nlslab
