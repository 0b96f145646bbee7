#pragma once

#include <cmath>
#include <vector>

#include "nlslab/closed_form.hpp"
#include "nlslab/errors.hpp"
#include "nlslab/fft.hpp"
#include "nlslab/params.hpp"
#include "nlslab/spectral_field.hpp"
#include "nlslab/trajectory.hpp"

namespace nlslab {

// truncated: nonlinear sums run only over input frequencies {0, 1}; the
//            system is the closed set of modes -m .. m+1 driven by a_0, a_1.
// full:      Galerkin truncation of the full coefficient system to |k| <= window.
enum class ModeWindow { truncated, full };

// First-order system d/dt a_k = i k^2 a_k + i omega (|u|^(p-1) u)_k restricted
// per the window rule. In truncated mode the passive modes keep the full
// linear coefficient i k^2 a_k (a plain i a_k shows up in some derivations of
// the truncated system; the quadratic phase is the consistent choice and is
// what this implements).
struct ModeSystem {
  NlsParams params;
  ModeWindow window = ModeWindow::truncated;
  SpectralField state;
  TruncationPolicy policy{4096, Dealias::none};

  ModeSystem(const NlsParams& params_, ModeWindow window_, const SpectralField& state_,
             TruncationPolicy policy_ = {4096, Dealias::none})
      : params(params_), window(window_), state(state_), policy(policy_) {
    const int m = params.m();
    if (window == ModeWindow::truncated) {
      for (int k = -state.nmax(); k <= state.nmax(); ++k)
        if ((k < -m || k > m + 1) && state.coeff(k) != cdouble(0.0, 0.0))
          throw InvalidArgument("ModeSystem: truncated window holds modes -m .. m+1 only");
      state.grow(m + 1);
    }
    if (state.nmax() < 1) state.grow(1);
  }

  int window_nmax() const {
    return window == ModeWindow::truncated ? params.m() + 1 : state.nmax();
  }
};

namespace detail {

// Evaluates the restricted nonlinear sum for every active k from the
// precomputed expansion terms.
inline void truncated_nonlinearity(const std::vector<TwoModeTerm>& terms, int m, cdouble a0,
                                   cdouble a1, std::vector<cdouble>& out) {
  // out indexed by k + m over k = -m .. m+1
  std::fill(out.begin(), out.end(), cdouble(0.0, 0.0));
  const cdouble a0c = std::conj(a0), a1c = std::conj(a1);
  for (const auto& term : terms) {
    out[static_cast<size_t>(term.k + m)] += static_cast<double>(term.coeff) *
                                            ipow(a0, term.pa) * ipow(a1, term.pb) *
                                            ipow(a0c, term.pac) * ipow(a1c, term.pbc);
  }
}

inline int padded_gridsize(int window_nmax, int p) {
  int need = (p + 1) * window_nmax + 1;  // room for degree p*W products plus the kept band
  int g = 8;
  while (g < need) g *= 2;
  return g;
}

}  // namespace detail

// Right-hand side of the mode system at its current state.
inline SpectralField fnls_rhs(const ModeSystem& sys) {
  const int m = sys.params.m();
  const cdouble iw(0.0, static_cast<double>(sys.params.omega));
  SpectralField rhs(sys.window_nmax());

  if (sys.window == ModeWindow::truncated) {
    const auto terms = two_mode_expansion(m);
    std::vector<cdouble> nl(static_cast<size_t>(2 * m + 2));
    detail::truncated_nonlinearity(terms, m, sys.state.coeff(0), sys.state.coeff(1), nl);
    for (int k = -m; k <= m + 1; ++k)
      rhs.set(k, cdouble(0.0, static_cast<double>(k) * k) * sys.state.coeff(k) +
                     iw * nl[static_cast<size_t>(k + m)]);
    return rhs;
  }

  const int W = sys.window_nmax();
  Fft fft(detail::padded_gridsize(W, sys.params.p));
  auto grid = to_physical(sys.state, fft.size(), fft);
  for (auto& u : grid) u = ipow(std::abs(u), sys.params.p - 1) * u;
  SpectralField nl = from_physical(grid, W, fft);  // exact projection: grid is padded
  if (sys.policy.rule == Dealias::two_thirds) {
    const int keep = (2 * W) / 3;
    for (int k = keep + 1; k <= W; ++k) {
      nl.set(k, {0.0, 0.0});
      nl.set(-k, {0.0, 0.0});
    }
  }
  for (int k = -W; k <= W; ++k)
    rhs.set(k, cdouble(0.0, static_cast<double>(k) * k) * sys.state.coeff(k) + iw * nl.coeff(k));
  return rhs;
}

// Classical fixed-step RK4. dt is shortened slightly so an integer number of
// steps lands exactly on t_final; about `samples` states are recorded,
// including both endpoints.
inline Trajectory integrate_modes(const ModeSystem& sys, double t_final, double dt,
                                  int samples = 65) {
  if (!(t_final >= 0.0) || !std::isfinite(t_final))
    throw InvalidArgument("integrate_modes: t_final must be finite and >= 0");
  if (!(dt > 0.0)) throw InvalidArgument("integrate_modes: dt must be > 0");
  if (samples < 2) samples = 2;

  const int m = sys.params.m();
  const int W = sys.window_nmax();
  const long long nsteps = std::max<long long>(1, static_cast<long long>(std::ceil(t_final / dt)));
  const double h = t_final / static_cast<double>(nsteps);
  const long long stride = std::max<long long>(1, nsteps / (samples - 1));

  // State flattened over k = -W .. W.
  std::vector<cdouble> y(static_cast<size_t>(2 * W + 1));
  for (int k = -W; k <= W; ++k) y[static_cast<size_t>(k + W)] = sys.state.coeff(k);

  const auto terms = two_mode_expansion(m);
  std::vector<cdouble> nl(static_cast<size_t>(2 * m + 2));
  Fft fft(detail::padded_gridsize(W, sys.params.p));
  const cdouble iw(0.0, static_cast<double>(sys.params.omega));

  auto deriv = [&](const std::vector<cdouble>& yy, std::vector<cdouble>& dy) {
    if (sys.window == ModeWindow::truncated) {
      detail::truncated_nonlinearity(terms, m, yy[static_cast<size_t>(W)],
                                     yy[static_cast<size_t>(W + 1)], nl);
      for (int k = -W; k <= W; ++k) {
        cdouble g = (k >= -m && k <= m + 1) ? nl[static_cast<size_t>(k + m)] : cdouble(0.0, 0.0);
        dy[static_cast<size_t>(k + W)] =
            cdouble(0.0, static_cast<double>(k) * k) * yy[static_cast<size_t>(k + W)] + iw * g;
      }
      return;
    }
    SpectralField f(W);
    for (int k = -W; k <= W; ++k) f.set(k, yy[static_cast<size_t>(k + W)]);
    auto grid = to_physical(f, fft.size(), fft);
    for (auto& u : grid) u = ipow(std::abs(u), sys.params.p - 1) * u;
    SpectralField g = from_physical(grid, W, fft);
    if (sys.policy.rule == Dealias::two_thirds) {
      const int keep = (2 * W) / 3;
      for (int k = keep + 1; k <= W; ++k) {
        g.set(k, {0.0, 0.0});
        g.set(-k, {0.0, 0.0});
      }
    }
    for (int k = -W; k <= W; ++k)
      dy[static_cast<size_t>(k + W)] =
          cdouble(0.0, static_cast<double>(k) * k) * yy[static_cast<size_t>(k + W)] +
          iw * g.coeff(k);
  };

  const size_t dim = y.size();
  std::vector<cdouble> k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);
  auto record = [&](double t, Trajectory& traj) {
    SpectralField f(W);
    for (int k = -W; k <= W; ++k) f.set(k, y[static_cast<size_t>(k + W)]);
    if (!f.finite()) throw BlowupError(t);
    traj.push_back({t, f});
  };

  Trajectory traj;
  record(0.0, traj);
  for (long long step = 0; step < nsteps; ++step) {
    deriv(y, k1);
    for (size_t i = 0; i < dim; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    deriv(tmp, k2);
    for (size_t i = 0; i < dim; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    deriv(tmp, k3);
    for (size_t i = 0; i < dim; ++i) tmp[i] = y[i] + h * k3[i];
    deriv(tmp, k4);
    for (size_t i = 0; i < dim; ++i)
      y[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    const bool last = (step + 1 == nsteps);
    if (last || (step + 1) % stride == 0) record((step + 1) * h, traj);
  }
  return traj;
}

}  // namespace nlslab
