#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "nlslab/closed_form.hpp"
#include "nlslab/errors.hpp"
#include "nlslab/params.hpp"
#include "nlslab/sobolev.hpp"
#include "nlslab/split_step.hpp"
#include "nlslab/trajectory.hpp"

namespace nlslab {

// Desk-scale resource limits. The decoherence statements are asymptotic in the
// frequency dilation N; every run computes and reports the N its literal
// hypotheses would need, so it is always explicit which conditions hold as
// stated and which hold in rescaled/unit form.
struct ExperimentCaps {
  int max_N = 1 << 16;
  int max_gridsize = 1 << 19;
  double tau_budget = 32768.0;  // longest unit-scale integration time
  double sigma_cap = 0.25;
};

namespace detail {

inline std::string format_scientific(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", x);
  return buf;
}

inline std::vector<double> linspace(double t0, double t1, int n) {
  if (n < 2) throw InvalidArgument("linspace: need at least 2 points");
  std::vector<double> t(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    t[static_cast<size_t>(i)] = t0 + (t1 - t0) * static_cast<double>(i) / (n - 1);
  t.back() = t1;
  return t;
}

}  // namespace detail

// Least-squares slope of the unwrapped phase of z(t). Sampling must be dense
// enough that successive samples advance by well under pi.
struct PhaseFit {
  double rate = 0.0;
  double residual_rms = 0.0;  // rms deviation of the unwrapped phase from the line
};

inline PhaseFit fit_phase_rate(const std::vector<double>& t, const std::vector<cdouble>& z) {
  const size_t n = t.size();
  if (n < 3 || z.size() != n) throw InvalidArgument("fit_phase_rate: need >= 3 matched samples");
  std::vector<double> theta(n);
  theta[0] = std::arg(z[0]);
  for (size_t i = 1; i < n; ++i) {
    if (std::abs(z[i]) == 0.0) throw InvalidArgument("fit_phase_rate: zero sample");
    theta[i] = theta[i - 1] + std::arg(z[i] * std::conj(z[i - 1]));
  }
  double tm = 0.0, thm = 0.0;
  for (size_t i = 0; i < n; ++i) {
    tm += t[i];
    thm += theta[i];
  }
  tm /= static_cast<double>(n);
  thm /= static_cast<double>(n);
  double stt = 0.0, sty = 0.0;
  for (size_t i = 0; i < n; ++i) {
    stt += (t[i] - tm) * (t[i] - tm);
    sty += (t[i] - tm) * (theta[i] - thm);
  }
  if (stt == 0.0) throw InvalidArgument("fit_phase_rate: degenerate time samples");
  PhaseFit fit;
  fit.rate = sty / stt;
  KahanSum res;
  for (size_t i = 0; i < n; ++i) {
    const double d = theta[i] - thm - fit.rate * (t[i] - tm);
    res.add(d * d);
  }
  fit.residual_rms = std::sqrt(res.value() / static_cast<double>(n));
  return fit;
}

// ---- approximation-bound verification ---------------------------------------

struct BoundSample {
  double t = 0.0;
  double err_plain = 0.0;      // ||U - u_ab||_{H^1}
  double err_corrected = 0.0;  // ||U - (u_ab + v)||_{H^1}; NaN when p != 3
};

struct BoundOptions {
  double horizon_factor = 0.1;  // the c in  t <= c sigma^-(p-1) log(1/sigma)
  int samples = 65;
  int gridsize = 0;   // 0: smallest admissible power of two
  double dt = 0.0;    // 0: per-p default, shrunk when the horizon is long
  bool certify_grid = false;
};

struct BoundRun {
  NlsParams params;
  double sigma = 0.0;
  cdouble alpha, beta;
  double horizon_factor = 0.0;
  double horizon = 0.0;
  SolverConfig solver;
  std::vector<BoundSample> samples;
  double max_err_plain = 0.0;
  double max_err_corrected = 0.0;
  double ratio_plain = 0.0;      // max_err_plain / sigma^p
  double ratio_corrected = 0.0;  // NaN when p != 3
  bool corrected_available = false;
  bool corrected_smaller = false;
  // Change of ratio_plain when the grid is doubled; NaN unless certified.
  double grid_doubling_change = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

inline SolverConfig bound_solver_config(const NlsParams& params, int support, double horizon,
                                        const BoundOptions& opt, const ExperimentCaps& caps) {
  SolverConfig cfg;
  int g = opt.gridsize;
  if (g == 0) {
    g = 16;
    while (g < 8 * std::max(1, support)) g *= 2;
  }
  if (g > caps.max_gridsize) throw InvalidArgument("gridsize exceeds the desk-scale cap");
  cfg.gridsize = g;
  double dt = opt.dt;
  if (dt == 0.0) {
    // The long-horizon quintic runs accumulate an O(dt^2 * t) splitting phase
    // drift on the carrier modes; keeping dt^2 * horizon small keeps that
    // drift out of the measured sigma^p-scale error.
    dt = params.p == 3 ? 1e-3 : 5e-3;
    dt = std::min(dt, std::sqrt(0.1 / std::max(horizon, 1.0)));
  }
  cfg.dt = dt;
  return cfg;
}

inline BoundRun bound_run_once(const NlsParams& params, const TwoModeData& data,
                               const BoundOptions& opt, const ExperimentCaps& caps,
                               int grid_multiplier) {
  BoundRun run;
  run.params = params;
  run.sigma = data.sigma;
  run.alpha = data.alpha;
  run.beta = data.beta;
  run.horizon_factor = opt.horizon_factor;
  run.horizon =
      opt.horizon_factor * std::pow(data.sigma, -(params.p - 1)) * std::log(1.0 / data.sigma);

  const SpectralField u0 = data.initial_field();
  run.solver = bound_solver_config(params, u0.support_nmax(), run.horizon, opt, caps);
  run.solver.gridsize *= grid_multiplier;
  const auto res = evolve(u0, params, run.solver, detail::linspace(0.0, run.horizon, opt.samples));

  run.corrected_available = params.p == 3;
  CubicCorrection corr;
  if (run.corrected_available) corr = cubic_correction(data, params.omega);

  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& s : res.traj) {
    BoundSample bs;
    bs.t = s.t;
    const SpectralField approx = approx_two_mode(params, data, s.t);
    bs.err_plain = sobolev_norm(s.field - approx, SobolevIndex(1.0));
    bs.err_corrected =
        run.corrected_available
            ? sobolev_norm(s.field - (approx + corr.at(s.t)), SobolevIndex(1.0))
            : nan;
    run.max_err_plain = std::max(run.max_err_plain, bs.err_plain);
    if (run.corrected_available)
      run.max_err_corrected = std::max(run.max_err_corrected, bs.err_corrected);
    run.samples.push_back(bs);
  }
  const double sp = ipow(data.sigma, params.p);
  run.ratio_plain = run.max_err_plain / sp;
  run.ratio_corrected = run.corrected_available ? run.max_err_corrected / sp : nan;
  run.corrected_smaller = run.corrected_available && run.max_err_corrected < run.max_err_plain;
  return run;
}

}  // namespace detail

// The amplitudes are fixed fractions of sigma so a sigma sweep scales one
// shape; the bound being probed admits any |alpha|, |beta| <= sigma.
inline TwoModeData default_two_mode(double sigma, double sigma_cap = 0.25) {
  return TwoModeData(cdouble(0.8 * sigma, 0.0), cdouble(0.6 * sigma, 0.0), sigma, sigma_cap);
}

inline BoundRun verify_approximation_bound(const NlsParams& params, const TwoModeData& data,
                                           const BoundOptions& opt = {},
                                           const ExperimentCaps& caps = {}) {
  BoundRun run = detail::bound_run_once(params, data, opt, caps, 1);
  if (opt.certify_grid) {
    const BoundRun doubled = detail::bound_run_once(params, data, opt, caps, 2);
    run.grid_doubling_change = std::abs(doubled.ratio_plain - run.ratio_plain);
  }
  return run;
}

struct BoundSweep {
  std::vector<BoundRun> runs;
  double ratio_min = 0.0;
  double ratio_max = 0.0;
  double spread = 0.0;  // ratio_max / ratio_min
  bool uniform = false;  // spread < 2
};

inline BoundSweep sweep_approximation_bound(const NlsParams& params,
                                            const std::vector<double>& sigmas,
                                            const BoundOptions& opt = {},
                                            const ExperimentCaps& caps = {}) {
  if (sigmas.empty()) throw InvalidArgument("sweep: need at least one sigma");
  BoundSweep sweep;
  const double sigma_hi = *std::max_element(sigmas.begin(), sigmas.end());
  for (double sigma : sigmas) {
    BoundOptions o = opt;
    // Doubling the grid on the cheapest (shortest-horizon) run certifies the
    // shared truncation setup for the whole sweep.
    o.certify_grid = opt.certify_grid && sigma == sigma_hi;
    sweep.runs.push_back(
        verify_approximation_bound(params, default_two_mode(sigma, caps.sigma_cap), o, caps));
  }
  sweep.ratio_min = sweep.runs.front().ratio_plain;
  sweep.ratio_max = sweep.ratio_min;
  for (const auto& r : sweep.runs) {
    if (!std::isfinite(r.ratio_plain)) return sweep;  // uniform stays false
    sweep.ratio_min = std::min(sweep.ratio_min, r.ratio_plain);
    sweep.ratio_max = std::max(sweep.ratio_max, r.ratio_plain);
  }
  sweep.spread = sweep.ratio_max / sweep.ratio_min;
  sweep.uniform = sweep.spread < 2.0;
  return sweep;
}

// ---- theorem-1 experiment: zero-mode decoherence under frequency dilation ----

struct Thm1Options {
  int N_min = 2;
  double rotation_revs = 1.1;   // run length, in full revolutions of the relative phase
  double horizon_factor = 0.1;  // the c in the Gronwall window
  double control_max_rotation = 0.25 * std::numbers::pi;
  int samples = 257;
  double dt_unit = 0.01;
  int gridsize_unit = 16;
  double rescale_tol = 1e-6;
  double rate_tol = 0.05;
  double certify_window = 1024.0;  // unit-time prefix for the doubled-grid check
};

struct Thm1Selection {
  double rho = 0.0, delta = 0.0, s = 0.0;
  int omega = +1;
  double rho_prime = 0.0;  // rho / 4
  int N = 0;
  double alpha = 0.0, beta = 0.0, sigma = 0.0;  // unit-scale two-mode amplitudes
  double dist_hs = 0.0;                         // ||data gap at t=0||_{H^s}, scale N
  double norm_plane = 0.0, norm_tilde = 0.0;    // H^s sizes of the two initial data
  double tau_rotation = 0.0;  // unit time for one full relative revolution
  double tau_run = 0.0;       // actual unit-scale horizon
  double tau_gronwall = 0.0;  // horizon_factor * sigma^-2 log(1/sigma)
  double T_run = 0.0;         // tau_run / N^2
  double T_theorem = 0.0;     // delta, the horizon in the instability statement
  // The statement's window [0, delta] sees the full rotation only for
  // enormous N; both facts are reported rather than papered over.
  bool rotation_within_theorem_window = false;
  double N_required_theorem = 0.0;
  int N_control = 0;  // smallest N whose budget-limited rotation stays below the control cap
  double control_rotation = 0.0;
};

namespace detail {

inline double thm1_beta(double delta, double s, double N) {
  return 0.25 * delta * std::pow(N, -s) / N;
}

// Relative-phase rotation reached inside the literal window
// T* = min(delta, c N^-2 sigma^-2 log(1/sigma)), as a function of N.
inline double thm1_literal_rotation(double rho_prime, double delta, double s, double c, double N) {
  const double beta = thm1_beta(delta, s, N);
  const double sigma = std::max(rho_prime / N, beta);
  const double t_gron = c * std::log(1.0 / sigma) / (sigma * sigma * N * N);
  const double t_star = std::min(delta, t_gron);
  return 2.0 * beta * beta * N * N * t_star;
}

}  // namespace detail

inline Thm1Selection choose_parameters_thm1(double rho, double delta, SobolevIndex s, int omega,
                                            const ExperimentCaps& caps = {},
                                            const Thm1Options& opt = {}) {
  if (!(rho > 0.0) || !(delta > 0.0) || delta > rho / 10.0)
    throw InvalidArgument("thm1: need 0 < delta <= rho/10");
  if (!(s.s > -0.5) || !(s.s < 0.0)) throw InvalidArgument("thm1: need -1/2 < s < 0");
  if (omega != 1 && omega != -1) throw InvalidArgument("thm1: omega must be +-1");

  Thm1Selection sel;
  sel.rho = rho;
  sel.delta = delta;
  sel.s = s.s;
  sel.omega = omega;
  sel.rho_prime = rho / 4.0;
  sel.T_theorem = delta;

  const double two_pi = 2.0 * std::numbers::pi;
  for (int N = opt.N_min; N <= caps.max_N; ++N) {
    const double alpha = sel.rho_prime / N;
    const double beta = detail::thm1_beta(delta, s.s, N);
    const double sigma = std::max(alpha, beta);
    if (sigma > caps.sigma_cap) continue;
    const double dist = 0.25 * delta * std::pow(N, -s.s) * std::pow(1.0 + N, s.s);
    if (!(dist < delta)) continue;
    if (std::hypot(sel.rho_prime, dist) > rho) continue;
    if (std::pow(N, -0.5) * delta * delta * delta > 0.01 * rho) continue;  // O(N^-1/2 d^3) << rho
    const double tau_rot = two_pi / (2.0 * beta * beta);
    if (opt.rotation_revs * tau_rot > caps.tau_budget) continue;
    if (static_cast<long long>(N) * opt.gridsize_unit > caps.max_gridsize) continue;
    sel.N = N;
    sel.alpha = alpha;
    sel.beta = beta;
    sel.sigma = sigma;
    sel.dist_hs = dist;
    sel.norm_plane = sel.rho_prime;
    sel.norm_tilde = std::hypot(sel.rho_prime, dist);
    sel.tau_rotation = tau_rot;
    sel.tau_run = std::min(opt.rotation_revs * tau_rot, caps.tau_budget);
    sel.tau_gronwall = opt.horizon_factor * std::log(1.0 / sigma) / (sigma * sigma);
    sel.T_run = sel.tau_run / (static_cast<double>(N) * N);
    break;
  }

  // Smallest (real) N whose literal window already holds the full rotation;
  // the map below is increasing in N, so bisection applies.
  auto rot = [&](double N) {
    return detail::thm1_literal_rotation(sel.rho_prime, delta, s.s, opt.horizon_factor, N);
  };
  double lo = 1.0, hi = 1.0;
  while (rot(hi) < two_pi && hi < 1e60) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (rot(mid) < two_pi ? lo : hi) = mid;
  }
  sel.N_required_theorem = hi;

  if (sel.N == 0)
    throw InvalidArgument(
        "thm1: no admissible N under the desk-scale caps; the literal window would need N ~ " +
        detail::format_scientific(sel.N_required_theorem));
  sel.rotation_within_theorem_window = sel.N >= sel.N_required_theorem;

  for (int N = opt.N_min; N <= caps.max_N; ++N) {
    const double beta = detail::thm1_beta(delta, s.s, N);
    const double theta = 2.0 * beta * beta * caps.tau_budget;
    if (theta < opt.control_max_rotation) {
      sel.N_control = N;
      sel.control_rotation = theta;
      break;
    }
  }
  if (sel.N_control == 0)
    throw InvalidArgument("thm1: no under-rotating control N under the caps");
  return sel;
}

struct GapSample {
  double t = 0.0;
  double gap = 0.0;
  double gap_predicted = 0.0;
  double mass = 0.0;
  double hamiltonian = 0.0;
};

struct Thm1Verdicts {
  bool budgets_ok = false;
  bool rescale_ok = false;
  bool sup_ok = false;
  bool rate_ok = false;
  bool control_ok = false;
  bool pass = false;
};

struct Thm1Report {
  Thm1Selection sel;
  SolverConfig unit_cfg, direct_cfg;
  std::vector<GapSample> gap;  // physical time, from the direct frequency-N run
  double sup_gap = 0.0;
  double sup_gap_predicted = 0.0;
  double rate_measured = 0.0;   // relative zero-mode phase rate, physical time
  double rate_predicted = 0.0;  // 2 omega beta^2 N^2
  double rescale_mismatch = 0.0;
  double max_unit_approx_err_h1 = 0.0;
  double grid_doubling_change = 0.0;  // zero-mode change under 2x grid, prefix window
  double control_sup_gap = 0.0;
  Thm1Verdicts verdicts;
};

inline Thm1Report run_thm1(const Thm1Selection& sel, const ExperimentCaps& caps = {},
                           const Thm1Options& opt = {}) {
  if (sel.N < 1) throw InvalidArgument("run_thm1: selection has no N");
  Thm1Report rep;
  rep.sel = sel;
  const NlsParams params(3, sel.omega);
  const ScalingMap sm(sel.N, 1);
  const TwoModeData data(cdouble(sel.alpha, 0.0), cdouble(sel.beta, 0.0), sel.sigma,
                         caps.sigma_cap);

  // Budget assertions by direct evaluation, before any evolution.
  const SpectralField tilde0 = rescale_field(data.initial_field(), sm);
  const SpectralField plane0 = SpectralField::single_mode(0, cdouble(sel.rho_prime, 0.0));
  const SobolevIndex s(sel.s);
  const double dist = sobolev_norm(tilde0 - plane0, s);
  rep.verdicts.budgets_ok = dist < sel.delta && sobolev_norm(tilde0, s) <= sel.rho &&
                            sobolev_norm(plane0, s) <= sel.rho;
  if (!rep.verdicts.budgets_ok)
    throw InvalidArgument("run_thm1: initial data violate the H^s budgets");

  rep.unit_cfg.gridsize = opt.gridsize_unit;
  rep.unit_cfg.dt = opt.dt_unit;
  const auto tau = detail::linspace(0.0, sel.tau_run, opt.samples);
  const auto unit = evolve(data.initial_field(), params, rep.unit_cfg, tau);

  rep.direct_cfg.gridsize = opt.gridsize_unit * sel.N;
  rep.direct_cfg.dt = opt.dt_unit / sm.time_factor();
  std::vector<double> t_phys;
  for (double v : tau) t_phys.push_back(v / sm.time_factor());
  const auto direct = evolve(tilde0, params, rep.direct_cfg, t_phys);

  const Trajectory lifted = rescale_up(unit.traj, sm);
  if (lifted.size() != direct.traj.size())
    throw InvalidArgument("run_thm1: checkpoint mismatch between the two runs");
  for (size_t i = 0; i < lifted.size(); ++i)
    rep.rescale_mismatch =
        std::max(rep.rescale_mismatch, l2_norm(direct.traj[i].field - lifted[i].field));

  const double rate0 = sel.omega * sel.rho_prime * sel.rho_prime;  // plane-wave phase rate
  std::vector<double> tt;
  std::vector<cdouble> zz;
  for (size_t i = 0; i < direct.traj.size(); ++i) {
    const auto& smp = direct.traj[i];
    const cdouble plane = sel.rho_prime * std::exp(cdouble(0.0, rate0 * smp.t));
    GapSample g;
    g.t = smp.t;
    g.gap = std::abs(smp.field.coeff(0) - plane);
    const double theta =
        2.0 * sel.omega * sel.beta * sel.beta * sm.time_factor() * smp.t;
    g.gap_predicted = sel.rho_prime * std::abs(std::exp(cdouble(0.0, theta)) - 1.0);
    g.mass = direct.diagnostics[i].mass;
    g.hamiltonian = direct.diagnostics[i].hamiltonian;
    rep.gap.push_back(g);
    rep.sup_gap = std::max(rep.sup_gap, g.gap);
    rep.sup_gap_predicted = std::max(rep.sup_gap_predicted, g.gap_predicted);
    tt.push_back(smp.t);
    zz.push_back(smp.field.coeff(0) * std::conj(plane));
  }

  rep.rate_predicted = 2.0 * sel.omega * sel.beta * sel.beta * sm.time_factor();
  rep.rate_measured = fit_phase_rate(tt, zz).rate;

  for (const auto& smp : unit.traj)
    rep.max_unit_approx_err_h1 =
        std::max(rep.max_unit_approx_err_h1,
                 sobolev_norm(smp.field - approx_two_mode(params, data, smp.t), SobolevIndex(1.0)));

  // Doubled-grid certification over a prefix window.
  {
    const double tau_pre = std::min(opt.certify_window, sel.tau_run);
    const auto pre = detail::linspace(0.0, tau_pre, 65);
    SolverConfig c1 = rep.unit_cfg;
    SolverConfig c2 = rep.unit_cfg;
    c2.gridsize *= 2;
    const auto r1 = evolve(data.initial_field(), params, c1, pre);
    const auto r2 = evolve(data.initial_field(), params, c2, pre);
    for (size_t i = 0; i < r1.traj.size(); ++i)
      rep.grid_doubling_change =
          std::max(rep.grid_doubling_change,
                   std::abs(r1.traj[i].field.coeff(0) - r2.traj[i].field.coeff(0)));
  }

  // Negative control, evaluated in closed form: at N_control the budget-capped
  // rotation stays under control_max_rotation, so the gap cannot open.
  rep.control_sup_gap =
      2.0 * sel.rho_prime * std::sin(0.5 * std::min(sel.control_rotation, std::numbers::pi));

  rep.verdicts.rescale_ok = rep.rescale_mismatch <= opt.rescale_tol;
  rep.verdicts.sup_ok = rep.sup_gap >= 0.25 * sel.rho;
  rep.verdicts.rate_ok =
      std::abs(rep.rate_measured - rep.rate_predicted) <= opt.rate_tol * std::abs(rep.rate_predicted);
  rep.verdicts.control_ok = rep.control_sup_gap < 0.8 * sel.rho_prime;
  rep.verdicts.pass = rep.verdicts.budgets_ok && rep.verdicts.rescale_ok && rep.verdicts.sup_ok &&
                      rep.verdicts.rate_ok && rep.verdicts.control_ok;
  return rep;
}

// ---- theorem-2 experiment: two-solution decoherence (quintic) ----------------

struct Thm2Options {
  int M = 0;                    // 0: smallest integer with rho^3 delta^2 M^2 >= 2 pi
  double horizon_factor = 0.1;  // the c in the quintic Gronwall window
  int samples = 1025;
  double rate_tol = 0.05;
  // Unit-scale two-solution surrogate used to validate the rate formula with
  // the actual PDE flow (the full-scale run is far beyond the caps).
  double surrogate_alpha1 = 0.09;
  double surrogate_alpha2 = 0.11;
  double surrogate_beta = 0.14;
  double surrogate_sigma = 0.15;
  double surrogate_tau = 2000.0;
  double surrogate_dt = 2e-3;
  int surrogate_gridsize = 16;
  int surrogate_samples = 129;
};

struct Thm2Params {
  double rho = 0.0, delta = 0.0, s = 0.0;
  int omega = +1;
  double rho_prime = 0.0;
  int M = 0;
  double a1 = 0.0, a2 = 0.0;  // rho' + delta j, the zero-mode magnitudes at full scale
  double b = 0.0;             // rho M, the dilated-mode magnitude at full scale
  // Relative zero-mode phase rate at full scale; the N^2 lift cancels the
  // 1/N^2 in the amplitudes, so this is N-free (the 3 b^4 terms cancel too).
  double rate_gap = 0.0;
  double rotation = 0.0;           // |rate_gap| * delta
  double N_norm_required = 0.0;    // smallest N fitting the H^s budget ||u1|| + ||u2|| <= rho
  double log10_N_gronwall = 0.0;   // N needed for the Gronwall window to cover [0, delta]
  bool pde_feasible = false;       // both of the above within the caps
};

inline Thm2Params choose_parameters_thm2(double rho, double delta, SobolevIndex s, int omega,
                                         const ExperimentCaps& caps = {},
                                         const Thm2Options& opt = {}) {
  if (!(rho > 0.0) || !(delta > 0.0) || delta > rho / 10.0)
    throw InvalidArgument("thm2: need 0 < delta <= rho/10");
  if (!(s.s < 0.0)) throw InvalidArgument("thm2: need s < 0");
  if (omega != 1 && omega != -1) throw InvalidArgument("thm2: omega must be +-1");

  Thm2Params par;
  par.rho = rho;
  par.delta = delta;
  par.s = s.s;
  par.omega = omega;
  par.rho_prime = rho / 4.0;

  const double two_pi = 2.0 * std::numbers::pi;
  par.M = opt.M > 0
              ? opt.M
              : static_cast<int>(std::ceil(std::sqrt(two_pi / (rho * rho * rho * delta * delta))));
  if (rho * rho * rho * delta * delta * par.M * par.M < two_pi)
    throw InvalidArgument("thm2: M too small for a full revolution over [0, delta]");

  par.a1 = par.rho_prime + delta;
  par.a2 = par.rho_prime + 2.0 * delta;
  par.b = rho * par.M;
  par.rate_gap = (ipow(par.a1, 4) - ipow(par.a2, 4)) +
                 6.0 * (par.a1 * par.a1 - par.a2 * par.a2) * par.b * par.b;
  par.rotation = std::abs(par.rate_gap) * delta;

  // Norm budget: sqrt(a_j^2 + x) terms with x = b^2 (1+N)^{2s}.
  double lo = 0.0, hi = rho * rho;
  for (int it = 0; it < 200; ++it) {
    const double x = 0.5 * (lo + hi);
    const double f = std::sqrt(par.a1 * par.a1 + x) + std::sqrt(par.a2 * par.a2 + x);
    (f <= rho ? lo : hi) = x;
  }
  par.N_norm_required = std::pow(lo / (par.b * par.b), 1.0 / (2.0 * s.s)) - 1.0;

  par.log10_N_gronwall =
      2.0 * (std::log10(par.b) +
             delta * ipow(par.b, 4) / (opt.horizon_factor * std::numbers::ln10));

  par.pde_feasible = par.N_norm_required <= caps.max_N &&
                     8.0 * par.N_norm_required <= caps.max_gridsize &&
                     par.log10_N_gronwall <= std::log10(static_cast<double>(caps.max_N));
  return par;
}

struct Thm2Verdicts {
  bool rotation_ok = false;
  bool gap0_ok = false;
  bool sup_ok = false;
  bool rate_ok = false;
  bool pass = false;
};

struct Thm2Report {
  Thm2Params par;
  std::string trace_source;  // the gap trace below is closed form, never silent
  std::vector<GapSample> gap;  // t in [0, delta]; zero-mode gap at full scale
  double gap_at_zero = 0.0;    // |a1 - a2| = delta
  double sup_gap = 0.0;
  double rate_predicted_surrogate = 0.0;
  double rate_measured_surrogate = 0.0;
  double surrogate_err1 = 0.0, surrogate_err2 = 0.0;  // max ||U_j - u_ab||_{H^1}
  SolverConfig surrogate_cfg;
  Thm2Verdicts verdicts;
};

inline Thm2Report run_thm2(const Thm2Params& par, const ExperimentCaps& caps = {},
                           const Thm2Options& opt = {}) {
  Thm2Report rep;
  rep.par = par;
  const NlsParams params(5, par.omega);

  // The H^s budget alone needs N ~ 1e8 and the Gronwall window an N beyond
  // astronomical, so the full-scale trace is evaluated from the closed form
  // (which is exact in N once the rates are lifted) and clearly labeled. The
  // PDE content of the claim is validated by the unit-scale surrogate below.
  rep.trace_source = par.pde_feasible
                         ? "closed-form (full-scale run skipped; see surrogate)"
                         : "closed-form fallback (caps make the full-scale run infeasible)";

  const double r1 = ipow(par.a1, 4) + 6.0 * par.a1 * par.a1 * par.b * par.b + 3.0 * ipow(par.b, 4);
  const double r2 = ipow(par.a2, 4) + 6.0 * par.a2 * par.a2 * par.b * par.b + 3.0 * ipow(par.b, 4);
  for (double t : detail::linspace(0.0, par.delta, opt.samples)) {
    GapSample g;
    g.t = t;
    const cdouble z1 = par.a1 * std::exp(cdouble(0.0, par.omega * r1 * t));
    const cdouble z2 = par.a2 * std::exp(cdouble(0.0, par.omega * r2 * t));
    g.gap = std::abs(z1 - z2);
    g.gap_predicted = g.gap;
    rep.gap.push_back(g);
    rep.sup_gap = std::max(rep.sup_gap, g.gap);
  }
  rep.gap_at_zero = rep.gap.front().gap;

  // Surrogate: same equation, same two-solution protocol, amplitudes inside
  // the sigma cap; checks that the measured relative phase rate matches the
  // quartic formula that the full-scale prediction rests on.
  const TwoModeData d1(cdouble(opt.surrogate_alpha1, 0.0), cdouble(opt.surrogate_beta, 0.0),
                       opt.surrogate_sigma, caps.sigma_cap);
  const TwoModeData d2(cdouble(opt.surrogate_alpha2, 0.0), cdouble(opt.surrogate_beta, 0.0),
                       opt.surrogate_sigma, caps.sigma_cap);
  rep.surrogate_cfg.gridsize = opt.surrogate_gridsize;
  rep.surrogate_cfg.dt = opt.surrogate_dt;
  const auto tau = detail::linspace(0.0, opt.surrogate_tau, opt.surrogate_samples);
  const auto run1 = evolve(d1.initial_field(), params, rep.surrogate_cfg, tau);
  const auto run2 = evolve(d2.initial_field(), params, rep.surrogate_cfg, tau);

  std::vector<double> tt;
  std::vector<cdouble> zz;
  for (size_t i = 0; i < run1.traj.size(); ++i) {
    tt.push_back(run1.traj[i].t);
    zz.push_back(run1.traj[i].field.coeff(0) * std::conj(run2.traj[i].field.coeff(0)));
    rep.surrogate_err1 = std::max(
        rep.surrogate_err1, sobolev_norm(run1.traj[i].field - approx_two_mode(params, d1, tau[i]),
                                         SobolevIndex(1.0)));
    rep.surrogate_err2 = std::max(
        rep.surrogate_err2, sobolev_norm(run2.traj[i].field - approx_two_mode(params, d2, tau[i]),
                                         SobolevIndex(1.0)));
  }
  rep.rate_measured_surrogate = fit_phase_rate(tt, zz).rate;
  rep.rate_predicted_surrogate =
      par.omega * (two_mode_phase(params, opt.surrogate_alpha1, opt.surrogate_beta) -
                   two_mode_phase(params, opt.surrogate_alpha2, opt.surrogate_beta));

  rep.verdicts.rotation_ok = par.rotation >= 2.0 * std::numbers::pi;
  rep.verdicts.gap0_ok = std::abs(rep.gap_at_zero - par.delta) <= 1e-12;
  rep.verdicts.sup_ok = rep.sup_gap >= 0.25 * par.rho;
  rep.verdicts.rate_ok =
      std::abs(rep.rate_measured_surrogate - rep.rate_predicted_surrogate) <=
      opt.rate_tol * std::abs(rep.rate_predicted_surrogate);
  rep.verdicts.pass = rep.verdicts.rotation_ok && rep.verdicts.gap0_ok && rep.verdicts.sup_ok &&
                      rep.verdicts.rate_ok;
  return rep;
}

}  // namespace nlslab
