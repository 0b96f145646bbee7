// Acceptance gate: one pass/fail line per criterion, nonzero exit on failure.
// Every check here is quantitative; thresholds are stated inline.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "nlslab/closed_form.hpp"
#include "nlslab/experiment.hpp"
#include "nlslab/mode_ode.hpp"
#include "nlslab/sobolev.hpp"
#include "nlslab/split_step.hpp"

using namespace nlslab;

namespace {

int failures = 0;

void verdict(int idx, const char* name, bool ok, const std::string& detail) {
  std::printf("[%s] criterion %2d: %s (%s)\n", ok ? "PASS" : "FAIL", idx, name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

template <typename F>
void criterion(int idx, const char* name, F&& body) {
  try {
    body();
  } catch (const std::exception& e) {
    verdict(idx, name, false, std::string("exception: ") + e.what());
  }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<double> ticks(double t0, double t1, int n) {
  std::vector<double> t(n);
  for (int i = 0; i < n; ++i) t[i] = t0 + (t1 - t0) * i / (n - 1);
  return t;
}

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), format, a, b, c);
  return buf;
}

}  // namespace

int main() {
  criterion(1, "plane-wave exactness", [] {
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (int omega : {1, -1}) {
      const NlsParams params(3, omega);
      SolverConfig cfg;
      cfg.gridsize = 32;
      cfg.dt = 1e-3;
      const auto res = evolve(SpectralField::single_mode(3, {0.1, 0.0}), params, cfg,
                              ticks(0.0, 10.0, 11));
      for (const auto& smp : res.traj)
        worst = std::max(worst,
                         l2_norm(smp.field - plane_wave(params, {0.1, 0.0}, 3, smp.t)));
    }
    const double secs = seconds_since(t0);
    verdict(1, "plane-wave exactness", worst <= 1e-8 && secs < 10.0,
            fmt("max l2 error %.3g, %.1f s", worst, secs));
  });

  criterion(2, "cubic approximation bound, sigma-uniform", [] {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    std::ostringstream detail;
    for (int omega : {1, -1}) {
      const BoundSweep sweep =
          sweep_approximation_bound(NlsParams(3, omega), {0.025, 0.05, 0.1});
      for (const auto& run : sweep.runs) ok = ok && std::isfinite(run.ratio_plain);
      ok = ok && sweep.uniform;
      detail << "omega " << (omega > 0 ? "+1" : "-1") << ": ratios [" << sweep.ratio_min << ", "
             << sweep.ratio_max << "] spread " << sweep.spread << "; ";
    }
    const double secs = seconds_since(t0);
    ok = ok && secs < 300.0;
    detail << secs << " s";
    verdict(2, "cubic approximation bound, sigma-uniform", ok, detail.str());
  });

  criterion(3, "quintic approximation bound, sigma-uniform", [] {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    std::ostringstream detail;
    for (int omega : {1, -1}) {
      const BoundSweep sweep = sweep_approximation_bound(NlsParams(5, omega), {0.05, 0.1});
      for (const auto& run : sweep.runs) ok = ok && std::isfinite(run.ratio_plain);
      ok = ok && sweep.uniform;
      detail << "omega " << (omega > 0 ? "+1" : "-1") << ": ratios [" << sweep.ratio_min << ", "
             << sweep.ratio_max << "] spread " << sweep.spread << "; ";
    }
    detail << seconds_since(t0) << " s";
    verdict(3, "quintic approximation bound, sigma-uniform", ok, detail.str());
  });

  criterion(4, "cubic correction exactness and gain", [] {
    // quadrature of the forced linear equation, mode by mode
    double worst_quad = 0.0;
    for (int omega : {1, -1}) {
      const NlsParams params(3, omega);
      const TwoModeData data = default_two_mode(0.05);
      const CubicCorrection corr = cubic_correction(data, omega);
      for (const auto& mode : two_mode_error_modes(params, data)) {
        const double mu = omega * mode.lambda + mode.k;
        const double k2 = static_cast<double>(mode.k) * mode.k;
        const cdouble iw(0.0, static_cast<double>(omega));
        auto rhs = [&](double t, cdouble v) {
          return cdouble(0.0, k2) * v + iw * mode.c * std::exp(cdouble(0.0, mu * t));
        };
        cdouble v(0.0, 0.0);
        const double T = 1.5, h = 1e-4;
        for (int i = 0; i < static_cast<int>(T / h + 0.5); ++i) {
          const double t = i * h;
          const cdouble k1 = rhs(t, v);
          const cdouble q2 = rhs(t + h / 2, v + 0.5 * h * k1);
          const cdouble q3 = rhs(t + h / 2, v + 0.5 * h * q2);
          const cdouble q4 = rhs(t + h, v + h * q3);
          v += (h / 6.0) * (k1 + 2.0 * q2 + 2.0 * q3 + q4);
        }
        worst_quad = std::max(worst_quad, std::abs(v - corr.at(T).coeff(mode.k)));
      }
    }

    BoundOptions opt;
    const BoundRun run = verify_approximation_bound(NlsParams(3, 1), default_two_mode(0.05), opt);
    const double gain = run.max_err_plain / run.max_err_corrected;
    verdict(4, "cubic correction exactness and gain",
            worst_quad <= 1e-8 && run.corrected_smaller && gain >= 2.0,
            fmt("quadrature gap %.3g, improvement factor %.1f", worst_quad, gain));
  });

  criterion(5, "frequency rescaling identity", [] {
    SpectralField u0(1);
    u0.set(0, {0.15, 0.05});
    u0.set(1, {-0.02, 0.12});
    double worst = 0.0;
    for (int m : {1, 2}) {
      const NlsParams params(2 * m + 1, 1);
      for (int N : {4, 8, 16}) {
        const ScalingMap sm(N, m);
        SolverConfig unit;
        unit.gridsize = 16;
        unit.dt = 2.5e-3;
        const auto coarse = evolve(u0, params, unit, ticks(0.0, 0.5, 5));
        SolverConfig direct;
        direct.gridsize = 16 * N;
        direct.dt = unit.dt / sm.time_factor();
        std::vector<double> t_phys;
        for (double t : ticks(0.0, 0.5, 5)) t_phys.push_back(t / sm.time_factor());
        const auto fine = evolve(rescale_field(u0, sm), params, direct, t_phys);
        const Trajectory lifted = rescale_up(coarse.traj, sm);
        for (size_t i = 0; i < lifted.size(); ++i)
          worst = std::max(worst, l2_norm(fine.traj[i].field - lifted[i].field));
      }
    }
    verdict(5, "frequency rescaling identity", worst <= 1e-6, fmt("max l2 mismatch %.3g", worst));
  });

  criterion(6, "zero-mode decoherence at desk scale", [] {
    const auto t0 = std::chrono::steady_clock::now();
    const ExperimentCaps caps;
    const Thm1Selection sel = choose_parameters_thm1(1.0, 0.1, SobolevIndex(-0.25), 1, caps);
    const Thm1Report rep = run_thm1(sel, caps);
    const bool data_ok = sel.dist_hs < 0.1 && sel.norm_plane <= 1.0 && sel.norm_tilde <= 1.0;
    const bool sup_ok = rep.sup_gap >= 0.25 * sel.rho;
    const bool control_ok = rep.control_sup_gap < 0.8 * sel.rho_prime;
    std::ostringstream detail;
    detail << "N " << sel.N << ", dist " << sel.dist_hs << ", sup gap " << rep.sup_gap
           << " >= " << 0.25 * sel.rho << ", rate " << rep.rate_measured << " vs "
           << rep.rate_predicted << ", control " << rep.control_sup_gap << " < "
           << 0.8 * sel.rho_prime << ", rescale " << rep.rescale_mismatch << ", "
           << seconds_since(t0) << " s";
    verdict(6, "zero-mode decoherence at desk scale",
            data_ok && sup_ok && control_ok && rep.verdicts.pass, detail.str());
  });

  criterion(7, "two-solution decoherence mechanism", [] {
    const auto t0 = std::chrono::steady_clock::now();
    const Thm2Params par = choose_parameters_thm2(1.0, 0.05, SobolevIndex(-0.25), 1, {});
    const Thm2Report rep = run_thm2(par, {});
    const bool gap0_ok = std::abs(rep.gap_at_zero - 0.05) <= 1e-12;
    const bool sup_ok = rep.sup_gap >= 0.25 * par.rho;
    const bool rate_ok = rep.verdicts.rate_ok;
    std::ostringstream detail;
    detail << rep.trace_source << "; M " << par.M << ", sup gap " << rep.sup_gap
           << ", surrogate rate " << rep.rate_measured_surrogate << " vs "
           << rep.rate_predicted_surrogate << ", " << seconds_since(t0) << " s";
    verdict(7, "two-solution decoherence mechanism",
            gap0_ok && sup_ok && rate_ok && rep.verdicts.pass, detail.str());
  });

  criterion(8, "mode system matches the closed forms", [] {
    double worst = 0.0;
    for (int m : {1, 2, 3}) {
      for (int omega : {1, -1}) {
        const NlsParams params(2 * m + 1, omega);
        const TwoModeData data(cdouble(0.9, 0.0), cdouble(0.0, 0.7), 0.9, 1.0);
        const ModeSystem sys(params, ModeWindow::truncated, data.initial_field());
        const Trajectory traj = integrate_modes(sys, 1.0, 5e-4, 5);
        for (const auto& smp : traj) {
          const SpectralField want = approx_two_mode(params, data, smp.t);
          worst = std::max(worst, std::abs(smp.field.coeff(0) - want.coeff(0)));
          worst = std::max(worst, std::abs(smp.field.coeff(1) - want.coeff(1)));
        }
      }
    }
    // coefficient triples, read off the phase polynomial functionally
    const NlsParams cubic(3, 1), quintic(5, 1);
    const bool triples_ok = two_mode_phase(cubic, 1.0, 0.0) == 1.0 &&
                            two_mode_phase(cubic, 0.0, 1.0) == 2.0 &&
                            two_mode_phase(quintic, 1.0, 0.0) == 1.0 &&
                            two_mode_phase(quintic, 0.0, 1.0) == 3.0 &&
                            two_mode_phase(quintic, 1.0, 1.0) == 10.0;
    verdict(8, "mode system matches the closed forms", worst <= 1e-8 && triples_ok,
            fmt("max coefficient error %.3g, triples (1,2) and (1,6,3) ", worst) +
                (triples_ok ? "exact" : "WRONG"));
  });

  criterion(9, "conservation suite", [] {
    std::mt19937 rng(901);
    std::uniform_real_distribution<double> U(-0.04, 0.04);
    double mass_drift = 0.0, ham_drift = 0.0;
    for (int run = 0; run < 100; ++run) {
      const NlsParams params(run % 2 ? 5 : 3, run % 3 == 0 ? -1 : 1);
      SpectralField u0(2);
      for (int n = -2; n <= 2; ++n) u0.set(n, cdouble(U(rng), U(rng)));
      SolverConfig cfg;
      cfg.gridsize = 16;
      cfg.dt = 1e-3;
      const auto res = evolve(u0, params, cfg, ticks(0.0, 1.0, 5));
      const double m0 = res.diagnostics.front().mass;
      const double h0 = res.diagnostics.front().hamiltonian;
      for (const auto& d : res.diagnostics) {
        mass_drift = std::max(mass_drift, std::abs(d.mass - m0));
        ham_drift = std::max(ham_drift, std::abs(d.hamiltonian - h0));
      }
    }
    double amp_drift = 0.0;
    for (int m : {1, 2, 3}) {
      const NlsParams params(2 * m + 1, -1);
      SpectralField u0(1);
      u0.set(0, {0.6, 0.1});
      u0.set(1, {-0.2, 0.5});
      const ModeSystem sys(params, ModeWindow::truncated, u0);
      const Trajectory traj = integrate_modes(sys, 1.0, 5e-4, 9);
      for (const auto& smp : traj) {
        amp_drift = std::max(amp_drift,
                             std::abs(std::abs(smp.field.coeff(0)) - std::abs(u0.coeff(0))));
        amp_drift = std::max(amp_drift,
                             std::abs(std::abs(smp.field.coeff(1)) - std::abs(u0.coeff(1))));
      }
    }
    verdict(9, "conservation suite",
            mass_drift <= 1e-8 && ham_drift <= 1e-6 && amp_drift <= 1e-9,
            fmt("mass %.3g, hamiltonian %.3g, ode amplitudes %.3g", mass_drift, ham_drift,
                amp_drift));
  });

  criterion(10, "quintic error structure", [] {
    std::mt19937 rng(1001);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    bool k_ok = true;
    double worst = 0.0;
    for (int omega : {1, -1}) {
      const NlsParams params(5, omega);
      const TwoModeData data(cdouble(0.17, -0.06), cdouble(0.05, 0.21), 0.25);
      std::vector<int> ks;
      for (const auto& mode : quintic_error_modes(data, omega)) ks.push_back(mode.k);
      std::sort(ks.begin(), ks.end());
      k_ok = k_ok && ks == std::vector<int>{-2, -1, 2, 3};
      const auto modes = two_mode_nonlinearity_modes(params, data);
      for (int trial = 0; trial < 100; ++trial) {
        const double t = 10.0 * U(rng), x = 2.0 * std::numbers::pi * U(rng);
        cdouble u(0.0, 0.0);
        const SpectralField f = approx_two_mode(params, data, t);
        for (int n = -1; n <= 1; ++n) u += f.coeff(n) * std::exp(cdouble(0.0, n * x));
        const cdouble direct = std::pow(std::abs(u), 4) * u;
        cdouble sum(0.0, 0.0);
        for (const auto& mode : modes)
          sum += mode.c * std::exp(cdouble(0.0, omega * mode.lambda * t)) *
                 std::exp(cdouble(0.0, mode.k * (x + t)));
        worst = std::max(worst, std::abs(sum - direct));
      }
    }
    verdict(10, "quintic error structure", k_ok && worst <= 1e-12,
            fmt("max pointwise reconstruction error %.3g", worst) +
                (k_ok ? ", off-system modes {-2,-1,2,3}" : ", WRONG mode set"));
  });

  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
