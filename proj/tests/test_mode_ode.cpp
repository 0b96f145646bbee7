#include <catch2/catch_amalgamated.hpp>

#include <complex>

#include "nlslab/closed_form.hpp"
#include "nlslab/mode_ode.hpp"
#include "nlslab/sobolev.hpp"

using namespace nlslab;

namespace {

SpectralField two_modes(cdouble a0, cdouble a1) {
  SpectralField f(1);
  f.set(0, a0);
  f.set(1, a1);
  return f;
}

}  // namespace

TEST_CASE("truncated right-hand side at the two carrier modes") {
  for (int omega : {1, -1}) {
    const NlsParams params(3, omega);
    const cdouble a0(0.1, 0.0), a1(0.0, 0.2);
    const ModeSystem sys(params, ModeWindow::truncated, two_modes(a0, a1));
    const SpectralField rhs = fnls_rhs(sys);
    // d a_0/dt = i omega (|a0|^2 + 2 |a1|^2) a0
    const cdouble want0 = cdouble(0.0, omega * (0.01 + 2 * 0.04)) * a0;
    REQUIRE(std::abs(rhs.coeff(0) - want0) < 1e-15);
    // d a_1/dt = i a_1 + i omega (2 |a0|^2 + |a1|^2) a1
    const cdouble want1 = cdouble(0.0, 1.0) * a1 + cdouble(0.0, omega * (0.02 + 0.04)) * a1;
    REQUIRE(std::abs(rhs.coeff(1) - want1) < 1e-15);
  }
}

TEST_CASE("quintic right-hand side at unit amplitudes") {
  // m = 2, a0 = a1 = 1: mode-0 nonlinearity is Phi(1,1) = 10, so rhs_0 = 10 i
  const NlsParams params(5, 1);
  const ModeSystem sys(params, ModeWindow::truncated, two_modes({1.0, 0.0}, {1.0, 0.0}));
  const SpectralField rhs = fnls_rhs(sys);
  REQUIRE(std::abs(rhs.coeff(0) - cdouble(0.0, 10.0)) < 1e-13);
}

TEST_CASE("truncated system follows the closed-form rotation") {
  for (int m : {1, 2, 3}) {
    for (int omega : {1, -1}) {
      const NlsParams params(2 * m + 1, omega);
      const TwoModeData data(cdouble(0.9, 0.0), cdouble(0.0, 0.7), 0.9, 1.0);
      const ModeSystem sys(params, ModeWindow::truncated, data.initial_field());
      const Trajectory traj = integrate_modes(sys, 1.0, 5e-4, 5);
      for (const auto& smp : traj) {
        const SpectralField want = approx_two_mode(params, data, smp.t);
        REQUIRE(std::abs(smp.field.coeff(0) - want.coeff(0)) < 1e-8);
        REQUIRE(std::abs(smp.field.coeff(1) - want.coeff(1)) < 1e-8);
      }
    }
  }
}

TEST_CASE("truncated system conserves the carrier amplitudes") {
  for (int m : {1, 2, 3}) {
    const NlsParams params(2 * m + 1, -1);
    const ModeSystem sys(params, ModeWindow::truncated,
                         two_modes(cdouble(0.6, 0.3), cdouble(-0.2, 0.5)));
    const double r0 = std::abs(cdouble(0.6, 0.3));
    const double r1 = std::abs(cdouble(-0.2, 0.5));
    const Trajectory traj = integrate_modes(sys, 1.0, 5e-4, 9);
    for (const auto& smp : traj) {
      REQUIRE(std::abs(std::abs(smp.field.coeff(0)) - r0) < 1e-9);
      REQUIRE(std::abs(std::abs(smp.field.coeff(1)) - r1) < 1e-9);
    }
  }
}

TEST_CASE("passive modes pick up the forced oscillation") {
  // in the truncated cubic system mode -1 is driven by a0^2 conj(a1); it must
  // leave zero immediately but stay bounded (non-resonant forcing)
  const NlsParams params(3, 1);
  const ModeSystem sys(params, ModeWindow::truncated, two_modes({0.5, 0.0}, {0.4, 0.0}));
  const Trajectory traj = integrate_modes(sys, 2.0, 1e-3, 9);
  REQUIRE(std::abs(traj.front().field.coeff(-1)) == 0.0);
  double peak = 0.0;
  for (const auto& smp : traj) peak = std::max(peak, std::abs(smp.field.coeff(-1)));
  REQUIRE(peak > 1e-3);
  REQUIRE(peak < 0.5);
}

TEST_CASE("integrator converges at fourth order") {
  const NlsParams params(3, 1);
  const TwoModeData data(cdouble(0.9, 0.0), cdouble(0.7, 0.0), 0.9, 1.0);
  auto err_at = [&](double dt) {
    const ModeSystem sys(params, ModeWindow::truncated, data.initial_field());
    const Trajectory traj = integrate_modes(sys, 2.0, dt, 2);
    const SpectralField want = approx_two_mode(params, data, 2.0);
    const auto& got = traj.back().field;
    return std::hypot(std::abs(got.coeff(0) - want.coeff(0)),
                      std::abs(got.coeff(1) - want.coeff(1)));
  };
  const double e1 = err_at(0.02), e2 = err_at(0.01);
  REQUIRE(e1 > 1e-12);  // above roundoff, or the ratio is meaningless
  const double order = std::log2(e1 / e2);
  INFO("e(0.02) = " << e1 << ", e(0.01) = " << e2 << ", order " << order);
  REQUIRE(order > 3.5);
  REQUIRE(order < 4.5);
}

TEST_CASE("full window agrees with the convolution nonlinearity") {
  // fnls_rhs computes the Galerkin right-hand side through the padded grid;
  // check it against the coefficient-space convolution, which shares no code.
  const NlsParams params(5, -1);
  SpectralField state(3);
  state.set(-3, {0.11, -0.04});
  state.set(-1, {0.02, 0.30});
  state.set(0, {-0.25, 0.05});
  state.set(2, {0.07, 0.19});
  const ModeSystem sys(params, ModeWindow::full, state);
  const SpectralField rhs = fnls_rhs(sys);

  const SpectralField nl = power_nonlinearity(state, params.p);
  for (int k = -3; k <= 3; ++k) {
    const cdouble want = cdouble(0.0, static_cast<double>(k) * k) * state.coeff(k) +
                         cdouble(0.0, -1.0) * nl.coeff(k);
    REQUIRE(std::abs(rhs.coeff(k) - want) < 1e-12);
  }
}

TEST_CASE("zero state stays zero") {
  const NlsParams params(3, 1);
  const ModeSystem sys(params, ModeWindow::truncated, SpectralField(1));
  const Trajectory traj = integrate_modes(sys, 1.0, 1e-2, 3);
  for (const auto& smp : traj) REQUIRE(l2_norm(smp.field) == 0.0);
}

TEST_CASE("truncated window rejects wide initial data") {
  const NlsParams params(3, 1);  // m = 1, window -1 .. 2
  SpectralField wide(3);
  wide.set(3, {0.1, 0.0});
  REQUIRE_THROWS_AS(ModeSystem(params, ModeWindow::truncated, wide), InvalidArgument);
  REQUIRE_NOTHROW(ModeSystem(params, ModeWindow::full, wide));
}

TEST_CASE("sample grid is uniform and hits the final time") {
  const NlsParams params(3, 1);
  const ModeSystem sys(params, ModeWindow::truncated, two_modes({0.1, 0.0}, {0.1, 0.0}));
  const Trajectory traj = integrate_modes(sys, 1.0, 1e-3, 11);
  REQUIRE(traj.size() == 11);
  REQUIRE(traj.front().t == 0.0);
  REQUIRE(traj.back().t == Catch::Approx(1.0));
  for (size_t i = 1; i < traj.size(); ++i)
    REQUIRE(traj[i].t - traj[i - 1].t == Catch::Approx(0.1).margin(1e-9));
}
