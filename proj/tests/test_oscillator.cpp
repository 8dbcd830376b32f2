#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "echolab/metrics.hpp"
#include "echolab/oscillator.hpp"

using namespace echolab;

namespace {

// Strongly chaotic reference drive used throughout the oscillator tests:
// sixteen harmonics of unit period with incommensurate phases.
OscillatorParams chaotic_params() {
  OscillatorParams p;
  p.w0 = 6.0;
  p.hbar = 1e-3;
  p.dt = 1e-3;
  for (int m = 1; m <= 16; ++m)
    p.drive.modes.push_back({m, 2.0, std::fmod(0.7 * m, kTwoPi)});
  return p;
}

PDensitySpec blob_spec(std::int64_t n, std::uint64_t seed) {
  PDensitySpec P;
  P.kind = PKind::gaussian_ring;
  P.center = Complex(1.5, 0.0);
  P.width = 0.1;
  P.n_samples = n;
  P.seed = seed;
  return P;
}

}  // namespace

TEST_CASE("integrate_orbit: undriven motion freezes the action") {
  OscillatorParams p;
  p.w0 = 2.0;
  p.dt = 1e-3;
  const Complex a0(1.2, -0.4);
  const auto traj = integrate_orbit(a0, p, 3.0, 10);
  const double I0 = std::norm(a0);
  for (std::size_t s = 0; s < traj.times.size(); ++s) {
    CHECK(traj.I[s] == doctest::Approx(I0).epsilon(1e-9));
    // phase advances linearly at the shifted frequency w0 + 2 I0
    CHECK(traj.phi[s] == doctest::Approx((p.w0 + 2.0 * I0) * traj.times[s]).epsilon(1e-9));
    CHECK(std::abs(traj.alpha[s] - a0 * std::polar(1.0, -(p.w0 + 2.0 * I0) * traj.times[s])) <
          1e-7);
  }
  CHECK_THROWS_AS(integrate_orbit(a0, p, -1.0), std::invalid_argument);
}

TEST_CASE("integrate_orbit: weak drive matches the linear-response quadrature") {
  OscillatorParams p;
  p.w0 = 6.0;
  p.dt = 1e-3;
  const double g = 1e-3, chi = 0.3, a = kTwoPi;  // single m=1 harmonic
  p.drive.modes.push_back({1, g, chi});
  const double T = 2.0;
  const auto traj = integrate_orbit(Complex(0, 0), p, T, 100);
  // linearized solution: |α(T)| = |∫₀ᵀ g(τ) e^{iω₀τ} dτ|, evaluated in closed form
  const Complex i1 = (std::polar(1.0, (p.w0 + a) * T) - 1.0) / Complex(0, p.w0 + a);
  const Complex i2 = (std::polar(1.0, (p.w0 - a) * T) - 1.0) / Complex(0, p.w0 - a);
  const double ref = std::abs(0.5 * g * (std::polar(1.0, chi) * i1 + std::polar(1.0, -chi) * i2));
  CHECK(std::abs(traj.alpha.back()) == doctest::Approx(ref).epsilon(0.01));
}

TEST_CASE("action integral residual below 1e-6 on a chaotic orbit") {
  auto p = chaotic_params();
  const auto traj = integrate_orbit(Complex(1.5, 0.0), p, 2.0, 1);
  CHECK(action_integral_residual(traj, p) < 1e-6);
}

TEST_CASE("integrate_orbit: step-halving check rejects a coarse step") {
  auto p = chaotic_params();
  p.dt = 0.05;
  CHECK_THROWS_AS(integrate_orbit(Complex(1.5, 0.0), p, 2.0, 1), std::runtime_error);
  p.dt = 1e-3;
  CHECK_NOTHROW(integrate_orbit(Complex(1.5, 0.0), p, 2.0, 1));
}

TEST_CASE("phase_correlation: trivial values and bounds") {
  auto p = chaotic_params();
  auto P = blob_spec(2000, 5);
  const auto c0 = phase_correlation(P, p, 0.0, 1.0, 100);
  for (const auto& v : c0.value) CHECK(std::abs(v - 1.0) < 1e-12);
  const auto c1 = phase_correlation(P, p, 1.0, 1.0, 100);
  CHECK(std::abs(c1.value[0] - 1.0) < 1e-12);
  for (const auto& v : c1.value) CHECK(std::abs(v) <= 1.0 + 1e-12);
  P.n_samples = 100;
  CHECK_THROWS_AS(phase_correlation(P, p, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("phase_correlation: c=1 correlator decays exponentially over two decades") {
  // Best configuration found in a broad survey over drives and densities
  // (two- and three-mode drives at w0 = 1 and 6, sixteen-harmonic drives,
  // ring and exponential densities across widths): the two-mode drive over
  // an exponential density of width 0.3. The decay always keeps a residual
  // shoulder-to-tail curvature; the smallest log-residual RMS observed
  // anywhere in the survey is ~0.24, so the 0.2 bound below is expected to
  // fail until a cleaner configuration is found. It is kept at 0.2 as the
  // design target rather than loosened to match the measurement.
  OscillatorParams p;
  p.w0 = 1.0;
  p.hbar = 1e-3;
  p.dt = 1e-3;
  p.drive.modes = {{1, 1.5, 0.0}, {2, 1.5, kPi / 3.0}};
  PDensitySpec P;
  P.kind = PKind::exponential;
  P.width = 0.3;
  P.n_samples = 20000;
  P.seed = 7;
  const auto corr = phase_correlation(P, p, 1.0, 16.0, 25);
  std::vector<double> abs2(corr.value.size());
  for (std::size_t i = 0; i < corr.value.size(); ++i) abs2[i] = std::norm(corr.value[i]);
  const double t2d = crossing_time(corr.t, abs2, 1e-2);  // two decades down
  REQUIRE(t2d > 0);
  const ExpFit fit = fit_exp_rate(corr.t, abs2, corr.t[1], t2d);
  CHECK(fit.rate > 0);                // a well-defined 1/tau_c is reported
  CHECK(fit.log_resid_rms < 0.2);     // exponential to within the target RMS
}

TEST_CASE("allegiance_classical: delta density never decays") {
  auto p = chaotic_params();
  PDensitySpec P;
  P.kind = PKind::delta;
  P.center = Complex(1.5, 0.0);
  P.n_samples = 1000;
  const auto a = allegiance_classical(P, p, 2.0, 1.0, 100);
  for (double v : a.value) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(allegiance_classical(P, p, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("action_cumulant: frozen actions give chi2 ~ Var(I0) t^2") {
  OscillatorParams p;  // no drive
  p.w0 = 3.0;
  p.dt = 1e-2;
  PDensitySpec P;
  P.kind = PKind::exponential;
  P.width = 0.5;  // Var(I0) = width^2 for the exponential law
  P.n_samples = 20000;
  P.seed = 3;
  const auto cum = action_cumulant(P, p, 5.0, 10);
  CHECK_FALSE(cum.kernel_decays);
  const double t_end = cum.chi2.t.back();
  CHECK(cum.chi2.value.back() / (t_end * t_end) == doctest::Approx(0.25).epsilon(0.10));
  // kernel row is constant: K_I(tau,0) = Var(I0) at all separations (up to
  // RK4 round-off in the conserved action)
  for (double k : cum.kernel_row.value)
    CHECK(k == doctest::Approx(cum.kernel_row.value[0]).epsilon(1e-4));
  P.n_samples = 100;
  CHECK_THROWS_AS(action_cumulant(P, p, 1.0), std::invalid_argument);
}

TEST_CASE("action_cumulant: three-resonance drive decorrelates the action kernel") {
  // The default three-resonance drive keeps the ensemble in a bounded chaotic
  // band: the action kernel decorrelates (short tau_I) even though the mean
  // action does not drift.
  OscillatorParams p;
  p.w0 = 6.0;
  p.hbar = 1e-3;
  p.dt = 1e-3;
  p.drive.modes = {{1, 2.0, 0.3}, {2, 1.5, 1.4}, {3, 1.5, 2.6}};
  PDensitySpec P;
  P.kind = PKind::gaussian_ring;
  P.center = Complex(2.0, 0.0);
  P.width = 0.05;
  P.n_samples = 5000;
  P.seed = 7;
  const auto cum = action_cumulant(P, p, 16.0, 100);
  CHECK(cum.kernel_decays);
  CHECK(cum.tau_I > 0.0);
  CHECK(cum.tau_I < 2.0);
}

TEST_CASE("action_cumulant: broadband drive gives diffusive <I> growth") {
  // The sixteen-harmonic drive heats the ensemble; its kernel keeps a
  // persistent memory of I(0) (kernel_decays reports false there), but the
  // mean action grows linearly as expected for diffusive heating.
  auto p = chaotic_params();
  auto P = blob_spec(5000, 7);
  const auto cum = action_cumulant(P, p, 16.0, 100);
  CHECK(cum.D > 0.0);
  // linear growth of <I(t)> over [1, 16]
  std::vector<double> xs, ys;
  for (std::size_t s = 0; s < cum.mean_I.t.size(); ++s)
    if (cum.mean_I.t[s] >= 1.0) {
      xs.push_back(cum.mean_I.t[s]);
      ys.push_back(cum.mean_I.value[s]);
    }
  CHECK(linear_fit(xs, ys).r2 > 0.98);
}

TEST_CASE("fgr_prediction: arithmetic and sigma-doubling") {
  RealSeries chi2;
  for (int i = 0; i <= 10; ++i) {
    chi2.t.push_back(i);
    chi2.value.push_back(2.0 * 0.5 * i);  // chi2 = 2 K t with K = 0.5
  }
  const auto f1 = fgr_prediction(chi2, 0.1);
  const auto f2 = fgr_prediction(chi2, 0.2);
  for (int i = 0; i <= 10; ++i) {
    CHECK(f1.value[i] == doctest::Approx(std::exp(-0.01 * i)).epsilon(1e-12));
    // doubling sigma quadruples the log-rate exactly
    CHECK(std::log(f2.value[i]) == doctest::Approx(4.0 * std::log(f1.value[i])).epsilon(1e-9));
  }
}

TEST_CASE("semiclassical_amplitude: sigma=0 and hbar->0 limits, determinism") {
  auto p = chaotic_params();
  const auto zero = semiclassical_amplitude(Complex(1.5, 0.0), p, 0.0, 0.5, 2000, 9, 100);
  for (const auto& v : zero.f.value) CHECK(std::abs(v - 1.0) < 1e-12);
  p.hbar = 1e-14;  // quantum fluctuations neglected: |f| = 1
  const auto frozen = semiclassical_amplitude(Complex(1.5, 0.0), p, 1.0, 0.5, 2000, 9, 100);
  for (const auto& v : frozen.f.value) CHECK(std::abs(v) == doctest::Approx(1.0).epsilon(1e-6));
  p.hbar = 1e-3;
  const auto a = semiclassical_amplitude(Complex(1.5, 0.0), p, 20.0, 0.5, 2000, 9, 100);
  const auto b = semiclassical_amplitude(Complex(1.5, 0.0), p, 20.0, 0.5, 2000, 9, 100);
  for (std::size_t s = 0; s < a.f.value.size(); ++s) CHECK(a.f.value[s] == b.f.value[s]);
  for (const auto& v : a.f.value) CHECK(std::abs(v) <= 1.0 + 1e-12);
  CHECK(a.max_stderr <= 1.0 / std::sqrt(2000.0) + 1e-12);
  CHECK_THROWS_AS(semiclassical_amplitude(Complex(1.5, 0.0), p, 1.0, 0.5, 10, 9),
                  std::invalid_argument);
}

TEST_CASE("early_time_fidelity: eps=0 identity, derivative consistency") {
  auto p = chaotic_params();
  const auto res0 = early_time_fidelity(Complex(1.5, 0.0), p, 0.0, p.hbar, 1.0, 100);
  for (double v : res0.F.value) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
  const auto res = early_time_fidelity(Complex(1.5, 0.0), p, 0.02, p.hbar, 1.5, 100);
  CHECK(res.fd_disagreement < 1e-4);
  CHECK(res.F.value.back() < 1.0);
  // chaotic sensitivity growth: the phase gradient increases strongly over t
  CHECK(res.grad_alpha_abs.value.back() > 10.0 * res.grad_alpha_abs.value[2]);
  // where the B correction is small the bare exponential matches within 5%
  const double eps = 0.02;
  for (std::size_t s = 1; s < res.F.value.size(); ++s) {
    const double bcorr = 0.25 * eps * eps * res.dphi_dw_abs.value[s] * res.dphi_dw_abs.value[s];
    if (bcorr < 0.05) {
      const double g2 = res.grad_alpha_abs.value[s] * res.grad_alpha_abs.value[s];
      const double bare = std::exp(-(eps * eps / (4.0 * p.hbar)) * g2);
      if (bare > 1e-6)
        CHECK(res.F.value[s] == doctest::Approx(bare).epsilon(0.05));
    }
  }
  CHECK(res.validity_T == doctest::Approx(std::log(2.0 / eps)).epsilon(1e-12));
}

TEST_CASE("p_to_fock: vacuum and the exponential/geometric pair") {
  PDensitySpec vac;
  vac.kind = PKind::delta;
  vac.center = 0.0;
  const auto wv = p_to_fock(vac, 0.1, 10);
  CHECK(wv.rho[0] == 1.0);
  for (int n = 1; n <= 10; ++n) CHECK(wv.rho[n] == 0.0);

  PDensitySpec P;
  P.kind = PKind::exponential;
  P.width = 0.1;
  const double hbar = 0.01;
  const auto w = p_to_fock(P, hbar, 200);
  CHECK(w.sum() == doctest::Approx(1.0).epsilon(1e-12));
  const double q = P.width / (P.width + hbar);
  for (int n = 0; n <= 60; ++n)
    CHECK(w.rho[n] == doctest::Approx((1.0 - q) * std::pow(q, n)).epsilon(2e-5));

  PDensitySpec off = P;
  off.center = Complex(1.0, 0.0);
  CHECK_THROWS_AS(p_to_fock(off, hbar, 10), std::invalid_argument);
}

TEST_CASE("p_to_fock_tabulated: grid validation and tail guard") {
  CHECK_THROWS_AS(p_to_fock_tabulated({0.0}, {1.0}, 0.1, 5), std::invalid_argument);
  // truncating a broad density at a tiny n_max leaves tail mass -> error
  std::vector<double> I_grid(1000), P_values(1000);
  for (int i = 0; i < 1000; ++i) {
    I_grid[i] = 2.0 * i / 999.0;
    P_values[i] = std::exp(-I_grid[i] / 0.5) / (kPi * 0.5);
  }
  CHECK_THROWS_AS(p_to_fock_tabulated(I_grid, P_values, 0.05, 3), std::runtime_error);
}

TEST_CASE("fock_to_p: geometric weights invert to the exponential density") {
  const double hbar = 0.01, width = 0.1;
  const double q = width / (width + hbar);
  FockWeights w;
  w.rho.resize(201);
  for (int n = 0; n <= 200; ++n) w.rho[n] = (1.0 - q) * std::pow(q, n);
  std::vector<double> I_grid;
  for (int i = 0; i <= 500; ++i) I_grid.push_back(5.0 * width * i / 500.0);
  double resid = 0;
  const auto P_back = fock_to_p(w, hbar, I_grid, &resid);
  CHECK(resid < 1e-10);
  for (std::size_t i = 0; i < I_grid.size(); ++i)
    CHECK(P_back[i] == doctest::Approx(std::exp(-I_grid[i] / width) / (kPi * width))
                           .epsilon(1e-4));
}

TEST_CASE("fock_to_p: vacuum weights keep unit mass") {
  FockWeights w;
  w.rho.assign(21, 0.0);
  w.rho[0] = 1.0;
  const double hbar = 0.1;
  std::vector<double> I_grid;
  const double h = 1e-5;
  for (int i = 0; i <= 20000; ++i) I_grid.push_back(h * i);
  const auto P = fock_to_p(w, hbar, I_grid);
  double mass = 0;  // total mass over d^2 alpha is pi * integral of P dI
  for (std::size_t i = 1; i < I_grid.size(); ++i)
    mass += 0.5 * (P[i] + P[i - 1]) * h;
  CHECK(kPi * mass == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("thermal_fock_weights: formula, oracle and guards") {
  const double hbar = 0.1, w0 = 1.0, T = 0.5;
  const auto w = thermal_fock_weights(T, w0, hbar, 120);
  CHECK(w.sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(w.rho[1] / w.rho[0] ==
        doctest::Approx(std::exp(-(hbar * w0 + hbar * hbar) / T)).epsilon(1e-12));
  // independent two-line oracle
  double Z = 0;
  for (int n = 0; n <= 120; ++n) Z += std::exp(-(hbar * w0 * n + hbar * hbar * n * n) / T);
  for (int n = 0; n <= 10; ++n)
    CHECK(w.rho[n] ==
          doctest::Approx(std::exp(-(hbar * w0 * n + hbar * hbar * n * n) / T) / Z)
              .epsilon(1e-12));
  // T -> 0: ground state only
  const auto cold = thermal_fock_weights(1e-3, w0, hbar, 120);
  CHECK(cold.rho[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(thermal_fock_weights(-1.0, w0, hbar, 10), std::invalid_argument);
  CHECK_THROWS_AS(thermal_fock_weights(10.0, w0, hbar, 5), std::runtime_error);
}

TEST_CASE("thermal weights survive a P-function round trip") {
  const double hbar = 0.05, w0 = 1.0, T = 0.5;
  const int n_max = 60;
  const auto w = thermal_fock_weights(T, w0, hbar, n_max);
  std::vector<double> I_grid;
  const double h = 5e-4;
  for (int i = 0; i <= 16000; ++i) I_grid.push_back(h * i);  // up to I = 8
  double resid = 0;
  const auto P = fock_to_p(w, hbar, I_grid, &resid);
  CHECK(resid < 1e-8);
  const auto back = p_to_fock_tabulated(I_grid, P, hbar, n_max);
  for (int n = 0; n <= n_max; ++n) CHECK(std::abs(back.rho[n] - w.rho[n]) < 1e-4);
}
