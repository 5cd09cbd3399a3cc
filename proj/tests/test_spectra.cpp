#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "mirrorstate/spectra.hpp"
#include "test_util.hpp"

using namespace mirrorstate;
using std::complex;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double crel(complex<double> a, complex<double> b) {
  double s = std::max(std::abs(a), std::abs(b));
  return s == 0 ? 0 : std::abs(a - b) / s;
}
}  // namespace

TEST_CASE("thermal noise: occupation, vacuum floor, coth flattening") {
  const PhysicalParams& p = table1();
  NoiseVariances nv = thermal_noise_variance(p, p.mech_decay_rot);
  CHECK(nv.x_in2 == 1.0);
  CHECK(nv.y_in2 == 1.0);
  CHECK(nv.x_in_prime2 == 1.0);

  // oracle: direct k_B T0 Gamma_r / (hbar Omega gamma_m) - 1/2
  long double np = (long double)p.k_B * p.bath_temp * p.mech_decay_rot /
                       ((long double)p.hbar * p.pendulum_freq * p.feedback_decay) -
                   0.5L;
  CHECK(nv.n_p == doctest::Approx((double)np).epsilon(1e-8));
  CHECK(nv.n_p == doctest::Approx(3.1e8).epsilon(2e-2));

  // T0 -> 0: strength approaches the vacuum floor M hbar Omega gamma_m
  PhysicalParams cold = p;
  cold.bath_temp = 1e-15;
  NoiseVariances cv = thermal_noise_variance(cold, cold.mech_decay_rot);
  CHECK(cv.xi_m2 == doctest::Approx(p.mirror_mass * p.hbar * p.pendulum_freq *
                                    p.feedback_decay)
                        .epsilon(1e-12));

  // white and coth forms agree at 2 pi 500 Hz
  double coth = thermal_force_psd_coth(p, kTwoPi * 500.0, p.mech_decay_rot);
  CHECK(rel_err(nv.xi_m2, coth) < 1e-6);
}

TEST_CASE("mechanical solutions: rotational zero and mode ratio") {
  TwoModeSpectra s = build_spectra(table1(), 0.2);
  double dBR = std::sqrt(s.lf.Delta_BR2);

  MechanicalTransfer t0 = s.mechanical_solutions(dBR);
  double scale = std::abs(s.mechanical_solutions(0.9 * dBR).dq_x);
  CHECK(std::abs(t0.dq_x) < 1e-10 * scale);

  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(10.0, 5000.0);
  for (int i = 0; i < 20; ++i) {
    double w = kTwoPi * u(rng);
    MechanicalTransfer t = s.mechanical_solutions(w);
    complex<double> want = -s.lf.omega_BR2 / (w * w - s.lf.Delta_BR2);
    CHECK(crel(t.dphi_x / t.dq_x, want) < 1e-10);
    CHECK(crel(t.dp_x, complex<double>(0, -s.p.mirror_mass * w) * t.dq_x) < 1e-13);
    CHECK(crel(t.dPi_y, complex<double>(0, -s.p.moment_of_inertia * w) * t.dphi_y) <
          1e-13);
  }
}

TEST_CASE("output field: lossless reflection, dark port, composition oracle") {
  PhysicalParams p = table1();

  // eta = 0: output is only the false vacuum
  p.detection_eff = 0.0;
  TwoModeSpectra s0 = build_spectra(p, 0.2);
  OutputTransfer o0 = s0.output_field(kTwoPi * 300.0);
  CHECK(std::abs(o0.x_in) == 0.0);
  CHECK(std::abs(o0.y_in) == 0.0);
  CHECK(std::abs(o0.xi_m) == 0.0);
  CHECK(o0.x_prime.real() == doctest::Approx(1.0));

  // no coupling: passive cavity reflection is lossless
  p = table1();
  p.coupling = 0.0;
  TwoModeSpectra sg = build_spectra(p, 0.2);
  OutputTransfer og = sg.output_field(kTwoPi * 300.0);
  CHECK(std::norm(og.x_in) + std::norm(og.y_in) == doctest::Approx(1.0).epsilon(1e-12));

  // independent composition: input-output route built from scratch
  TwoModeSpectra s = build_spectra(table1(), 0.2);
  double w = kTwoPi * 300.0;
  {
    const PhysicalParams& q = s.p;
    double kap = q.optical_decay, Del = s.d.detuning;
    double den = kap * kap + Del * Del;
    MechanicalTransfer t = s.mechanical_solutions(w);
    // delta x = (2 G0 sqrt(nc) Delta / den) dq + sqrt(2k)(k x_in + D y_in)/den
    complex<double> bx = 2.0 * q.coupling * std::sqrt(s.n_c) * Del / den;
    double sq2k = std::sqrt(2.0 * kap);
    complex<double> dx_x = bx * t.dq_x + sq2k * kap / den;
    complex<double> dx_y = bx * t.dq_y + sq2k * Del / den;
    complex<double> dx_xi = bx * t.dq_xi;
    // x_out = x_in - sqrt(2k) delta x, X = sqrt(eta) x_out + sqrt(1-eta) x'
    complex<double> cx = std::sqrt(s.eta) * (1.0 - sq2k * dx_x);
    complex<double> cy = std::sqrt(s.eta) * (-sq2k * dx_y);
    complex<double> cxi = std::sqrt(s.eta) * (-sq2k * dx_xi);
    OutputTransfer o = s.output_field(w);
    CHECK(crel(o.x_in, cx) < 1e-10);
    CHECK(crel(o.y_in, cy) < 1e-10);
    CHECK(crel(o.xi_m, cxi) < 1e-10);
  }
}

TEST_CASE("output spectrum: shot floor, decoupled limit, positivity") {
  TwoModeSpectra s = build_spectra(table1(), 0.2);
  CHECK(s.S_XAXA(1e10) == doctest::Approx(s.C1).epsilon(1e-3));
  CHECK(s.C1 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.C1 > 0);

  PhysicalParams g = table1();
  g.coupling = 0.0;
  TwoModeSpectra sg = build_spectra(g, 0.2);
  for (double f : {3.0, 30.0, 300.0, 3000.0})
    CHECK(sg.S_XAXA(kTwoPi * f) == doctest::Approx(sg.C1).epsilon(1e-12));

  // J >= 0 over a 1e4-point grid
  for (int i = 0; i < 10000; ++i) {
    double w = -kTwoPi * 1e4 + i * (2.0 * kTwoPi * 1e4) / 9999.0;
    CHECK(s.J_of(w) >= 0.0);
  }
}

TEST_CASE("cross spectra: rotational zero, shared structure, composed oracle") {
  TwoModeSpectra s = build_spectra(table1(), 0.2);
  double dBR = std::sqrt(s.lf.Delta_BR2);
  CHECK(std::abs(s.K_of(dBR)) < 1e-8 * std::abs(s.K_of(1.5 * dBR)));

  PhysicalParams g = table1();
  g.coupling = 0.0;
  CHECK(build_spectra(g, 0.2).C1q == 0.0);

  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(5.0, 4000.0);
  for (int i = 0; i < 20; ++i) {
    double w = kTwoPi * u(rng);
    complex<double> ratio = s.L_of(w) / s.K_of(w);
    complex<double> want = -s.lf.omega_BR2 / (w * w - s.lf.Delta_BR2);
    CHECK(crel(ratio, want) < 1e-10);

    // oracle: compose S_XA,dq directly from output and mechanical transfers
    OutputTransfer o = s.output_field(w);
    MechanicalTransfer t = s.mechanical_solutions(w);
    complex<double> direct = std::conj(o.x_in) * t.dq_x * s.noise.x_in2 +
                             std::conj(o.y_in) * t.dq_y * s.noise.y_in2 +
                             std::conj(o.xi_m) * t.dq_xi * s.noise.xi_m2;
    CHECK(crel(direct, s.S_XA_dq(w)) < 1e-9);

    complex<double> direct_phi = std::conj(o.x_in) * t.dphi_x * s.noise.x_in2 +
                                 std::conj(o.y_in) * t.dphi_y * s.noise.y_in2 +
                                 std::conj(o.xi_m) * t.dphi_xi * s.noise.xi_m2;
    CHECK(crel(direct_phi, s.S_XA_dphi(w)) < 1e-9);

    // and the auto-spectrum the same way
    double direct_xx = std::norm(o.x_in) * s.noise.x_in2 +
                       std::norm(o.y_in) * s.noise.y_in2 +
                       std::norm(o.xi_m) * s.noise.xi_m2 +
                       std::norm(o.x_prime) * s.noise.x_in_prime2;
    CHECK(rel_err(direct_xx, s.S_XAXA(w)) < 1e-9);
  }
}

TEST_CASE("mode spectra: parity, tails, linearity in photon number") {
  TwoModeSpectra s = build_spectra(table1(), 0.2);
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> u(1.0, 5000.0);
  for (int i = 0; i < 50; ++i) {
    double w = kTwoPi * u(rng);
    CHECK(rel_err(s.S_dqdq(w), s.S_dqdq(-w)) < 1e-12);
    CHECK(rel_err(s.S_XAXA(w), s.S_XAXA(-w)) < 1e-12);
    CHECK(s.S_XAXA(w) > 0.0);
    CHECK(rel_err(s.S_dpdp(w),
                  s.p.mirror_mass * s.p.mirror_mass * w * w * s.S_dqdq(w)) < 1e-13);
    CHECK(s.S_dqdp(w).real() == 0.0);
    CHECK(s.S_dphidPi(w).real() == 0.0);
  }
  // integrable tail: omega^4 S_qq levels off at the drive constant
  CHECK(rel_err(std::pow(3e7, 4) * s.S_dqdq(3e7), s.Wnum) < 1e-2);

  // linearity under n_c -> lambda n_c via the laser power
  double C2_1 = s.C2, C30_1 = s.C3_0, C3x_1 = s.C3_xi;
  for (double lam : {0.5, 2.0, 3.7}) {
    PhysicalParams q = table1();
    q.laser_power *= lam;
    TwoModeSpectra sl = build_spectra(q, 0.2);
    CHECK(rel_err(sl.C2, lam * C2_1) < 1e-10);
    CHECK(rel_err(sl.C3_0, lam * lam * C30_1) < 1e-10);  // backaction part
    CHECK(rel_err(sl.C3_xi, lam * C3x_1) < 1e-10);       // thermal part
    CHECK(rel_err(sl.C3, lam * lam * C30_1 + lam * C3x_1 * sl.noise.xi_m2) < 1e-10);
  }

  // roots of F are stable for random detunings and efficiencies
  std::uniform_real_distribution<double> ud(0.01, 1.0), ue(0.5, 1.0);
  for (int i = 0; i < 20; ++i) {
    PhysicalParams q = table1();
    q.detection_eff = ue(rng);
    TwoModeSpectra sr = build_spectra(q, ud(rng));
    for (auto r : sr.F_roots) CHECK(r.imag() < 0.0);
  }
}
