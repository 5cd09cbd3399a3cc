#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "mirrorstate/spectra.hpp"
#include "test_util.hpp"

using namespace mirrorstate;

// Coarse time-domain simulation of the coupled pendulum/rotation equations
// driven by the amplitude-quadrature vacuum noise alone; the spectral
// density of dq at one frequency must match |transfer|^2 within the
// Monte-Carlo error bars.
TEST_CASE("frequency-domain transfer matches a time-domain simulation") {
  const PhysicalParams& p = table1();
  TwoModeSpectra s = build_spectra(p, 0.2);
  const double w_probe = 2.0 * std::numbers::pi * 100.0;
  const double target = std::norm(s.mechanical_solutions(w_probe).dq_x);

  const double dt = 4e-6;
  const int nseg = 14;
  const int nstep = 1 << 16;  // ~0.26 s per segment
  std::mt19937 rng(20240811);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const double wAR2 = s.lf.omega_AR2, dAR2 = s.lf.Delta_AR2;
  const double wBR2 = s.lf.omega_BR2, dBR2 = s.lf.Delta_BR2;
  const double gm = p.feedback_decay;
  const double ax = s.drive_x;

  std::vector<double> psd(nseg);
  for (int seg = 0; seg < nseg; ++seg) {
    double q = 0, v = 0, phi = 0, vphi = 0;
    std::complex<double> acc(0, 0);
    double wsum = 0;
    for (int i = 0; i < nstep; ++i) {
      double noise = gauss(rng) / std::sqrt(dt);  // unit white spectral density
      double aq = -wAR2 * q - gm * v + dAR2 * phi + ax * noise;
      double aphi = wBR2 * q - dBR2 * phi;
      v += aq * dt;
      q += v * dt;
      vphi += aphi * dt;
      phi += vphi * dt;
      double t = i * dt;
      double hann = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * i / (nstep - 1.0)));
      acc += q * hann * std::exp(std::complex<double>(0.0, w_probe * t));
      wsum += hann * hann;
    }
    psd[seg] = std::norm(acc * dt) / (wsum * dt);
  }
  double mean = 0;
  for (double v : psd) mean += v;
  mean /= nseg;
  double var = 0;
  for (double v : psd) var += (v - mean) * (v - mean);
  double sem = std::sqrt(var / (nseg - 1.0) / nseg);

  // exponentially distributed periodogram bins: wide but principled bars
  CHECK(std::abs(mean - target) < 5.0 * sem + 0.05 * target);
  CHECK(mean == doctest::Approx(target).epsilon(0.5));
}
