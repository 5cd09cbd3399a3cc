#pragma once

#include <array>
#include <complex>
#include <vector>

#include "mirrorstate/params.hpp"
#include "mirrorstate/poly.hpp"
#include "mirrorstate/steady_state.hpp"
#include "mirrorstate/two_mode.hpp"

namespace mirrorstate {

enum class PoleMode { pendulum, rotational };

// Vacuum-normalized quadrature variances and the flat thermal-force
// strength. The force spectrum is flattened at its value near the bare
// pendulum frequency; the coth form is kept only to validate the flattening.
struct NoiseVariances {
  double x_in2 = 1, y_in2 = 1, x_in_prime2 = 1;
  double xi_m2 = 0;  // M hbar Omega gamma_m (2 n_p + 1), CGS
  double n_p = 0;    // Bose occupation at the feedback-cooled effective temperature
};

// gamma_eff is the decay rate paired with the thermal force by the
// fluctuation-dissipation relation: Gamma_r(Omega) for the beam model,
// Gamma(Omega) (optionally scaled) for the point-mass model.
NoiseVariances thermal_noise_variance(const PhysicalParams& p, double gamma_eff);
double thermal_force_psd_coth(const PhysicalParams& p, double omega, double gamma_eff);

struct MechanicalTransfer {
  std::complex<double> dq_x, dq_y, dq_xi;
  std::complex<double> dphi_x, dphi_y, dphi_xi;
  std::complex<double> dp_x, dp_y, dp_xi;
  std::complex<double> dPi_x, dPi_y, dPi_xi;
};

struct OutputTransfer {
  std::complex<double> x_in, y_in, xi_m, x_prime;
};

// Rational spectral density: scale * numerator(omega) / |F(omega)|^2 with a
// real, even numerator polynomial.
struct RationalSpectrum {
  double scale = 0;
  num::Poly numerator;          // real coefficients, even powers, in omega
  num::Poly F;                  // dimensional complex quartic
  double operator()(double omega) const;
};

// Frequency-domain model of the driven two-mode system with all constants
// needed for spectra, filters and covariances.
struct TwoModeSpectra {
  PhysicalParams p;
  DerivedConstants d;
  double delta = 0, eta = 1;
  PhotonConvention convention = PhotonConvention::steady_state;
  LowFreqCouplings lf;
  double n_c = 0;
  NoiseVariances noise;

  // Output/correlation constants (input variances folded in).
  double C1 = 0, C2 = 0, C3 = 0;  // S_XAXA = C1 J / |F|^2
  double C1q = 0, C2q = 0;        // S_XA,dq = C1q K / |F|^2
  double rho_q = 0;               // C2q / C1q
  double drive_x = 0, drive_y = 0;  // q-equation amplitudes of x_in, y_in
  double Wnum = 0;  // drive_x^2 x2 + drive_y^2 y2 + xi_m2/M^2
  // Splits into thermal-force-independent part and the coefficient of the
  // thermal strength xi: C3 = C3_0 + xi*C3_xi, and likewise for rho_q and
  // Wnum. The covariance engine uses these to apply the structural 1/omega
  // law pole by pole.
  double C3_0 = 0, C3_xi = 0;
  double rho_0 = 0, rho_xi = 0;
  double W_0 = 0, W_xi = 0;

  // Susceptibility F(omega) = -(w^2 + i gm w - wAR^2)(w^2 - dBR^2) + dAR^2 wBR^2,
  // dimensional and in scaled units x = omega / W0 (leading coefficient -1).
  double W0 = 0;
  num::Poly F_hat;                     // scaled coefficients
  std::vector<num::cplx> roots_hat;    // 4 roots, Im < 0
  std::array<PoleMode, 4> root_mode{};
  std::array<std::complex<double>, 5> F_coeffs{};  // dimensional, c[k] of w^k
  std::array<std::complex<double>, 4> F_roots{};   // dimensional

  // Evaluators (dimensional, omega in rad/s).
  std::complex<double> F_of(double omega) const;
  double absF2(double omega) const;
  double J_of(double omega) const;
  std::complex<double> K_of(double omega) const;
  std::complex<double> L_of(double omega) const;
  double S_XAXA(double omega) const;
  std::complex<double> S_XA_dq(double omega) const;
  std::complex<double> S_XA_dphi(double omega) const;
  double S_dqdq(double omega) const;
  double S_dphidphi(double omega) const;
  double S_dpdp(double omega) const;
  double S_dPidPi(double omega) const;
  std::complex<double> S_dqdp(double omega) const;
  std::complex<double> S_dphidPi(double omega) const;

  MechanicalTransfer mechanical_solutions(double omega) const;
  OutputTransfer output_field(double omega) const;

  RationalSpectrum output_spectrum() const;  // S_XAXA as RationalSpectrum
};

TwoModeSpectra build_spectra(const PhysicalParams& p, double delta,
                             PhotonConvention conv = PhotonConvention::steady_state);

}  // namespace mirrorstate
