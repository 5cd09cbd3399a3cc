#pragma once

#include <complex>
#include <string>
#include <vector>

#include "mirrorstate/params.hpp"
#include "mirrorstate/steady_state.hpp"

namespace mirrorstate {

// Exact (frequency-dependent, complex) coupling coefficients of the
// pendulum/rotation equations of motion. Units follow the equations of
// motion: omega_A2, Delta_B2 in 1/s^2; Delta_A2 in cm/s^2 per rad;
// omega_B2 in 1/(cm s^2).
struct ModeCouplings {
  std::complex<double> omega_A2, Delta_A2, omega_B2, Delta_B2;
};

// Low-frequency limit, split into real parts and imaginary-part
// coefficients (the latter enter multiplied by the loss factor phi).
struct LowFreqCouplings {
  double omega_AR2 = 0, Delta_AR2 = 0, omega_BR2 = 0, Delta_BR2 = 0;
  double omega_AI2 = 0, Delta_AI2 = 0, omega_BI2 = 0, Delta_BI2 = 0;
  double optical_spring = 0;  // -2 hbar G0^2 n_c Delta / (M (kappa^2+Delta^2))
};

struct NormalModes {
  double omega0_plus = 0, omega0_minus = 0;  // rad/s, plus = larger root
  double omega1_plus = 0, omega1_minus = 0;  // rad/s per unit phi
  double gamma_r_plus = 0, gamma_r_minus = 0;  // phi0 * omega1 on each branch
  // Pendulum branch (the root closer to omega_AR), with the coupling
  // correction to the dissipation dropped; this is the structural-damping
  // rate used downstream.
  double omega0_pendulum = 0;
  double gamma_r_pendulum = 0;
  double dissipation_correction = 0;  // relative size of the dropped term
  bool near_degenerate = false;
};

class ViolinResonanceError : public std::runtime_error {
 public:
  explicit ViolinResonanceError(const std::string& w) : std::runtime_error(w) {}
};

// Transverse beam wavenumbers at angular frequency omega with complex
// Young's modulus E0 (1 - i phi). Returns {k, k_e}; approx variants are the
// omega^2 << T^2 / (4 E I rho) limits k ~ sqrt(rho/T) omega, k_e ~ beta.
struct Wavenumbers {
  std::complex<double> k, k_e;
  double k_approx, k_e_approx;
};
Wavenumbers wavenumbers(const PhysicalParams& p, double omega, double phi,
                        std::vector<std::string>* warnings = nullptr);

ModeCouplings couplings_exact(const PhysicalParams& p, double delta, double omega,
                              double phi,
                              PhotonConvention conv = PhotonConvention::steady_state,
                              std::vector<std::string>* warnings = nullptr);

LowFreqCouplings couplings_lowfreq(const PhysicalParams& p, double delta,
                                   PhotonConvention conv = PhotonConvention::steady_state);

NormalModes normal_modes(const PhysicalParams& p, double delta,
                         PhotonConvention conv = PhotonConvention::steady_state);
NormalModes normal_modes(const PhysicalParams& p, const LowFreqCouplings& lf);

// Structural damping law Gamma_r(omega) = Gamma_r(Omega) Omega / omega.
double structural_damping(const PhysicalParams& p, double omega);

}  // namespace mirrorstate
