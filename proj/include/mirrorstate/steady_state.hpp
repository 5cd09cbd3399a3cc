#pragma once

#include "mirrorstate/params.hpp"

namespace mirrorstate {

// Two published forms of the intracavity photon number exist side by side:
// |E|^2 / (kappa^2 + Delta^2) with Delta = -2 kappa delta, and
// |E|^2 / (kappa^2 (1 + delta^2)). They differ (1 + 4 delta^2 vs
// 1 + delta^2); the first is consistent with the steady-state cavity
// equation and is the default everywhere. The second is kept for
// figure matching only.
enum class PhotonConvention { steady_state, quadratic_delta };

struct SteadyState {
  double photon_number = 0;  // n_c = |a|^2
  double alpha_s = 0;        // sqrt(n_c)
  double theta = 0;          // phase of the steady cavity amplitude
  // Beam displacement Xbar(sigma) = A' e^{beta sigma} + B' e^{-beta sigma}
  // + C' sigma + D'. A' underflows to zero for beta*ell >> 1; evaluation
  // uses an overflow-free ratio form, never these coefficients directly.
  double A = 0, B = 0, C = 0, D = 0;
  double qbar = 0;         // mirror center-of-mass offset, exact closed form
  double qbar_approx = 0;  // hbar G0 (ell + h) n_c / T
  double phibar = 0;       // rotation offset
};

double photon_number(const PhysicalParams& p, double delta,
                     PhotonConvention conv = PhotonConvention::steady_state);

// Exact closed-form beam displacement at 0 <= sigma <= ell (ratio form,
// valid for arbitrarily large beta*ell). Throws std::out_of_range outside.
double beam_profile_exact(const PhysicalParams& p, double delta, double sigma,
                          PhotonConvention conv = PhotonConvention::steady_state);

// The beta*ell >> 1 approximation hbar G0 n_c sigma / T.
double beam_profile_approx(const PhysicalParams& p, double delta, double sigma,
                           PhotonConvention conv = PhotonConvention::steady_state);

SteadyState steady_state(const PhysicalParams& p, double delta,
                         PhotonConvention conv = PhotonConvention::steady_state);

}  // namespace mirrorstate
