#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace mirrorstate {

// Physical parameter record, CGS units throughout. All frequency-like
// quantities are stored as angular frequencies (rad/s); the config file
// holds them in Hz and the loader multiplies by 2*pi.
struct PhysicalParams {
  double laser_power = 0;       // P, erg/s
  double optical_decay = 0;     // kappa, rad/s
  double cavity_freq = 0;       // omega_c ~ omega_0, rad/s
  double detuning_norm = 0;     // delta = -Delta/(2 kappa), dimensionless
  double mirror_mass = 0;       // M, g
  double cavity_length = 0;     // L, cm
  double beam_length = 0;       // ell, cm
  double offset = 0;            // h, distance fixing point <-> center of mass, cm
  double pendulum_freq = 0;     // Omega, rad/s
  double moment_of_inertia = 0; // J, g cm^2
  double flexural_rigidity = 0; // E0*I, g cm^3 / s^2
  double loss_factor = 0;       // phi0, dimensionless, in (0,1)
  double beam_density = 0;      // rho, g/cm
  double coupling = 0;          // G0, rad/s per cm
  double bath_temp = 0;         // T0, K
  double mech_decay = 0;        // Gamma(Omega), pendulum-only decay, rad/s
  double mech_decay_rot = 0;    // Gamma_r(Omega), decay including rotation, rad/s
  double feedback_decay = 0;    // gamma_m, effective decay under feedback, rad/s
  double thermal_photons = 0;   // N(omega_c), dimensionless
  double detection_eff = 1.0;   // eta in [0,1]
  double gravity = 0;           // g, cm/s^2
  double hbar = 0;              // g cm^2 / s
  double k_B = 0;               // g cm^2 / (K s^2)
  double c = 0;                 // cm/s
};

// Constants derived once from the parameter record.
struct DerivedConstants {
  double tension = 0;         // T = M*g, dyn
  double beta = 0;            // sqrt(T / E0 I), 1/cm
  double drive_amplitude = 0; // |E| = sqrt(2 P kappa / (hbar omega_0)), 1/s
  double detuning = 0;        // Delta = -2 kappa delta, rad/s
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct LoadResult {
  PhysicalParams params;
  std::vector<std::string> warnings;
};

// Parse a key = value document (UTF-8, '#' comments). Unknown keys are
// rejected; all keys except detection_eff are required. detection_eff
// defaults to 1.0 with a warning.
LoadResult load_params(const std::string& config_text);
LoadResult load_params_file(const std::string& path);

// Serialize so that load_params(save_config(p)) reproduces p bit for bit.
std::string save_config(const PhysicalParams& p);

// T, beta, |E|, Delta. Appends a warning when beta*ell < 100 (the closed-form
// steady state assumes beta*ell >> 1).
DerivedConstants derive_constants(const PhysicalParams& p,
                                  std::vector<std::string>* warnings = nullptr);

}  // namespace mirrorstate
