#include "mirrorstate/two_mode.hpp"

#include <cmath>
#include <stdexcept>

namespace mirrorstate {

namespace {

using cd = std::complex<long double>;

cd tanh_safe(cd v) {
  if (v.real() > 20.0L) return cd(1.0L, 0.0L);
  return std::tanh(v);
}

cd sech_safe(cd v) {
  if (v.real() > 11350.0L) return cd(0.0L, 0.0L);
  return 1.0L / std::cosh(v);
}

}  // namespace

Wavenumbers wavenumbers(const PhysicalParams& p, double omega, double phi,
                        std::vector<std::string>* warnings) {
  DerivedConstants d = derive_constants(p);
  long double T = d.tension;
  cd EI = cd(p.flexural_rigidity) * cd(1.0L, -(long double)phi);
  long double x = 4.0L * p.flexural_rigidity * p.beam_density * (long double)omega * omega;
  if (warnings && x > 0.01L * T * T)
    warnings->push_back("omega^2 not small against T^2/(4 E I rho); "
                        "low-frequency beam approximation degrades");

  cd s = std::sqrt(cd(T * T) + cd(4.0L) * EI * cd((long double)p.beam_density) *
                                   cd((long double)omega * omega));
  // k via  (-T + s) = 4 EI rho w^2 / (T + s)  to avoid cancellation at small w
  cd k = std::sqrt(cd(4.0L) * EI * cd((long double)p.beam_density) *
                   cd((long double)omega * omega) / ((cd(T) + s) * cd(2.0L) * EI));
  cd ke = std::sqrt((cd(T) + s) / (cd(2.0L) * EI));

  Wavenumbers out;
  out.k = std::complex<double>((double)k.real(), (double)k.imag());
  out.k_e = std::complex<double>((double)ke.real(), (double)ke.imag());
  out.k_approx = std::sqrt(p.beam_density / (double)T) * omega;
  out.k_e_approx = d.beta;
  return out;
}

ModeCouplings couplings_exact(const PhysicalParams& p, double delta, double omega,
                              double phi, PhotonConvention conv,
                              std::vector<std::string>* warnings) {
  DerivedConstants d = derive_constants(p);
  Wavenumbers wn = wavenumbers(p, omega, phi, warnings);
  cd k(wn.k.real(), wn.k.imag());
  cd ke(wn.k_e.real(), wn.k_e.imag());
  cd EI = cd(p.flexural_rigidity) * cd(1.0L, -(long double)phi);
  long double ell = p.beam_length, h = p.offset;
  long double M = p.mirror_mass, J = p.moment_of_inertia;

  cd u = k * cd(ell), v = ke * cd(ell);
  cd su = std::sin(u), cu = std::cos(u);
  cd th = tanh_safe(v), sch = sech_safe(v);
  cd k2 = k * k, ke2 = ke * ke;

  // Everything below is divided through by cosh(k_e ell) so the huge
  // hyperbolics never appear explicitly.
  cd detC = cd(2.0L) * k * (sch - cu) + (ke2 - k2) / ke * su * th;
  {
    long double scale = std::abs(cd(2.0L) * k * cu) +
                        std::abs((ke2 - k2) / ke * su * th) + std::abs(2.0L * k * sch);
    if (std::abs(detC) < 1e-9L * scale)
      throw ViolinResonanceError("det C ~ 0: beam (violin) resonance at omega = " +
                                 std::to_string(omega));
  }

  cd S1 = k * su + ke * cu * th;  // (k sin u cosh v + k_e cos u sinh v)/cosh v

  long double n_c = photon_number(p, delta, conv);
  long double Delta = -2.0L * p.optical_decay * delta;
  cd rad = cd(2.0L * p.hbar * (long double)p.coupling * p.coupling * n_c * Delta) /
           (cd(p.optical_decay, -(long double)omega) * cd(p.optical_decay, -(long double)omega) +
            cd(Delta * Delta));

  cd wA2 = -(cd(1.0L) / M) * (-(EI * k / detC) * (k2 + ke2) * S1 + rad);
  cd dA2 = (cd(1.0L) / M) *
           (cd(-d.tension) +
            (EI / detC) * (k * (ke2 - k2) * sch + (ke2 * ke2 + k2 * k2) / ke * su * th -
                           k * (ke2 - k2) * cu + cd(h) * k * (k2 + ke2) * S1));
  cd wB2 = -(EI / J) * (k / detC) *
           ((ke2 - k2) * sch - cd(2.0L) * k * ke * su * th - (ke2 - k2) * cu -
            cd(h) * (k2 + ke2) * S1);
  cd dB2 = (EI / J) * (cd(1.0L) / detC) * (k2 + ke2) / ke *
           (ke * (cd(1.0L) + cd(h * h) * k2) * su +
            (k * (cd(h * h) * ke2 - cd(1.0L)) * cu + cd(h) * (k2 + ke2) * su) * th);

  auto dn = [](cd z) {
    return std::complex<double>((double)z.real(), (double)z.imag());
  };
  return ModeCouplings{dn(wA2), dn(dA2), dn(wB2), dn(dB2)};
}

LowFreqCouplings couplings_lowfreq(const PhysicalParams& p, double delta,
                                   PhotonConvention conv) {
  DerivedConstants d = derive_constants(p);
  long double T = d.tension, ell = p.beam_length, h = p.offset;
  long double M = p.mirror_mass, J = p.moment_of_inertia;
  long double s = std::sqrt((long double)p.flexural_rigidity / T);  // = 1/beta
  long double n_c = photon_number(p, delta, conv);
  long double Delta = -2.0L * p.optical_decay * delta;
  long double k2D2 =
      (long double)p.optical_decay * p.optical_decay + Delta * Delta;

  LowFreqCouplings lf;
  lf.optical_spring =
      (double)(-2.0L * p.hbar * (long double)p.coupling * p.coupling * n_c * Delta /
               (M * k2D2));
  lf.omega_AR2 = (double)(T / (M * ell) * (1.0L + 2.0L / ell * s) + lf.optical_spring);
  lf.omega_AI2 = (double)(-T / (M * ell * ell) * s);
  lf.Delta_AR2 = (double)(T * h / (M * ell) * (1.0L + (1.0L / h + 2.0L / ell) * s));
  lf.Delta_AI2 = (double)(-(2.0L * h + ell) * T / (2.0L * M * ell * ell) * s);
  lf.omega_BR2 = (double)(T * h / (J * ell) * (1.0L + (1.0L / h + 2.0L / ell) * s));
  lf.omega_BI2 = (double)(-(2.0L * h + ell) * T / (2.0L * J * ell * ell) * s);
  lf.Delta_BR2 =
      (double)(T * h / J * (1.0L + h / ell + (1.0L / h + 2.0L / ell) * s));
  lf.Delta_BI2 = (double)(-(2.0L * h + ell) * T / (2.0L * J * ell) * s);
  return lf;
}

NormalModes normal_modes(const PhysicalParams& p, const LowFreqCouplings& lf) {
  long double wa = lf.omega_AR2, db = lf.Delta_BR2;
  long double cross = (long double)lf.Delta_AR2 * lf.omega_BR2;
  long double disc = (wa - db) * (wa - db) + 4.0L * cross;
  if (disc < 0)
    throw std::domain_error("negative discriminant in normal-mode frequencies");
  long double rt = std::sqrt(disc);

  NormalModes nm;
  nm.near_degenerate = rt < 1e-9L * (wa + db);
  long double w0p2 = 0.5L * (db + wa + rt);
  long double w0m2 = 0.5L * (db + wa - rt);
  if (w0m2 <= 0)
    throw std::domain_error("coupled system unstable: omega0_minus^2 <= 0");
  nm.omega0_plus = (double)std::sqrt(w0p2);
  nm.omega0_minus = (double)std::sqrt(w0m2);

  auto omega1 = [&](long double w02, long double w0) {
    long double num = -w02 * ((long double)lf.Delta_BI2 + lf.omega_AI2) +
                      db * lf.omega_AI2 + (long double)lf.Delta_BI2 * wa -
                      (long double)lf.Delta_AR2 * lf.omega_BI2 -
                      (long double)lf.Delta_AI2 * lf.omega_BR2;
    long double den = 2.0L * w0 * (2.0L * w02 - wa - db);
    return num / den;
  };
  nm.omega1_plus = (double)omega1(w0p2, nm.omega0_plus);
  nm.omega1_minus = (double)omega1(w0m2, nm.omega0_minus);
  nm.gamma_r_plus = p.loss_factor * nm.omega1_plus;
  nm.gamma_r_minus = p.loss_factor * nm.omega1_minus;

  bool plus_is_pendulum = std::abs(w0p2 - wa) <= std::abs(w0m2 - wa);
  nm.omega0_pendulum = plus_is_pendulum ? nm.omega0_plus : nm.omega0_minus;
  nm.gamma_r_pendulum =
      p.loss_factor * (-lf.omega_AI2) / (2.0 * nm.omega0_pendulum);
  nm.dissipation_correction =
      (double)(p.beam_length * std::sqrt((long double)p.mirror_mass / p.moment_of_inertia) *
               (1.0L + 2.0L * p.offset / p.beam_length) *
               std::sqrt((long double)lf.Delta_AR2 * lf.omega_BR2) / (wa - db));
  return nm;
}

NormalModes normal_modes(const PhysicalParams& p, double delta, PhotonConvention conv) {
  return normal_modes(p, couplings_lowfreq(p, delta, conv));
}

double structural_damping(const PhysicalParams& p, double omega) {
  if (!(omega > 0)) throw std::domain_error("structural_damping requires omega > 0");
  return p.mech_decay_rot * p.pendulum_freq / omega;
}

}  // namespace mirrorstate
