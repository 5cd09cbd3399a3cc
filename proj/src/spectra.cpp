#include "mirrorstate/spectra.hpp"

#include <cmath>
#include <stdexcept>

namespace mirrorstate {

using num::cplx;
using num::Poly;
using num::real;

NoiseVariances thermal_noise_variance(const PhysicalParams& p, double gamma_eff) {
  NoiseVariances nv;
  nv.x_in2 = 2.0 * p.thermal_photons + 1.0;
  nv.y_in2 = nv.x_in2;
  nv.x_in_prime2 = 1.0;
  long double x = (long double)p.hbar * p.pendulum_freq * p.feedback_decay /
                  ((long double)p.k_B * p.bath_temp * gamma_eff);
  nv.n_p = (double)(1.0L / std::expm1(x));
  nv.xi_m2 = (double)((long double)p.mirror_mass * p.hbar * p.pendulum_freq *
                      p.feedback_decay * (2.0L * (long double)nv.n_p + 1.0L));
  return nv;
}

double thermal_force_psd_coth(const PhysicalParams& p, double omega, double gamma_eff) {
  long double a = (long double)p.hbar * omega * p.feedback_decay /
                  (2.0L * (long double)p.k_B * p.bath_temp * gamma_eff);
  return (double)((long double)p.mirror_mass * p.hbar * p.feedback_decay * omega *
                  (1.0L / std::tanh(a) + 1.0L));
}

namespace {

// Scaled susceptibility roots. With gamma_m tiny against the mechanical
// frequencies the rotational pair sits within ~1e-11 rad/s of the real
// axis, far below what Newton iteration on the quartic can resolve in its
// imaginary part; that pair is taken from the gamma_m perturbation series
// instead (the next correction enters at relative order ~1e-14).
struct RootBuild {
  std::vector<cplx> roots;
  std::array<PoleMode, 4> mode;
};

RootBuild susceptibility_roots(real a2, real d2, real c0, real g, real wAR2_hat) {
  real disc = a2 * a2 + 4.0L * c0;
  if (disc < 0) throw std::domain_error("complex normal-mode frequencies");
  real rt = std::sqrt(disc);
  real yp = 0.5L * (a2 + rt);
  real ym = -c0 / yp;  // product of roots of y^2 - a2 y - c0
  if (!(yp > 0) || !(ym > 0))
    throw std::domain_error("unstable mechanical system: omega0^2 <= 0");

  auto F0 = [&](real x) { return ((-x * x + a2) * x * x) + c0; };
  auto dF0 = [&](real x) { return (-4.0L * x * x + 2.0L * a2) * x; };

  RootBuild out;
  int idx = 0;
  for (real y : {yp, ym}) {
    real x0 = std::sqrt(y);
    // polish the gamma = 0 real root
    for (int it = 0; it < 6; ++it) {
      real f = F0(x0), df = dF0(x0);
      if (df == 0) break;
      x0 -= f / df;
    }
    PoleMode mode = std::abs(y - wAR2_hat) <= std::abs((yp == y ? ym : yp) - wAR2_hat)
                        ? PoleMode::pendulum
                        : PoleMode::rotational;
    for (real sgn : {+1.0L, -1.0L}) {
      real x = sgn * x0;
      cplx d1 = -cplx(0, 1) * g * x * (d2 - x * x) / dF0(x);
      cplx d2nd = -d1 * (0.5L * (-12.0L * x * x + 2.0L * a2) * d1 +
                         cplx(0, 1) * g * (d2 - 3.0L * x * x)) /
                  dF0(x);
      cplx root = cplx(x) + d1 + d2nd;
      out.roots.push_back(root);
      out.mode[idx++] = mode;
    }
  }

  // Full-quartic Newton polish where the imaginary part is well conditioned.
  Poly Fh(std::vector<cplx>{cplx(c0), cplx(0, 1) * g * d2, cplx(a2), cplx(0, -1) * g,
                            cplx(-1)});
  Poly dFh = Fh.derivative();
  for (auto& r : out.roots) {
    if (std::abs(r.imag()) > 1e-6L * std::abs(r)) {
      r = num::polish_root([&](cplx z) { return Fh(z); },
                           [&](cplx z) { return dFh(z); }, r);
    }
    if (!(r.imag() < 0))
      throw std::domain_error("susceptibility root not in the lower half plane");
  }
  return out;
}

}  // namespace

TwoModeSpectra build_spectra(const PhysicalParams& p, double delta,
                             PhotonConvention conv) {
  TwoModeSpectra s;
  s.p = p;
  s.d = derive_constants(p);
  s.d.detuning = -2.0 * p.optical_decay * delta;  // this run's operating point
  s.delta = delta;
  s.eta = p.detection_eff;
  s.convention = conv;
  s.lf = couplings_lowfreq(p, delta, conv);
  s.n_c = photon_number(p, delta, conv);
  s.noise = thermal_noise_variance(p, p.mech_decay_rot);

  const long double kappa = p.optical_decay, Delta = s.d.detuning;
  const long double den = kappa * kappa + Delta * Delta;
  const long double M = p.mirror_mass;
  const long double hbar = p.hbar, G0 = p.coupling;
  const long double eta = s.eta;
  const long double x2 = s.noise.x_in2, y2 = s.noise.y_in2, xp2 = s.noise.x_in_prime2;
  const long double Xi = s.noise.xi_m2;
  const long double nc = s.n_c, sq_nc = std::sqrt(nc);

  const long double r = (Delta * Delta - kappa * kappa) / den;  // 1 - 2 k^2/den
  const long double q = 2.0L * kappa * Delta / den;
  const long double sq2k = std::sqrt(2.0L * kappa);

  s.C1 = (double)(eta * (r * r * x2 + q * q * y2) + (1.0L - eta) * xp2);
  const long double back = 4.0L * hbar * G0 * G0 * nc * Delta / (M * den * den);
  s.C2 = (double)(eta * back * kappa * kappa *
                  (-r * x2 + 2.0L * Delta * Delta / den * y2));
  s.C3_0 = (double)(eta * back * back * kappa * kappa *
                    (kappa * kappa * x2 + Delta * Delta * y2));
  s.C3_xi = (double)(eta * (2.0L * G0 * sq_nc * Delta * sq2k / den) *
                     (2.0L * G0 * sq_nc * Delta * sq2k / den) / (M * M));
  s.C3 = (double)((long double)s.C3_0 + (long double)s.C3_xi * Xi);

  const long double g1 = hbar * G0 * sq_nc * sq2k / (M * den);
  s.drive_x = (double)(g1 * kappa);
  s.drive_y = (double)(g1 * Delta);
  s.W_0 = (double)((long double)s.drive_x * s.drive_x * x2 +
                   (long double)s.drive_y * s.drive_y * y2);
  s.W_xi = (double)(1.0L / (M * M));
  s.Wnum = (double)((long double)s.W_0 + (long double)s.W_xi * Xi);

  s.C1q = (double)(std::sqrt(eta) * g1 * (kappa * r * x2 - Delta * q * y2));
  s.C2q = (double)(-std::sqrt(eta) *
                       (2.0L * hbar * hbar * G0 * G0 * G0 * nc * sq_nc *
                        sq2k * sq2k * sq2k * Delta / (M * M * den * den * den)) *
                       (kappa * kappa * x2 + Delta * Delta * y2) -
                   std::sqrt(eta) * (2.0L * G0 * sq_nc * Delta * sq2k / den) * Xi /
                       (M * M));
  // rho_q from the reduced expression; stays finite as n_c -> 0 though it is
  // only used when the measurement term is present at all.
  if (s.n_c > 0 && G0 > 0) {
    s.rho_0 = (double)(4.0L * hbar * G0 * G0 * nc * Delta / (M * den));
    s.rho_xi = (double)(2.0L * Delta / (M * hbar * kappa * x2));
  } else {
    s.rho_0 = s.rho_xi = 0.0;
  }
  s.rho_q = (double)((long double)s.rho_0 + (long double)s.rho_xi * Xi);

  // Susceptibility in scaled units.
  const long double wAR2 = s.lf.omega_AR2, dBR2 = s.lf.Delta_BR2;
  const long double cross = (long double)s.lf.Delta_AR2 * s.lf.omega_BR2;
  const long double c0_dim = cross - wAR2 * dBR2;
  long double W0 = std::pow(std::abs(c0_dim), 0.25L);
  if (!(W0 > 0)) W0 = std::sqrt(std::sqrt(wAR2 * dBR2));
  s.W0 = (double)W0;

  const long double a2h = (wAR2 + dBR2) / (W0 * W0);
  const long double d2h = dBR2 / (W0 * W0);
  const long double c0h = c0_dim / (W0 * W0 * W0 * W0);
  const long double gh = (long double)p.feedback_decay / W0;

  s.F_hat = Poly(std::vector<cplx>{cplx(c0h), cplx(0, 1) * gh * d2h, cplx(a2h),
                                   cplx(0, -1) * gh, cplx(-1)});
  RootBuild rb = susceptibility_roots(a2h, d2h, c0h, gh, wAR2 / (W0 * W0));
  s.roots_hat = rb.roots;
  s.root_mode = rb.mode;

  {
    const long double gm = p.feedback_decay;
    s.F_coeffs[4] = {-1.0, 0.0};
    s.F_coeffs[3] = {0.0, (double)(-gm)};
    s.F_coeffs[2] = {(double)(wAR2 + dBR2), 0.0};
    s.F_coeffs[1] = {0.0, (double)(gm * dBR2)};
    s.F_coeffs[0] = {(double)c0_dim, 0.0};
  }
  for (int i = 0; i < 4; ++i)
    s.F_roots[i] = std::complex<double>((double)(s.roots_hat[i].real() * W0),
                                        (double)(s.roots_hat[i].imag() * W0));
  return s;
}

std::complex<double> TwoModeSpectra::F_of(double omega) const {
  long double w = omega;
  std::complex<long double> lead(w * w, (long double)p.feedback_decay * w);
  std::complex<long double> v =
      -(lead - (long double)lf.omega_AR2) * (w * w - (long double)lf.Delta_BR2) +
      (long double)lf.Delta_AR2 * lf.omega_BR2;
  return {(double)v.real(), (double)v.imag()};
}

double TwoModeSpectra::absF2(double omega) const {
  auto f = F_of(omega);
  return (double)((long double)f.real() * f.real() + (long double)f.imag() * f.imag());
}

double TwoModeSpectra::J_of(double omega) const {
  long double w = omega;
  long double u = w * w - (long double)lf.Delta_BR2;
  auto f = F_of(omega);
  long double reF = f.real();
  return (double)((long double)absF2(omega) + (long double)C2 / C1 * u * 2.0L * reF +
                  (long double)C3 / C1 * u * u);
}

std::complex<double> TwoModeSpectra::K_of(double omega) const {
  long double w = omega;
  long double u = w * w - (long double)lf.Delta_BR2;
  auto f = F_of(omega);
  std::complex<long double> Fc(f.real(), -(long double)f.imag());
  std::complex<long double> v = u * Fc + (long double)rho_q * u * u;
  return {(double)v.real(), (double)v.imag()};
}

std::complex<double> TwoModeSpectra::L_of(double omega) const {
  long double w = omega;
  long double u = w * w - (long double)lf.Delta_BR2;
  auto f = F_of(omega);
  std::complex<long double> Fc(f.real(), -(long double)f.imag());
  std::complex<long double> v =
      -(long double)lf.omega_BR2 * (Fc + (long double)rho_q * u);
  return {(double)v.real(), (double)v.imag()};
}

double TwoModeSpectra::S_XAXA(double omega) const { return C1 * J_of(omega) / absF2(omega); }

std::complex<double> TwoModeSpectra::S_XA_dq(double omega) const {
  return C1q * K_of(omega) / absF2(omega);
}

std::complex<double> TwoModeSpectra::S_XA_dphi(double omega) const {
  return C1q * L_of(omega) / absF2(omega);
}

double TwoModeSpectra::S_dqdq(double omega) const {
  long double u = (long double)omega * omega - lf.Delta_BR2;
  return (double)(u * u * Wnum / absF2(omega));
}

double TwoModeSpectra::S_dphidphi(double omega) const {
  long double b = lf.omega_BR2;
  return (double)(b * b * Wnum / absF2(omega));
}

double TwoModeSpectra::S_dpdp(double omega) const {
  long double mw = (long double)p.mirror_mass * omega;
  return (double)(mw * mw * S_dqdq(omega));
}

double TwoModeSpectra::S_dPidPi(double omega) const {
  long double jw = (long double)p.moment_of_inertia * omega;
  return (double)(jw * jw * S_dphidphi(omega));
}

std::complex<double> TwoModeSpectra::S_dqdp(double omega) const {
  return std::complex<double>(0.0, p.mirror_mass * omega * S_dqdq(omega));
}

std::complex<double> TwoModeSpectra::S_dphidPi(double omega) const {
  return std::complex<double>(0.0, p.moment_of_inertia * omega * S_dphidphi(omega));
}

MechanicalTransfer TwoModeSpectra::mechanical_solutions(double omega) const {
  std::complex<long double> F(F_of(omega).real(), F_of(omega).imag());
  long double u = (long double)omega * omega - lf.Delta_BR2;
  std::complex<long double> chi_q = u / F;
  std::complex<long double> chi_phi = -(long double)lf.omega_BR2 / F;

  auto cd = [](std::complex<long double> z) {
    return std::complex<double>((double)z.real(), (double)z.imag());
  };
  MechanicalTransfer t;
  t.dq_x = cd(chi_q * (long double)drive_x);
  t.dq_y = cd(chi_q * (long double)drive_y);
  t.dq_xi = cd(chi_q / (long double)p.mirror_mass);
  t.dphi_x = cd(chi_phi * (long double)drive_x);
  t.dphi_y = cd(chi_phi * (long double)drive_y);
  t.dphi_xi = cd(chi_phi / (long double)p.mirror_mass);
  std::complex<double> miw(0.0, -p.mirror_mass * omega);
  std::complex<double> jiw(0.0, -p.moment_of_inertia * omega);
  t.dp_x = miw * t.dq_x;
  t.dp_y = miw * t.dq_y;
  t.dp_xi = miw * t.dq_xi;
  t.dPi_x = jiw * t.dphi_x;
  t.dPi_y = jiw * t.dphi_y;
  t.dPi_xi = jiw * t.dphi_xi;
  return t;
}

OutputTransfer TwoModeSpectra::output_field(double omega) const {
  const long double kappa = p.optical_decay, Delta = d.detuning;
  const long double den = kappa * kappa + Delta * Delta;
  const long double M = p.mirror_mass;
  std::complex<long double> F(F_of(omega).real(), F_of(omega).imag());
  long double u = (long double)omega * omega - lf.Delta_BR2;
  std::complex<long double> chi_q = u / F;
  long double se = std::sqrt((long double)eta);

  long double r = (Delta * Delta - kappa * kappa) / den;
  long double q = 2.0L * kappa * Delta / den;
  long double back = 4.0L * (long double)p.hbar * p.coupling * p.coupling * n_c * Delta /
                     (M * den * den);

  OutputTransfer o;
  auto cd = [](std::complex<long double> z) {
    return std::complex<double>((double)z.real(), (double)z.imag());
  };
  o.x_in = cd(se * (r - chi_q * back * kappa * kappa));
  o.y_in = cd(se * (-q - chi_q * back * kappa * Delta));
  o.xi_m = cd(-se * 2.0L * (long double)p.coupling * std::sqrt((long double)n_c) * Delta *
              std::sqrt(2.0L * kappa) / den * chi_q / M);
  o.x_prime = {(double)std::sqrt(1.0L - (long double)eta), 0.0};
  return o;
}

double RationalSpectrum::operator()(double omega) const {
  cplx f = F(cplx(omega));
  real a2 = f.real() * f.real() + f.imag() * f.imag();
  cplx n = numerator(cplx(omega));
  return (double)((real)scale * n.real() / a2);
}

RationalSpectrum TwoModeSpectra::output_spectrum() const {
  RationalSpectrum rs;
  rs.scale = C1;
  // numerator = J(w) as an even real polynomial; build from structure parts
  std::vector<cplx> fc(5);
  for (int k = 0; k <= 4; ++k) fc[k] = cplx(F_coeffs[k].real(), F_coeffs[k].imag());
  Poly F(fc);
  Poly Fc = F.conj_coeffs();
  Poly u(std::vector<cplx>{cplx(-(real)lf.Delta_BR2), cplx(0), cplx(1)});
  Poly J = F * Fc + (F + Fc) * u * cplx((real)C2 / C1) + u * u * cplx((real)C3 / C1);
  rs.numerator = J;
  rs.F = F;
  return rs;
}

}  // namespace mirrorstate
