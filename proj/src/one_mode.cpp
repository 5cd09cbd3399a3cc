#include "mirrorstate/one_mode.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

#include "mirrorstate/detail/kernel.hpp"

namespace mirrorstate {

using num::cplx;
using num::Poly;
using num::real;

namespace {

double dd(numq::qreal v) { return (double)v; }
std::complex<double> dc(numq::qcplx v) { return {(double)v.re, (double)v.im}; }

OneModeParams export_params(const detail::OneModeKernel& k, const PhysicalParams& p,
                            double delta, double N) {
  OneModeParams om;
  om.delta = delta;
  om.N = N;
  om.gamma_m = p.feedback_decay;
  om.gamma_eff = N * p.mech_decay;
  om.noise = thermal_noise_variance(p, om.gamma_eff);
  om.n_c = photon_number(p, delta);
  om.omega_m2 = dd(k.wm2h * k.W0 * k.W0);
  om.C1 = dd(k.C1);
  om.C1q = dd(k.C1q);
  om.C2 = dd(k.r2 * k.W0 * k.W0 * k.C1);
  om.C3 = dd(k.r3 * k.W0 * k.W0 * k.W0 * k.W0 * k.C1);
  om.rho_q = dd(k.rho * k.W0 * k.W0);
  om.C2q = om.rho_q * om.C1q;
  om.Wnum = dd(k.Wm);
  om.alpha = dd(k.alpha);
  om.beta = dd(k.beta);
  om.Gamma_prime = dd(k.Gp_h * k.W0);
  om.Omega_prime2 = dd(k.Op2_h * k.W0 * k.W0);
  om.Omega_tilde2 = dd(k.Om_t2);
  om.E_m = dc(k.E_m);
  om.F_m = dc(k.F_m);
  om.I_m = dc(k.I_m);
  om.J_m = dc(k.J_m);
  om.W0 = dd(k.W0);
  return om;
}

Poly ld_poly(const numq::qpoly& q) {
  std::vector<cplx> c;
  for (const auto& v : q) c.push_back(cplx((long double)v.re, (long double)v.im));
  return Poly(c);
}

}  // namespace

OneModeParams one_mode_effective(const PhysicalParams& p, double delta, double N,
                                 PhotonConvention conv, double W0_hint) {
  detail::OneModeKernel k =
      detail::build_one_mode_kernel(p, delta, N, conv, (numq::qreal)W0_hint);
  return export_params(k, p, delta, N);
}

std::pair<double, double> one_mode_factorize(const PhysicalParams& p, double delta,
                                             double N, PhotonConvention conv) {
  OneModeParams om = one_mode_effective(p, delta, N, conv);
  return {om.Gamma_prime, om.Omega_prime2};
}

OneModeFilters one_mode_filters(const PhysicalParams& p, double delta, double N,
                                PhotonConvention conv, double W0_hint) {
  auto k = std::make_shared<detail::OneModeKernel>(
      detail::build_one_mode_kernel(p, delta, N, conv, (numq::qreal)W0_hint));
  OneModeFilters f;
  f.p = p;
  f.kernel = k;
  f.om = export_params(*k, p, delta, N);
  f.Fm_hat = ld_poly(k->Fm);
  f.Fpm_hat = ld_poly(k->Fpm);
  for (const auto& r : k->Fmroots)
    f.Fm_roots_hat.push_back(cplx((long double)r.re, (long double)r.im));
  for (const auto& r : k->Fpmroots)
    f.Fpm_roots_hat.push_back(cplx((long double)r.re, (long double)r.im));
  f.nq_hat = ld_poly(k->nq);
  f.np_hat = ld_poly(k->np);
  f.h = k->has_measurement ? f.om.C1q / f.om.C1 : 0.0;
  return f;
}

const detail::OneModeKernel& one_mode_kernel_of(const OneModeFilters& f) {
  if (!f.kernel) throw std::logic_error("one-mode filter lacks its kernel");
  return *f.kernel;
}

std::complex<double> OneModeFilters::H_q(double omega) const {
  if (h == 0) return {0.0, 0.0};
  cplx x((real)omega / om.W0);
  cplx v = cplx((real)h) * nq_hat(x) / (Fpm_hat(x) * cplx((real)om.W0 * om.W0));
  return {(double)v.real(), (double)v.imag()};
}

std::complex<double> OneModeFilters::H_p(double omega) const {
  if (h == 0) return {0.0, 0.0};
  cplx x((real)omega / om.W0);
  cplx v = cplx((real)h) * np_hat(x) / (Fpm_hat(x) * cplx((real)om.W0 * om.W0));
  return {(double)v.real(), (double)v.imag()};
}

std::array<num::Poly, 2> one_mode_extract_generic(const OneModeFilters& f) {
  const real W0 = f.om.W0;
  const real rho = (real)f.om.rho_q / (W0 * W0);
  Poly Fm = f.Fm_hat;
  Poly Fpmc = f.Fpm_hat.conj_coeffs();
  Poly Km = Fm.conj_coeffs() + Poly::constant(cplx(rho));
  Poly x1(std::vector<cplx>{cplx(0), cplx(1)});

  auto solve = [&](const Poly& N) {
    Eigen::Matrix<cplx, 4, 4> A = Eigen::Matrix<cplx, 4, 4>::Zero();
    Eigen::Matrix<cplx, 4, 1> b = Eigen::Matrix<cplx, 4, 1>::Zero();
    for (int k = 0; k <= 3; ++k) {
      for (int j = 0; j <= 1; ++j) {
        if (k - j >= 0 && k - j <= 2) {
          A(k, j) += Fm.coeff(k - j);        // anticausal columns
          A(k, 2 + j) += Fpmc.coeff(k - j);  // causal columns
        }
      }
      b(k) = N.coeff(k);
    }
    Eigen::Matrix<cplx, 4, 1> s = A.fullPivLu().solve(b);
    return Poly({s(2), s(3)});
  };

  Poly nq = solve(Km);
  Poly np = solve(x1 * Km * cplx(0, -(real)f.p.mirror_mass * W0));
  return {nq, np};
}

std::pair<double, double> one_mode_factorize_generic(const OneModeFilters& f) {
  const real W0 = f.om.W0;
  real ah = (real)f.om.alpha / (W0 * W0);
  real bh = (real)f.om.beta / (W0 * W0 * W0 * W0);
  Poly Q(std::vector<cplx>{cplx(bh), cplx(ah), cplx(1)});
  auto yroots = num::poly_roots(Q);
  std::vector<cplx> sel;
  for (cplx y : yroots) {
    cplx x = std::sqrt(y);
    if (x.imag() > 0) x = -x;
    sel.push_back(x);
  }
  cplx sum = sel[0] + sel[1], prod = sel[0] * sel[1];
  double Gp = (double)((cplx(0, 1) * sum).real() * W0);
  double Op2 = (double)((-prod).real() * W0 * W0);
  return {Gp, Op2};
}

}  // namespace mirrorstate
