#include "mirrorstate/wiener.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <quadmath.h>

#include "mirrorstate/detail/kernel.hpp"

namespace mirrorstate {

using num::cplx;
using num::Poly;
using num::real;

namespace {

struct ScaledModel {
  real a2, d2, c0, g;      // F parts: F = -(x^2+igx-wAR2h)(x^2-d2)+cross, a2 = wAR2h+d2
  real wAR2h, r2, r3;      // C2/C1, C3/C1 scaled
  real rho;                // rho_q scaled
};

ScaledModel scaled_model(const TwoModeSpectra& s) {
  real W0 = s.W0;
  ScaledModel m;
  m.wAR2h = (real)s.lf.omega_AR2 / (W0 * W0);
  m.d2 = (real)s.lf.Delta_BR2 / (W0 * W0);
  m.a2 = m.wAR2h + m.d2;
  m.c0 = ((real)s.lf.Delta_AR2 * s.lf.omega_BR2 -
          (real)s.lf.omega_AR2 * s.lf.Delta_BR2) /
         (W0 * W0 * W0 * W0);
  m.g = (real)s.p.feedback_decay / W0;
  m.r2 = ((real)s.C2 / s.C1) / (W0 * W0);
  m.r3 = ((real)s.C3 / s.C1) / (W0 * W0 * W0 * W0);
  m.rho = (real)s.rho_q / (W0 * W0);
  return m;
}

// J in y = x^2: Q(y) = F0(y)^2 + g^2 y (d2-y)^2 + 2 r2 (y-d2) F0(y) + r3 (y-d2)^2
Poly q_poly(const ScaledModel& m) {
  Poly F0(std::vector<cplx>{cplx(m.c0), cplx(m.a2), cplx(-1)});
  Poly y(std::vector<cplx>{cplx(0), cplx(1)});
  Poly dmy(std::vector<cplx>{cplx(m.d2), cplx(-1)});
  Poly ymd(std::vector<cplx>{cplx(-m.d2), cplx(1)});
  return F0 * F0 + y * dmy * dmy * cplx(m.g * m.g) + ymd * F0 * cplx(2 * m.r2) +
         ymd * ymd * cplx(m.r3);
}

Poly j_from_q(const Poly& Q) {
  std::vector<cplx> c(2 * Q.degree() + 1, cplx(0));
  for (int k = 0; k <= Q.degree(); ++k) c[2 * k] = Q.coeff(k);
  return Poly(std::move(c));
}

// Select the lower-half-plane square roots of the roots of Q.
std::vector<cplx> select_roots(const std::vector<cplx>& yroots) {
  std::vector<cplx> out;
  for (cplx y : yroots) {
    cplx x = std::sqrt(y);
    if (x.imag() > 0) x = -x;
    if (std::abs(x.imag()) <= 1e-12L * std::abs(x))
      throw DegenerateSpectrumError(
          "output spectrum has a real-axis zero; causal factorization undefined");
    out.push_back(x);
  }
  return out;
}

struct ABCD {
  real A, B, C, D;  // F' = -x^4 + iA x^3 + B x^2 + iC x + D (A..D real)
};

ABCD abcd_from_roots(const std::vector<cplx>& roots) {
  Poly fp = Poly::from_roots(cplx(-1), roots);
  return ABCD{fp.coeff(3).imag(), fp.coeff(2).real(), fp.coeff(1).imag(),
              fp.coeff(0).real()};
}

// Newton refinement of the coefficient identities
//   A^2 - 2B = j6,  B^2 - 2D + 2AC = j4,  2BD + C^2 = j2,  D^2 = j0.
bool refine_abcd(ABCD& v, real j6, real j4, real j2, real j0) {
  auto residual = [&](const ABCD& w) {
    real s1 = std::abs(w.A * w.A) + 2 * std::abs(w.B) + std::abs(j6) + 1e-30L;
    real s2 = std::abs(w.B * w.B) + 2 * std::abs(w.D) + 2 * std::abs(w.A * w.C) +
              std::abs(j4) + 1e-30L;
    real s3 = 2 * std::abs(w.B * w.D) + std::abs(w.C * w.C) + std::abs(j2) + 1e-30L;
    real s4 = std::abs(w.D * w.D) + std::abs(j0) + 1e-30L;
    real f1 = w.A * w.A - 2 * w.B - j6;
    real f2 = w.B * w.B - 2 * w.D + 2 * w.A * w.C - j4;
    real f3 = 2 * w.B * w.D + w.C * w.C - j2;
    real f4 = w.D * w.D - j0;
    return std::abs(f1) / s1 + std::abs(f2) / s2 + std::abs(f3) / s3 + std::abs(f4) / s4;
  };
  ABCD best = v;
  real best_r = residual(v);
  int stall = 0;
  for (int it = 0; it < 60 && stall < 4; ++it) {
    real f1 = v.A * v.A - 2 * v.B - j6;
    real f2 = v.B * v.B - 2 * v.D + 2 * v.A * v.C - j4;
    real f3 = 2 * v.B * v.D + v.C * v.C - j2;
    real f4 = v.D * v.D - j0;
    Eigen::Matrix<real, 4, 4> Jm;
    Jm << 2 * v.A, -2, 0, 0,
          2 * v.C, 2 * v.B, 2 * v.A, -2,
          0, 2 * v.D, 2 * v.C, 2 * v.B,
          0, 0, 0, 2 * v.D;
    Eigen::Matrix<real, 4, 1> rhs;
    rhs << f1, f2, f3, f4;
    Eigen::Matrix<real, 4, 1> dx = Jm.fullPivLu().solve(rhs);
    v.A -= dx(0);
    v.B -= dx(1);
    v.C -= dx(2);
    v.D -= dx(3);
    real r = residual(v);
    if (r < best_r) {
      best_r = r;
      best = v;
      stall = 0;
    } else {
      ++stall;
    }
  }
  v = best;
  return best_r < 1e-10L;
}

QuarticFactor assemble_factor(const ABCD& v, const Poly& Jh, double C1, double W0) {
  QuarticFactor qf;
  qf.W0 = W0;
  qf.sqrtC1 = std::sqrt(C1);
  qf.Fp_hat = Poly(std::vector<cplx>{cplx(v.D), cplx(0, v.C), cplx(v.B), cplx(0, v.A),
                                     cplx(-1)});
  qf.roots_hat = num::poly_roots(qf.Fp_hat);
  real rscale = 0;
  for (auto& r : qf.roots_hat) rscale = std::max(rscale, std::abs(r));
  for (auto& r : qf.roots_hat) {
    if (std::abs(r.imag()) < 1e-10L * rscale)
      throw DegenerateSpectrumError(
          "output spectrum has a real-axis zero; causal factorization undefined");
    if (!(r.imag() < 0))
      throw FactorizationError("causal factor root escaped the lower half plane");
  }

  // residual check |F'F'* - J| / |J| on a grid
  Poly prod = qf.Fp_hat * qf.Fp_hat.conj_coeffs();
  real worst = 0;
  for (int i = 0; i <= 64; ++i) {
    real x = -12.0L + 24.0L * i / 64.0L;
    real jv = Jh(cplx(x)).real();
    real pv = prod(cplx(x)).real();
    if (jv != 0) worst = std::max(worst, std::abs(pv - jv) / std::abs(jv));
  }
  if (worst > 1e-8L)
    throw FactorizationError("factorization residual too large on verification grid");

  for (int k = 0; k < 4; ++k) {
    cplx c = qf.Fp_hat.coeff(3 - k);  // At, Bt, Ct, Dt
    real pw = std::pow((real)W0, (real)(k + 1));
    qf.ABCD[k] = std::complex<double>((double)(c.real() * pw), (double)(c.imag() * pw));
    qf.roots[k] = std::complex<double>((double)(qf.roots_hat[k].real() * W0),
                                       (double)(qf.roots_hat[k].imag() * W0));
  }
  return qf;
}

}  // namespace

num::Poly J_hat_poly(const TwoModeSpectra& s) { return j_from_q(q_poly(scaled_model(s))); }

QuarticFactor spectral_factorize_scaled(const num::Poly& J_hat, double C1, double W0) {
  // reduce to the quartic in y = x^2
  std::vector<cplx> qc;
  for (int k = 0; k <= J_hat.degree(); k += 2) qc.push_back(J_hat.coeff(k));
  Poly Q(qc);
  if (Q.degree() != 4 || std::abs(Q.coeff(4) - cplx(1)) > 1e-9L)
    throw FactorizationError("J must be a degree-8 real even polynomial with unit lead");
  for (int k = 1; k <= J_hat.degree(); k += 2)
    if (std::abs(J_hat.coeff(k)) > 1e-12L)
      throw FactorizationError("J must be even in omega");

  auto yroots = num::poly_roots(Q);
  ABCD v = abcd_from_roots(select_roots(yroots));
  if (!refine_abcd(v, Q.coeff(3).real(), Q.coeff(2).real(), Q.coeff(1).real(),
                   Q.coeff(0).real()))
    throw FactorizationError("coefficient refinement did not converge");
  return assemble_factor(v, J_hat, C1, W0);
}

namespace {

QuarticFactor export_factor(const detail::KernelModel& km) {
  QuarticFactor qf;
  qf.W0 = (double)km.W0;
  qf.sqrtC1 = (double)sqrtq(km.C1);
  std::vector<cplx> fc;
  for (const auto& v : km.Fp) fc.push_back(cplx((long double)v.re, (long double)v.im));
  qf.Fp_hat = Poly(fc);
  for (int i = 0; i < 4; ++i) {
    qf.roots_hat.push_back(cplx((long double)km.Fproots[i].re,
                                (long double)km.Fproots[i].im));
    real pw = std::pow((real)qf.W0, (real)(i + 1));
    cplx c = qf.Fp_hat.coeff(3 - i) * cplx(pw);
    qf.ABCD[i] = std::complex<double>((double)c.real(), (double)c.imag());
    qf.roots[i] = std::complex<double>((double)(qf.roots_hat[i].real() * qf.W0),
                                       (double)(qf.roots_hat[i].imag() * qf.W0));
  }
  return qf;
}

}  // namespace

QuarticFactor spectral_factorize(const TwoModeSpectra& s) {
  if (s.n_c > 0 && s.p.coupling > 0) {
    detail::KernelModel km = detail::build_kernel(s.p, s.delta, s.convention);
    if (km.has_measurement) return export_factor(km);
  }
  return spectral_factorize_scaled(J_hat_poly(s), s.C1, s.W0);
}

QuarticFactor factorize_coefficient_system(const TwoModeSpectra& s) {
  ScaledModel m = scaled_model(s);
  Poly Q = q_poly(m);
  auto yroots = num::poly_roots(Q);
  // deliberately skip the Newton polish inside poly_roots' result pairing:
  // start the coefficient iteration from coarse (double-rounded) estimates
  std::vector<cplx> coarse;
  for (cplx y : yroots) {
    cplx x = std::sqrt(cplx((double)y.real(), (double)y.imag()));
    if (x.imag() > 0) x = -x;
    coarse.push_back(x);
  }
  ABCD v = abcd_from_roots(coarse);
  if (!refine_abcd(v, Q.coeff(3).real(), Q.coeff(2).real(), Q.coeff(1).real(),
                   Q.coeff(0).real()))
    throw FactorizationError("coefficient-system iteration did not converge");
  return assemble_factor(v, j_from_q(Q), s.C1, s.W0);
}

std::array<std::complex<double>, 8> factorization_coefficient_check(
    const TwoModeSpectra& s, const QuarticFactor& qf) {
  using C = std::complex<long double>;
  C A(qf.ABCD[0].real(), qf.ABCD[0].imag());
  C B(qf.ABCD[1].real(), qf.ABCD[1].imag());
  C Ct(qf.ABCD[2].real(), qf.ABCD[2].imag());
  C D(qf.ABCD[3].real(), qf.ABCD[3].imag());
  long double g = s.p.feedback_decay;
  long double wa = s.lf.omega_AR2, db = s.lf.Delta_BR2;
  long double cross = (long double)s.lf.Delta_AR2 * s.lf.omega_BR2;
  long double r2 = (long double)s.C2 / s.C1, r3 = (long double)s.C3 / s.C1;

  auto cj = [](C z) { return std::conj(z); };
  std::array<C, 8> lhs{
      -(A + cj(A)),
      A * cj(A) - B - cj(B),
      A * cj(B) + cj(A) * B - Ct - cj(Ct),
      B * cj(B) + A * cj(Ct) + cj(A) * Ct - D - cj(D),
      B * cj(Ct) + cj(B) * Ct + A * cj(D) + cj(A) * D,
      Ct * cj(Ct) + B * cj(D) + cj(B) * D,
      Ct * cj(D) + cj(Ct) * D,
      D * cj(D)};
  std::array<C, 8> rhs{
      C(0),
      C(-2 * r2 + g * g - 2 * db - 2 * wa),
      C(0),
      C(r3 - 2 * g * g * db + 2 * db * wa + (db + wa) * (db + wa) +
        r2 * (4 * db + 2 * wa) - 2 * cross),
      C(0),
      C(-2 * r3 * db + g * g * db * db - 2 * r2 * (db * db + 2 * db * wa - cross) +
        2 * (db + wa) * (-db * wa + cross)),
      C(0),
      C(r3 * db * db + 2 * r2 * db * (db * wa - cross) +
        (-db * wa + cross) * (-db * wa + cross))};

  std::array<std::complex<double>, 8> out;
  for (int i = 0; i < 8; ++i) {
    C rdl = lhs[i] - rhs[i];
    out[i] = std::complex<double>((double)rdl.real(), (double)rdl.imag());
  }
  return out;
}

std::complex<double> SplitSpectrum::Splus(double omega) const {
  cplx x((real)omega / qf->W0);
  cplx v = cplx((real)qf->sqrtC1) * qf->Fp_hat(x);
  cplx fh = s->F_hat(x);
  cplx r = v / fh;
  return {(double)r.real(), (double)r.imag()};
}

std::complex<double> SplitSpectrum::Sminus(double omega) const {
  return std::conj(Splus(omega));
}

CausalNumerator causal_extract(const TwoModeSpectra& s, const QuarticFactor& qf,
                               Target t) {
  ScaledModel m = scaled_model(s);
  Poly F = s.F_hat;
  Poly Fpc = qf.Fp_hat.conj_coeffs();

  Poly u(std::vector<cplx>{cplx(-m.d2), cplx(0), cplx(1)});  // x^2 - d2
  Poly Fc = F.conj_coeffs();
  Poly K = u * Fc + u * u * cplx(m.rho);
  Poly L = (Fc + u * cplx(m.rho)) * cplx(-1);
  Poly x1(std::vector<cplx>{cplx(0), cplx(1)});

  Poly N;
  double pref = 0;
  switch (t) {
    case Target::dq:
      N = K;
      pref = s.W0 * s.W0;
      break;
    case Target::dp:
      N = x1 * K * cplx(0, -1);
      pref = s.p.mirror_mass * s.W0 * s.W0 * s.W0;
      break;
    case Target::dphi:
      N = L;
      pref = s.lf.omega_BR2;
      break;
    case Target::dpi:
      N = x1 * L * cplx(0, -1);
      pref = s.p.moment_of_inertia * s.lf.omega_BR2 * s.W0;
      break;
  }

  // c'(x) F(x) + c(x) F'*(x) = N(x), matching coefficients of x^0..x^7.
  Eigen::Matrix<cplx, 8, 8> Amat = Eigen::Matrix<cplx, 8, 8>::Zero();
  Eigen::Matrix<cplx, 8, 1> bvec = Eigen::Matrix<cplx, 8, 1>::Zero();
  for (int k = 0; k <= 7; ++k) {
    for (int j = 0; j <= 3; ++j) {
      if (k - j >= 0 && k - j <= 4) {
        Amat(k, j) += F.coeff(k - j);        // c'_j column
        Amat(k, 4 + j) += Fpc.coeff(k - j);  // c_j column
      }
    }
    bvec(k) = N.coeff(k);
  }
  Eigen::FullPivLU<Eigen::Matrix<cplx, 8, 8>> lu(Amat);
  if (!lu.isInvertible())
    throw FactorizationError(
        "degenerate causal-extraction system (shared roots of F and F'*)");
  Eigen::Matrix<cplx, 8, 1> sol = lu.solve(bvec);

  // Iterative refinement with quad-precision residuals; the solution feeds
  // residue sums where coefficient error is amplified by ~1e5 at the
  // near-axis rotational pole, so plain LU accuracy is not enough.
  for (int pass = 0; pass < 3; ++pass) {
    Eigen::Matrix<cplx, 8, 1> r;
    for (int k = 0; k < 8; ++k) {
      __float128 rre = (__float128)bvec(k).real();
      __float128 rim = (__float128)bvec(k).imag();
      for (int j = 0; j < 8; ++j) {
        __float128 ar = (__float128)Amat(k, j).real();
        __float128 ai = (__float128)Amat(k, j).imag();
        __float128 xr = (__float128)sol(j).real();
        __float128 xi = (__float128)sol(j).imag();
        rre -= ar * xr - ai * xi;
        rim -= ar * xi + ai * xr;
      }
      r(k) = cplx((real)rre, (real)rim);
    }
    Eigen::Matrix<cplx, 8, 1> dx = lu.solve(r);
    sol += dx;
  }

  CausalNumerator cn;
  cn.target = t;
  cn.prefactor = pref;
  cn.anticausal_hat = Poly({sol(0), sol(1), sol(2), sol(3)});
  cn.causal_hat = Poly({sol(4), sol(5), sol(6), sol(7)});
  for (int j = 0; j < 4; ++j) {
    real pw = std::pow((real)s.W0, (real)j);
    cplx cc = cn.causal_hat.coeff(j) * cplx((real)pref) / pw;
    cplx ca = cn.anticausal_hat.coeff(j) * cplx((real)pref) / pw;
    cn.causal_dim[j] = {(double)cc.real(), (double)cc.imag()};
    cn.anticausal_dim[j] = {(double)ca.real(), (double)ca.imag()};
  }
  return cn;
}

std::complex<double> WienerFilters::H(Target t, double omega) const {
  const CausalNumerator& cn = numerators[static_cast<int>(t)];
  if (cn.prefactor == 0) return {0.0, 0.0};
  cplx x((real)omega / spectra.W0);
  cplx v = cplx((real)spectra.C1q / spectra.C1 * (real)cn.prefactor) *
           cn.causal_hat(x) / factor.Fp_hat(x);
  // dimensional cubic is prefactor * c_hat(x); F'(w) = W0^4 Fp_hat(x)
  v /= cplx(std::pow((real)spectra.W0, 4));
  return {(double)v.real(), (double)v.imag()};
}

std::complex<double> WienerFilters::G(Target t, double omega) const {
  const CausalNumerator& cn = numerators[static_cast<int>(t)];
  if (cn.prefactor == 0) return {0.0, 0.0};
  cplx x((real)omega / spectra.W0);
  cplx v = cplx((real)spectra.C1q / (real)std::sqrt((long double)spectra.C1) *
                (real)cn.prefactor) *
           cn.causal_hat(x) / spectra.F_hat(x);
  v /= cplx(std::pow((real)spectra.W0, 4));
  return {(double)v.real(), (double)v.imag()};
}

std::complex<double> WienerFilters::H_opt(Target t, double omega) const {
  switch (t) {
    case Target::dq:
      return spectra.S_XA_dq(omega) / spectra.S_XAXA(omega);
    case Target::dp:
      return std::complex<double>(0, -spectra.p.mirror_mass * omega) *
             spectra.S_XA_dq(omega) / spectra.S_XAXA(omega);
    case Target::dphi:
      return spectra.S_XA_dphi(omega) / spectra.S_XAXA(omega);
    case Target::dpi:
      return std::complex<double>(0, -spectra.p.moment_of_inertia * omega) *
             spectra.S_XA_dphi(omega) / spectra.S_XAXA(omega);
  }
  return {};
}

WienerFilters synthesize_filters(const TwoModeSpectra& s) {
  WienerFilters wf;
  wf.spectra = s;
  auto km = std::make_shared<detail::KernelModel>(
      detail::build_kernel(s.p, s.delta, s.convention));
  wf.kernel = km;

  if (km->has_measurement) {
    wf.factor = export_factor(*km);
    double prefs[4] = {s.W0 * s.W0, s.p.mirror_mass * s.W0 * s.W0 * s.W0,
                       s.lf.omega_BR2,
                       s.p.moment_of_inertia * s.lf.omega_BR2 * s.W0};
    for (int t = 0; t < 4; ++t) {
      CausalNumerator& cn = wf.numerators[t];
      cn.target = static_cast<Target>(t);
      cn.prefactor = prefs[t];
      std::vector<cplx> cc, ca;
      for (const auto& v : km->cub[t])
        cc.push_back(cplx((long double)v.re, (long double)v.im));
      for (const auto& v : km->cubp[t])
        ca.push_back(cplx((long double)v.re, (long double)v.im));
      cn.causal_hat = Poly(cc);
      cn.anticausal_hat = Poly(ca);
      for (int j = 0; j < 4; ++j) {
        real pw = std::pow((real)s.W0, (real)j);
        cplx c = cn.causal_hat.coeff(j) * cplx((real)cn.prefactor) / pw;
        cplx a = cn.anticausal_hat.coeff(j) * cplx((real)cn.prefactor) / pw;
        cn.causal_dim[j] = {(double)c.real(), (double)c.imag()};
        cn.anticausal_dim[j] = {(double)a.real(), (double)a.imag()};
      }
    }
  } else {
    wf.factor.W0 = s.W0;
    wf.factor.sqrtC1 = std::sqrt(s.C1);
    wf.factor.Fp_hat = Poly({cplx(0)});
    for (int i = 0; i < 4; ++i) {
      wf.numerators[i].target = static_cast<Target>(i);
      wf.numerators[i].prefactor = 0;
      wf.numerators[i].causal_hat = Poly({cplx(0)});
      wf.numerators[i].anticausal_hat = Poly({cplx(0)});
    }
  }
  return wf;
}

}  // namespace mirrorstate
