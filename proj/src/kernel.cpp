#include "mirrorstate/detail/kernel.hpp"

#include <cmath>
#include <stdexcept>

#include "mirrorstate/poly.hpp"
#include "mirrorstate/wiener.hpp"

namespace mirrorstate::detail {

namespace {

qcplx qnewton(const qpoly& p, const qpoly& dp, qcplx z, int iters = 80) {
  qreal last = HUGE_VALQ;
  for (int it = 0; it < iters; ++it) {
    qcplx d = peval(dp, z);
    if (d.re == 0 && d.im == 0) break;
    qcplx step = peval(p, z) / d;
    qreal mag = numq::abs(step);
    z -= step;
    if (mag <= 8 * FLT128_EPSILON * numq::abs(z)) break;
    if (it > 8 && mag >= last) break;
    last = mag;
  }
  return z;
}

qpoly qderiv(const qpoly& p) {
  if (p.size() <= 1) return {qcplx()};
  qpoly d(p.size() - 1);
  for (size_t k = 1; k < p.size(); ++k) d[k - 1] = p[k] * qcplx((qreal)k);
  return d;
}

// rough root estimates through the long-double companion path
std::vector<qcplx> estimate_roots(const qpoly& p) {
  std::vector<num::cplx> c;
  for (const qcplx& v : p) c.push_back(num::cplx((long double)v.re, (long double)v.im));
  auto roots = num::poly_roots(num::Poly(c));
  std::vector<qcplx> out;
  for (auto r : roots) out.push_back(qcplx((qreal)r.real(), (qreal)r.imag()));
  return out;
}

struct Constants {
  qreal kappa, Delta, den, M, J, hbar, G0, nc, sqnc, eta;
  qreal x2, y2, xp2, Xi;
  qreal Omega, gamma_m;
};

Constants base_constants(const PhysicalParams& p, double delta, PhotonConvention conv,
                         qreal gamma_eff) {
  Constants c;
  c.kappa = (qreal)p.optical_decay;
  c.Delta = -2 * c.kappa * (qreal)delta;
  c.den = c.kappa * c.kappa + c.Delta * c.Delta;
  c.M = (qreal)p.mirror_mass;
  c.J = (qreal)p.moment_of_inertia;
  c.hbar = (qreal)p.hbar;
  c.G0 = (qreal)p.coupling;
  c.eta = (qreal)p.detection_eff;
  c.Omega = (qreal)p.pendulum_freq;
  c.gamma_m = (qreal)p.feedback_decay;

  qreal E2 = 2 * (qreal)p.laser_power * c.kappa / (c.hbar * (qreal)p.cavity_freq);
  if (conv == PhotonConvention::steady_state)
    c.nc = E2 / (c.kappa * c.kappa + c.Delta * c.Delta);
  else
    c.nc = E2 / (c.kappa * c.kappa * (1 + (qreal)delta * (qreal)delta));
  c.sqnc = sqrtq(c.nc);

  c.x2 = 2 * (qreal)p.thermal_photons + 1;
  c.y2 = c.x2;
  c.xp2 = 1;
  qreal arg = c.hbar * c.Omega * c.gamma_m / ((qreal)p.k_B * (qreal)p.bath_temp * gamma_eff);
  qreal np = 1 / expm1q(arg);
  c.Xi = c.M * c.hbar * c.Omega * c.gamma_m * (2 * np + 1);
  return c;
}

struct OutputConstantsQ {
  qreal C1, C2, C3_0, C3_xi, C1q, rho0, rho1, Wq0, Wq1;
};

OutputConstantsQ output_constants(const Constants& c) {
  // X = sqrt(eta)[st_x x_in + st_y y_in - sig dq] + sqrt(1-eta) x_in',
  // with dq = chi_q (a_x x_in + a_y y_in + xi/M).
  OutputConstantsQ o{};
  qreal r = (c.Delta * c.Delta - c.kappa * c.kappa) / c.den;
  qreal q = 2 * c.kappa * c.Delta / c.den;
  qreal sq2k = sqrtq(2 * c.kappa);
  qreal st_x = r, st_y = -q;
  qreal sig = 2 * c.G0 * c.sqnc * c.Delta * sq2k / c.den;
  qreal g1 = c.hbar * c.G0 * c.sqnc * sq2k / (c.M * c.den);
  qreal ax = g1 * c.kappa, ay = g1 * c.Delta;
  o.C1 = c.eta * (st_x * st_x * c.x2 + st_y * st_y * c.y2) + (1 - c.eta) * c.xp2;
  o.C2 = -c.eta * sig * (st_x * ax * c.x2 + st_y * ay * c.y2);
  o.C3_0 = c.eta * sig * sig * (ax * ax * c.x2 + ay * ay * c.y2);
  o.C3_xi = c.eta * sig * sig / (c.M * c.M);
  o.Wq0 = ax * ax * c.x2 + ay * ay * c.y2;
  o.Wq1 = 1 / (c.M * c.M);
  o.C1q = sqrtq(c.eta) * g1 * (st_x * c.kappa * c.x2 + st_y * c.Delta * c.y2);
  if (c.nc > 0 && c.G0 > 0 && o.C1q != 0) {
    // rho = C2q/C1q with C2q = -sqrt(eta) sig W
    qreal denom = g1 * (st_x * c.kappa * c.x2 + st_y * c.Delta * c.y2);
    o.rho0 = -sig * o.Wq0 / denom;
    o.rho1 = -sig * o.Wq1 / denom;
  }
  return o;
}

}  // namespace

KernelModel build_kernel(const PhysicalParams& p, double delta, PhotonConvention conv) {
  KernelModel m;
  Constants c = base_constants(p, delta, conv, (qreal)p.mech_decay_rot);
  m.M = c.M;
  m.J = c.J;
  m.eta = p.detection_eff;
  m.xi0 = c.Xi;

  // low-frequency couplings (real parts)
  qreal T = c.M * (qreal)p.gravity;
  qreal ell = (qreal)p.beam_length, h = (qreal)p.offset;
  qreal s = sqrtq((qreal)p.flexural_rigidity / T);
  qreal spring = -2 * c.hbar * c.G0 * c.G0 * c.nc * c.Delta / (c.M * c.den);
  qreal wAR2 = T / (c.M * ell) * (1 + 2 / ell * s) + spring;
  qreal dAR2 = T * h / (c.M * ell) * (1 + (1 / h + 2 / ell) * s);
  qreal wBR2 = T * h / (c.J * ell) * (1 + (1 / h + 2 / ell) * s);
  qreal dBR2 = T * h / c.J * (1 + h / ell + (1 / h + 2 / ell) * s);
  m.wBR2 = wBR2;

  qreal cross = dAR2 * wBR2;
  qreal c0_dim = cross - wAR2 * dBR2;
  m.W0 = powq(fabsq(c0_dim), 0.25Q);
  if (!(m.W0 > 0)) m.W0 = sqrtq(sqrtq(wAR2 * dBR2));
  qreal W0 = m.W0, W2 = W0 * W0, W4 = W2 * W2;

  m.gh = c.gamma_m / W0;
  m.wAR2h = wAR2 / W2;
  m.d2h = dBR2 / W2;
  m.crossh = cross / W4;
  m.anchor = c.Omega / W0;

  OutputConstantsQ o = output_constants(c);
  m.C1 = o.C1;
  m.C1q = o.C1q;
  m.r2 = (o.C2 / o.C1) / W2;
  m.r30 = (o.C3_0 / o.C1) / W4;
  m.r31 = (o.C3_xi / o.C1) / W4;
  m.rho0 = o.rho0 / W2;
  m.rho1 = o.rho1 / W2;
  m.Wq0 = o.Wq0;
  m.Wq1 = o.Wq1;

  // susceptibility F = -x^4 - i gh x^3 + a2 x^2 + i gh d2 x + c0
  qreal a2 = m.wAR2h + m.d2h;
  qreal c0 = m.crossh - m.wAR2h * m.d2h;
  m.F = {qcplx(c0), qcplx(0, m.gh * m.d2h), qcplx(a2), qcplx(0, -m.gh), qcplx(-1)};

  // roots: gamma = 0 problem in y = x^2, then perturbation + Newton polish
  {
    qreal disc = a2 * a2 + 4 * c0;
    if (!(disc >= 0)) throw std::domain_error("complex normal-mode frequencies");
    qreal rt = sqrtq(disc);
    qreal yp = (a2 + rt) / 2;
    qreal ym = -c0 / yp;
    if (!(yp > 0) || !(ym > 0))
      throw std::domain_error("unstable mechanical system: omega0^2 <= 0");
    qpoly dF = qderiv(m.F);
    int idx = 0;
    for (qreal y : {yp, ym}) {
      qreal x0 = sqrtq(y);
      PoleMode mode =
          fabsq(y - m.wAR2h) <= fabsq((y == yp ? ym : yp) - m.wAR2h)
              ? PoleMode::pendulum
              : PoleMode::rotational;
      for (int sgn : {+1, -1}) {
        qreal x = sgn > 0 ? x0 : -x0;
        qreal F0p = (-4 * x * x + 2 * a2) * x;
        qcplx d1 = qcplx(0, -1) * qcplx(m.gh * x * (m.d2h - x * x) / F0p);
        qcplx root = qnewton(m.F, dF, qcplx(x) + d1);
        if (!(root.im < 0))
          throw std::domain_error("susceptibility root escaped the lower half plane");
        m.Froots[idx] = root;
        m.Fmode[idx] = mode;
        ++idx;
      }
    }
  }

  m.has_measurement = c.nc > 0 && c.G0 > 0 && m.eta > 0;
  if (!m.has_measurement) {
    m.Fp = {qcplx(0)};
    for (auto& t : m.cub) t = {qcplx(0)};
    for (auto& t : m.cubp) t = {qcplx(0)};
    return m;
  }

  // J in y = x^2 with the flat thermal strength folded in (filter side)
  qreal r3f = m.r30 + m.xi0 * m.r31;
  qpoly F0y = {qcplx(c0), qcplx(a2), qcplx(-1)};
  qpoly ymd = {qcplx(-m.d2h), qcplx(1)};
  qpoly dmy = {qcplx(m.d2h), qcplx(-1)};
  qpoly ypol = {qcplx(0), qcplx(1)};
  qpoly Q = padd(padd(pmul(F0y, F0y), pscale(pmul(ypol, pmul(dmy, dmy)),
                                             qcplx(m.gh * m.gh))),
                 padd(pscale(pmul(ymd, F0y), qcplx(2 * m.r2)),
                      pscale(pmul(ymd, ymd), qcplx(r3f))));

  // causal factor: root selection + coefficient-identity Newton
  {
    auto yroots = estimate_roots(Q);
    qpoly dQ = qderiv(Q);
    std::vector<qcplx> sel;
    for (qcplx y : yroots) {
      y = qnewton(Q, dQ, y);
      qcplx x = numq::sqrt(y);
      if (x.im > 0) x = -x;
      if (fabsq(x.im) <= 1e-14Q * numq::abs(x))
        throw DegenerateSpectrumError(
            "output spectrum has a real-axis zero; causal factorization undefined");
      sel.push_back(x);
    }
    qpoly fp = pfrom_roots(qcplx(-1), sel);
    qreal A = fp[3].im, B = fp[2].re, C = fp[1].im, D = fp[0].re;
    // Newton on A^2-2B=j6, B^2-2D+2AC=j4, 2BD+C^2=j2, D^2=j0
    qreal j6 = Q[3].re, j4 = Q[2].re, j2 = Q[1].re, j0 = Q[0].re;
    for (int it = 0; it < 60; ++it) {
      qreal f1 = A * A - 2 * B - j6;
      qreal f2 = B * B - 2 * D + 2 * A * C - j4;
      qreal f3 = 2 * B * D + C * C - j2;
      qreal f4 = D * D - j0;
      std::vector<std::vector<qcplx>> Jm = {
          {qcplx(2 * A), qcplx(-2), qcplx(0), qcplx(0)},
          {qcplx(2 * C), qcplx(2 * B), qcplx(2 * A), qcplx(-2)},
          {qcplx(0), qcplx(2 * D), qcplx(2 * C), qcplx(2 * B)},
          {qcplx(0), qcplx(0), qcplx(0), qcplx(2 * D)}};
      std::vector<qcplx> rhs = {qcplx(f1), qcplx(f2), qcplx(f3), qcplx(f4)};
      numq::qsolve(Jm, rhs);
      A -= rhs[0].re;
      B -= rhs[1].re;
      C -= rhs[2].re;
      D -= rhs[3].re;
      qreal sc = fabsq(A) + fabsq(B) + fabsq(C) + fabsq(D) + 1;
      if (fabsq(rhs[0].re) + fabsq(rhs[1].re) + fabsq(rhs[2].re) + fabsq(rhs[3].re) <
          1e-32Q * sc)
        break;
    }
    m.Fp = {qcplx(D), qcplx(0, C), qcplx(B), qcplx(0, A), qcplx(-1)};
    qpoly dFp = qderiv(m.Fp);
    qreal rscale = 0;
    for (int i = 0; i < 4; ++i) {
      qcplx r = qnewton(m.Fp, dFp, sel[i]);
      if (numq::abs(r) > rscale) rscale = numq::abs(r);
      sel[i] = r;
    }
    for (int i = 0; i < 4; ++i) {
      qcplx r = sel[i];
      if (fabsq(r.im) < 1e-10Q * rscale)
        throw DegenerateSpectrumError(
            "output spectrum has a real-axis zero; causal factorization undefined");
      if (!(r.im < 0))
        throw FactorizationError("causal factor root escaped the lower half plane");
      m.Fproots[i] = r;
    }
  }

  // causal extraction per target: c'(x) F + c(x) Fp* = N
  {
    qpoly Fc = pconj(m.F);
    qpoly Fpc = pconj(m.Fp);
    qpoly u = {qcplx(-m.d2h), qcplx(0), qcplx(1)};
    qreal rhof = m.rho0 + m.xi0 * m.rho1;
    qpoly K = padd(pmul(u, Fc), pscale(pmul(u, u), qcplx(rhof)));
    qpoly L = pscale(padd(Fc, pscale(u, qcplx(rhof))), qcplx(-1));
    qpoly x1 = {qcplx(0), qcplx(1)};
    std::array<qpoly, 4> Ns = {K, pscale(pmul(x1, K), qcplx(0, -1)), L,
                               pscale(pmul(x1, L), qcplx(0, -1))};
    for (int t = 0; t < 4; ++t) {
      std::vector<std::vector<qcplx>> A(8, std::vector<qcplx>(8));
      std::vector<qcplx> b(8);
      for (int k = 0; k <= 7; ++k) {
        for (int j = 0; j <= 3; ++j) {
          if (k - j >= 0 && k - j <= 4) {
            A[k][j] += m.F[k - j];
            A[k][4 + j] += Fpc[k - j];
          }
        }
        b[k] = k < (int)Ns[t].size() ? Ns[t][k] : qcplx();
      }
      numq::qsolve(A, b);
      m.cubp[t] = {b[0], b[1], b[2], b[3]};
      m.cub[t] = {b[4], b[5], b[6], b[7]};
    }
  }
  return m;
}

OneModeKernel build_one_mode_kernel(const PhysicalParams& p, double delta, double N,
                                    PhotonConvention conv, qreal W0_hint) {
  if (!(N > 0)) throw std::domain_error("dissipation multiplier N must be positive");
  OneModeKernel k;
  Constants c = base_constants(p, delta, conv, (qreal)N * (qreal)p.mech_decay);
  OutputConstantsQ o = output_constants(c);
  k.M = c.M;

  qreal wm2 = c.Omega * c.Omega - 2 * c.hbar * c.G0 * c.G0 * c.nc * c.Delta / (c.M * c.den);
  qreal r2 = o.C2 / o.C1;
  qreal r3 = (o.C3_0 + c.Xi * o.C3_xi) / o.C1;
  k.alpha = -2 * r2 + c.gamma_m * c.gamma_m - 2 * wm2;
  k.beta = r3 + 2 * r2 * wm2 + wm2 * wm2;
  if (!(k.beta >= 0))
    throw std::domain_error("one-mode output spectrum not factorizable (beta < 0)");
  qreal sqb = sqrtq(k.beta);
  qreal g2 = k.alpha + 2 * sqb;
  if (!(g2 >= 0))
    throw std::domain_error("one-mode output spectrum not factorizable (Gamma'^2 < 0)");
  qreal Gp = sqrtq(g2), Op2 = sqb;

  k.W0 = W0_hint > 0 ? W0_hint : sqrtq(fabsq(wm2));
  qreal W0 = k.W0;
  k.gh = c.gamma_m / W0;
  k.wm2h = wm2 / (W0 * W0);
  k.Gp_h = Gp / W0;
  k.Op2_h = Op2 / (W0 * W0);
  k.C1 = o.C1;
  k.C1q = o.C1q;
  k.r2 = r2 / (W0 * W0);
  k.r3 = r3 / (W0 * W0 * W0 * W0);
  qreal rho = o.rho0 + c.Xi * o.rho1;
  k.rho = rho / (W0 * W0);
  k.Wm = o.Wq0 + c.Xi * o.Wq1;
  k.Om_t2 = wm2 + rho;

  k.Fm = {qcplx(k.wm2h), qcplx(0, -k.gh), qcplx(-1)};
  k.Fpm = {qcplx(k.Op2_h), qcplx(0, -k.Gp_h), qcplx(-1)};
  auto quad_roots = [](qreal gg, qreal w2) {
    // roots of -x^2 - i gg x + w2; under- and overdamped cases
    qreal disc = w2 - gg * gg / 4;
    if (disc > 0) {
      qreal re = sqrtq(disc);
      return std::array<qcplx, 2>{qcplx(re, -gg / 2), qcplx(-re, -gg / 2)};
    }
    qreal im = sqrtq(-disc);
    return std::array<qcplx, 2>{qcplx(0, -gg / 2 + im), qcplx(0, -gg / 2 - im)};
  };
  k.Fmroots = quad_roots(k.gh, k.wm2h);
  k.Fpmroots = quad_roots(k.Gp_h, k.Op2_h);

  // printed closed-form filter constants
  qreal Den = (Gp * wm2 + c.gamma_m * Op2) * (c.gamma_m + Gp) +
              (wm2 - Op2) * (wm2 - Op2);
  qcplx Em = qcplx(0, 1) * qcplx((c.gamma_m + Gp) * (wm2 - k.Om_t2) / Den);
  qcplx Fm = qcplx((wm2 - c.gamma_m * c.gamma_m - c.gamma_m * Gp - Op2) *
                   (wm2 - k.Om_t2) / Den);
  qcplx Im = qcplx(0, -1) * qcplx(c.M * wm2) * Em;
  qcplx Jm = qcplx(c.M * (Op2 - wm2) / (Gp + c.gamma_m)) * Em;
  k.E_m = Em;
  k.F_m = Fm;
  k.I_m = Im;
  k.J_m = Jm;

  k.has_measurement = c.nc > 0 && c.G0 > 0 && p.detection_eff > 0;
  if (k.has_measurement) {
    k.nq = {Fm, Em * qcplx(W0)};
    // momentum filter: printed J_m fills the omega slot, I_m the constant
    k.np = {Im, Jm * qcplx(W0)};
  } else {
    k.nq = {qcplx(0)};
    k.np = {qcplx(0)};
  }
  return k;
}

namespace {

struct FilterSide {
  std::array<qpoly, 2> h;          // reduced numerators for targets (a, b)
  std::vector<qcplx> roots;        // causal-factor roots (2 or 4)
  std::array<PoleMode, 4> mode{};  // tags (two-mode factor only)
  bool tagged = false;
  int n = 0;
};

KernelTerm assemble(const KernelModel* two, qreal W0, qreal C1, qreal C1q,
                    const std::vector<qcplx>& plant_roots,
                    const std::array<PoleMode, 4>& plant_mode, bool plant_tagged,
                    int nplant, const qpoly& Q0, const qpoly& Q1, const qpoly& Pa0,
                    const qpoly& Pa1, const qpoly& Pb0, const qpoly& Pb1,
                    const qpoly& J0, const qpoly& J1, const FilterSide& flt) {
  std::vector<qcplx> pr, prc, fl, flc;
  for (int i = 0; i < nplant; ++i) {
    pr.push_back(plant_roots[i]);
    prc.push_back(conj(plant_roots[i]));
  }
  for (int i = 0; i < flt.n; ++i) {
    fl.push_back(flt.roots[i]);
    flc.push_back(conj(flt.roots[i]));
  }
  qpoly Mf = pfrom_roots(qcplx(1), fl);
  qpoly Mfc = pfrom_roots(qcplx(1), flc);

  qpoly ha_c = pconj(flt.h[0]);
  const qpoly& hb = flt.h[1];
  qcplx kk(C1q * C1q / C1);

  qpoly N0 = pmul(Q0, pmul(Mf, Mfc));
  qpoly N1 = pmul(Q1, pmul(Mf, Mfc));
  if (flt.n > 0) {
    N0 = padd(N0, pscale(padd(padd(pmul(pmul(ha_c, Pb0), Mf),
                                   pmul(pmul(hb, pconj(Pa0)), Mfc)),
                              pmul(pmul(ha_c, hb), J0)),
                         kk));
    N1 = padd(N1, pscale(padd(padd(pmul(pmul(ha_c, Pb1), Mf),
                                   pmul(pmul(hb, pconj(Pa1)), Mfc)),
                              pmul(pmul(ha_c, hb), J1)),
                         kk));
  }

  KernelTerm t;
  t.scale = qcplx(W0);
  t.num0 = N0;
  t.num1 = N1;
  auto push = [&](qcplx z, PoleMode mode, bool tagged, int family) {
    num::PoleTag tag = !tagged ? num::PoleTag::plain
                               : (mode == PoleMode::pendulum ? num::PoleTag::pendulum
                                                             : num::PoleTag::rotational);
    t.poles.push_back({num::cplx((long double)z.re, (long double)z.im), tag, family});
    t.qpoles.push_back(z);
  };
  for (int i = 0; i < nplant; ++i) {
    push(plant_roots[i], plant_tagged ? plant_mode[i] : PoleMode::pendulum,
         plant_tagged, 0);
    push(conj(plant_roots[i]), plant_tagged ? plant_mode[i] : PoleMode::pendulum,
         plant_tagged, 0);
  }
  for (int i = 0; i < flt.n; ++i) {
    push(flt.roots[i], flt.tagged ? flt.mode[i] : PoleMode::pendulum, flt.tagged, 1);
    push(conj(flt.roots[i]), flt.tagged ? flt.mode[i] : PoleMode::pendulum, flt.tagged,
         1);
  }
  (void)two;
  return t;
}

}  // namespace

KernelTerm kernel_entry(const KernelModel& m, const OneModeKernel* om, int entry) {
  const qreal W0 = m.W0, W2 = W0 * W0, W4 = W2 * W2;
  qpoly u = {qcplx(-m.d2h), qcplx(0), qcplx(1)};
  qpoly x1 = {qcplx(0), qcplx(1)};
  qpoly one = {qcplx(1)};
  qpoly zero = {qcplx(0)};
  qpoly Fc = pconj(m.F);

  qpoly K0 = padd(pmul(u, Fc), pscale(pmul(u, u), qcplx(m.rho0)));
  qpoly K1 = pscale(pmul(u, u), qcplx(m.rho1));
  qpoly L0 = pscale(padd(Fc, pscale(u, qcplx(m.rho0))), qcplx(-1));
  qpoly L1 = pscale(u, qcplx(-m.rho1));

  qpoly Pq0 = pscale(K0, qcplx(1 / W2)), Pq1 = pscale(K1, qcplx(1 / W2));
  qpoly Pp0 = pscale(pmul(x1, K0), qcplx(0, -m.M / W0));
  qpoly Pp1 = pscale(pmul(x1, K1), qcplx(0, -m.M / W0));
  qpoly Pf0 = pscale(L0, qcplx(m.wBR2 / W4)), Pf1 = pscale(L1, qcplx(m.wBR2 / W4));
  qpoly PP0 = pscale(pmul(x1, L0), qcplx(0, -m.J * m.wBR2 / (W2 * W0)));
  qpoly PP1 = pscale(pmul(x1, L1), qcplx(0, -m.J * m.wBR2 / (W2 * W0)));

  qpoly J0 = padd(pmul(m.F, Fc),
                  padd(pscale(pmul(padd(m.F, Fc), u), qcplx(m.r2)),
                       pscale(pmul(u, u), qcplx(m.r30))));
  qpoly J1 = pscale(pmul(u, u), qcplx(m.r31));

  FilterSide flt;
  if (om) {
    if (om->has_measurement) {
      flt.roots.assign(om->Fpmroots.begin(), om->Fpmroots.end());
      flt.n = 2;
      flt.tagged = false;
    }
  } else if (m.has_measurement) {
    // reduced two-mode filter numerators: pref_t * c_t / W0^4
    std::array<qreal, 4> pref = {W2, m.M * W2 * W0, m.wBR2, m.J * m.wBR2 * W0};
    auto reduced = [&](int t) { return pscale(m.cub[t], qcplx(pref[t] / W4)); };
    flt.roots.assign(m.Fproots.begin(), m.Fproots.end());
    flt.n = 4;
    flt.tagged = true;
    // classify factor roots against the plant groups
    qreal re_p = 0, re_r = 0;
    for (int i = 0; i < 4; ++i) {
      qreal r = fabsq(m.Froots[i].re);
      (m.Fmode[i] == PoleMode::pendulum ? re_p : re_r) =
          m.Fmode[i] == PoleMode::pendulum ? (r > re_p ? r : re_p)
                                           : (r > re_r ? r : re_r);
    }
    qreal gmean = sqrtq(re_p * re_r);
    for (int i = 0; i < 4; ++i)
      flt.mode[i] = fabsq(m.Fproots[i].re) < gmean ? PoleMode::rotational
                                                   : PoleMode::pendulum;
    switch (entry) {
      case 0: flt.h = {reduced(0), reduced(0)}; break;
      case 1: flt.h = {reduced(0), reduced(1)}; break;
      case 2: flt.h = {reduced(1), reduced(1)}; break;
      case 3: flt.h = {reduced(2), reduced(2)}; break;
      case 4: flt.h = {reduced(2), reduced(3)}; break;
      case 5: flt.h = {reduced(3), reduced(3)}; break;
    }
  }
  if (om) {
    if (entry > 2)
      throw std::out_of_range("one-mode filter has no rotational block");
    if (om->has_measurement) {
      switch (entry) {
        case 0: flt.h = {pscale(om->nq, qcplx(1 / W2)), pscale(om->nq, qcplx(1 / W2))}; break;
        case 1: flt.h = {pscale(om->nq, qcplx(1 / W2)), pscale(om->np, qcplx(1 / W2))}; break;
        case 2: flt.h = {pscale(om->np, qcplx(1 / W2)), pscale(om->np, qcplx(1 / W2))}; break;
      }
    }
  }

  std::vector<qcplx> proots(m.Froots.begin(), m.Froots.end());
  qpoly uu = pmul(u, u), xx = pmul(x1, x1);
  switch (entry) {
    case 0:
      return assemble(&m, W0, m.C1, m.C1q, proots, m.Fmode, true, 4,
                      pscale(uu, qcplx(m.Wq0 / W4)), pscale(uu, qcplx(m.Wq1 / W4)),
                      Pq0, Pq1, Pq0, Pq1, J0, J1, flt);
    case 1:
      return assemble(&m, W0, m.C1, m.C1q, proots, m.Fmode, true, 4, zero, zero, Pq0,
                      Pq1, Pp0, Pp1, J0, J1, flt);
    case 2:
      return assemble(&m, W0, m.C1, m.C1q, proots, m.Fmode, true, 4,
                      pscale(pmul(xx, uu), qcplx(m.M * m.M * m.Wq0 / W2)),
                      pscale(pmul(xx, uu), qcplx(m.M * m.M * m.Wq1 / W2)), Pp0, Pp1,
                      Pp0, Pp1, J0, J1, flt);
    case 3:
      return assemble(&m, W0, m.C1, m.C1q, proots, m.Fmode, true, 4,
                      pscale(one, qcplx(m.wBR2 * m.wBR2 * m.Wq0 / (W4 * W4))),
                      pscale(one, qcplx(m.wBR2 * m.wBR2 * m.Wq1 / (W4 * W4))), Pf0,
                      Pf1, Pf0, Pf1, J0, J1, flt);
    case 4:
      return assemble(&m, W0, m.C1, m.C1q, proots, m.Fmode, true, 4, zero, zero, Pf0,
                      Pf1, PP0, PP1, J0, J1, flt);
    case 5:
      return assemble(&m, W0, m.C1, m.C1q, proots, m.Fmode, true, 4,
                      pscale(xx, qcplx(m.J * m.J * m.wBR2 * m.wBR2 * m.Wq0 /
                                       (W4 * W2))),
                      pscale(xx, qcplx(m.J * m.J * m.wBR2 * m.wBR2 * m.Wq1 /
                                       (W4 * W2))),
                      PP0, PP1, PP0, PP1, J0, J1, flt);
    default:
      throw std::out_of_range("entry index");
  }
}

KernelTerm kernel_entry_one_mode(const OneModeKernel& k, int entry) {
  const qreal W0 = k.W0, W2 = W0 * W0, W4 = W2 * W2;
  qpoly x1 = {qcplx(0), qcplx(1)};
  qpoly one = {qcplx(1)};
  qpoly zero = {qcplx(0)};
  qpoly Fmc = pconj(k.Fm);

  qpoly Km = padd(Fmc, qpoly{qcplx(k.rho)});
  qpoly Pq = pscale(Km, qcplx(1 / W2));
  qpoly Pp = pscale(pmul(x1, Km), qcplx(0, -k.M / W0));
  qpoly Jm = padd(pmul(k.Fm, Fmc),
                  padd(pscale(padd(k.Fm, Fmc), qcplx(k.r2)), qpoly{qcplx(k.r3)}));

  FilterSide flt;
  if (k.has_measurement) {
    flt.roots.assign(k.Fpmroots.begin(), k.Fpmroots.end());
    flt.n = 2;
  }
  std::vector<qcplx> proots(k.Fmroots.begin(), k.Fmroots.end());
  std::array<PoleMode, 4> nomode{};
  qpoly hq = pscale(k.nq, qcplx(1 / W2)), hp = pscale(k.np, qcplx(1 / W2));

  switch (entry) {
    case 0: {
      FilterSide f = flt;
      if (f.n) f.h = {hq, hq};
      return assemble(nullptr, W0, k.C1, k.C1q, proots, nomode, false, 2,
                      pscale(one, qcplx(k.Wm / W4)), zero, Pq, zero, Pq, zero, Jm,
                      zero, f);
    }
    case 1: {
      FilterSide f = flt;
      if (f.n) f.h = {hq, hp};
      return assemble(nullptr, W0, k.C1, k.C1q, proots, nomode, false, 2, zero, zero,
                      Pq, zero, Pp, zero, Jm, zero, f);
    }
    case 2: {
      FilterSide f = flt;
      if (f.n) f.h = {hp, hp};
      return assemble(nullptr, W0, k.C1, k.C1q, proots, nomode, false, 2,
                      pscale(pmul(x1, x1), qcplx(k.M * k.M * k.Wm / W2)), zero, Pp,
                      zero, Pp, zero, Jm, zero, f);
    }
    default:
      throw std::out_of_range("one-mode entry index");
  }
}

double kernel_residues(const KernelTerm& t, const KernelXi& xi, bool discard_rotational,
                       bool discard_pendulum) {
  int deg = std::max(numq::pdeg(t.num0), numq::pdeg(t.num1));
  if (deg > (int)t.qpoles.size() - 2)
    throw std::domain_error("rational term does not decay fast enough");
  qcplx total;
  for (size_t i = 0; i < t.qpoles.size(); ++i) {
    const num::Pole& pi = t.poles[i];
    if (!(t.qpoles[i].im > 0)) continue;
    if (discard_rotational && pi.tag == num::PoleTag::rotational) continue;
    if (discard_pendulum && pi.tag == num::PoleTag::pendulum) continue;
    qcplx p = t.qpoles[i];
    qcplx dprod(1);
    for (size_t kx = 0; kx < t.qpoles.size(); ++kx) {
      if (kx == i) continue;
      qcplx diff = p - t.qpoles[kx];
      bool conj_partner =
          t.qpoles[kx].re == p.re && t.qpoles[kx].im == -p.im;
      if (!conj_partner) {
        qreal lim = (t.poles[kx].family == pi.family ? 1e-6Q : 1e-11Q) *
                    numq::abs(p);
        if (numq::abs(diff) < lim)
          throw num::NearDegeneratePoles("nearly coincident poles in residue sum");
      }
      dprod *= diff;
    }
    qreal xival = xi.pole_local
                      ? xi.xi0 * xi.anchor / (fabsq(p.re) > xi.anchor ? fabsq(p.re)
                                                                      : xi.anchor)
                      : xi.flat;
    qcplx num = peval(t.num0, p) + qcplx(xival) * peval(t.num1, p);
    total += t.scale * num / dprod;
  }
  // (1/2pi) * 2 pi i * sum -> Re[i * total]
  return (double)(-total.im);
}

namespace {

qcplx from_roots_at(qcplx lead, const qcplx* roots, int n, qcplx x) {
  qcplx acc = lead;
  for (int i = 0; i < n; ++i) acc *= (x - roots[i]);
  return acc;
}

struct PointwiseModel {
  // everything needed to evaluate the four-term integrand at real x
  const KernelModel* m;
  const OneModeKernel* om;
  int entry;
  qreal xi;

  qreal operator()(qreal x) const {
    const KernelModel& km = *m;
    qcplx X(x);
    qcplx F = from_roots_at(qcplx(-1), km.Froots.data(), 4, X);
    qcplx Fc = conj(F);  // real x
    qreal absF2 = numq::norm(F);
    qreal u = x * x - km.d2h;

    // plant spectra
    qreal W = km.Wq0 + xi * km.Wq1;
    qreal rho = km.rho0 + xi * km.rho1;
    qreal r3 = km.r30 + xi * km.r31;
    qreal W0 = km.W0, W2 = W0 * W0, W4 = W2 * W2;

    qcplx Kq = (Fc + qcplx(rho * u)) * qcplx(u);     // u Fc + rho u^2
    qcplx Jv = F * Fc + qcplx(2 * km.r2 * u) * qcplx(F.re) + qcplx(r3 * u * u);
    // S_XX = C1 Jv / |F|^2 ; S_XA,t = C1q P_t / |F|^2
    auto entry_pair = [&](int e, qcplx& Pa, qcplx& Pb, qreal& Qab) {
      qcplx Pq = Kq * qcplx(1 / W2);
      qcplx Pp = qcplx(0, -km.M * x / W0) * Kq;
      qcplx Lv = -(Fc + qcplx(rho * u));
      qcplx Pf = Lv * qcplx(km.wBR2 / W4);
      qcplx PP = qcplx(0, -km.J * km.wBR2 * x / (W2 * W0)) * Lv;
      switch (e) {
        case 0: Pa = Pq; Pb = Pq; Qab = W * u * u / W4; break;
        case 1: Pa = Pq; Pb = Pp; Qab = 0; break;
        case 2: Pa = Pp; Pb = Pp; Qab = km.M * km.M * W * x * x * u * u / W2; break;
        case 3: Pa = Pf; Pb = Pf; Qab = km.wBR2 * km.wBR2 * W / (W4 * W4); break;
        case 4: Pa = Pf; Pb = PP; Qab = 0; break;
        default: Pa = PP; Pb = PP;
                 Qab = km.J * km.J * km.wBR2 * km.wBR2 * W * x * x / (W4 * W2);
      }
    };
    qcplx Pa, Pb;
    qreal Qab = 0;
    entry_pair(entry, Pa, Pb, Qab);

    // filters
    qcplx Ha, Hb;
    bool meas = om ? om->has_measurement : km.has_measurement;
    if (meas) {
      if (om) {
        qcplx Fpm = from_roots_at(qcplx(-1), om->Fpmroots.data(), 2, X);
        qcplx hq = peval(om->nq, X) * qcplx(1 / W2);
        qcplx hp = peval(om->np, X) * qcplx(1 / W2);
        qcplx Hq = qcplx(km.C1q / km.C1) * hq / Fpm;
        qcplx Hp = qcplx(km.C1q / km.C1) * hp / Fpm;
        Ha = entry == 2 ? Hp : Hq;
        Hb = entry == 0 ? Hq : Hp;
      } else {
        qcplx Fp = from_roots_at(qcplx(-1), km.Fproots.data(), 4, X);
        qreal pref[4] = {W2, km.M * W2 * W0, km.wBR2, km.J * km.wBR2 * W0};
        auto Hof = [&](int t) {
          return qcplx(km.C1q / km.C1 * pref[t] / W4) * peval(km.cub[t], X) / Fp;
        };
        int ta, tb;
        switch (entry) {
          case 0: ta = 0; tb = 0; break;
          case 1: ta = 0; tb = 1; break;
          case 2: ta = 1; tb = 1; break;
          case 3: ta = 2; tb = 2; break;
          case 4: ta = 2; tb = 3; break;
          default: ta = 3; tb = 3;
        }
        Ha = Hof(ta);
        Hb = Hof(tb);
      }
    } else {
      Ha = Hb = qcplx();
    }

    // Re[S_ab - conj(Ha) S_XA,b - Hb conj(S_XA,a) + conj(Ha) Hb S_XX]
    qcplx Sxb = qcplx(km.C1q) * Pb / qcplx(absF2);
    qcplx Sxa = qcplx(km.C1q) * Pa / qcplx(absF2);
    qcplx val = qcplx(Qab / absF2) - conj(Ha) * Sxb - Hb * conj(Sxa) +
                conj(Ha) * Hb * qcplx(km.C1) * Jv / qcplx(absF2);
    return val.re;
  }
};

struct PointwiseOneMode {
  const OneModeKernel* k;
  int entry;

  qreal operator()(qreal x) const {
    const OneModeKernel& km = *k;
    qcplx X(x);
    qcplx Fm = from_roots_at(qcplx(-1), km.Fmroots.data(), 2, X);
    qcplx Fmc = conj(Fm);
    qreal absF2 = numq::norm(Fm);
    qreal W0 = km.W0, W2 = W0 * W0, W4 = W2 * W2;

    qcplx Km = Fmc + qcplx(km.rho);
    qcplx Jm = Fm * Fmc + qcplx(2 * km.r2) * qcplx(Fm.re) + qcplx(km.r3);
    qcplx Pa, Pb;
    qreal Qab;
    qcplx Pq = Km * qcplx(1 / W2);
    qcplx Pp = qcplx(0, -km.M * x / W0) * Km;
    switch (entry) {
      case 0: Pa = Pq; Pb = Pq; Qab = km.Wm / W4; break;
      case 1: Pa = Pq; Pb = Pp; Qab = 0; break;
      default: Pa = Pp; Pb = Pp; Qab = km.M * km.M * km.Wm * x * x / W2;
    }
    qcplx Ha, Hb;
    if (km.has_measurement) {
      qcplx Fpm = from_roots_at(qcplx(-1), km.Fpmroots.data(), 2, X);
      qcplx Hq = qcplx(km.C1q / km.C1 / W2) * peval(km.nq, X) / Fpm;
      qcplx Hp = qcplx(km.C1q / km.C1 / W2) * peval(km.np, X) / Fpm;
      Ha = entry == 2 ? Hp : Hq;
      Hb = entry == 0 ? Hq : Hp;
    } else {
      Ha = Hb = qcplx();
    }
    qcplx Sxb = qcplx(km.C1q) * Pb / qcplx(absF2);
    qcplx Sxa = qcplx(km.C1q) * Pa / qcplx(absF2);
    qcplx val = qcplx(Qab / absF2) - conj(Ha) * Sxb - Hb * conj(Sxa) +
                conj(Ha) * Hb * qcplx(km.C1) * Jm / qcplx(absF2);
    return val.re;
  }
};

}  // namespace

double kernel_quadrature(const KernelModel& m, const OneModeKernel* om, int entry,
                         double omega_max, double rel_tol) {
  KernelTerm term = kernel_entry(m, om, entry);
  PointwiseModel pw{&m, om, entry, m.xi0};
  auto f = [&pw, &m](num::real x) {
    return (num::real)(pw((qreal)x) * m.W0);  // scale = W0 from d omega = W0 dx
  };
  num::real acc = num::integrate_adaptive(f, term.poles,
                                          (num::real)(omega_max / (double)m.W0),
                                          (num::real)rel_tol);
  num::RationalTerm ld = to_ld_term(term);
  acc += num::asymptotic_tail(ld, (long double)(double)m.xi0,
                              (num::real)(omega_max / (double)m.W0));
  return (double)acc;
}

double kernel_quadrature_one_mode(const OneModeKernel& om, int entry, double omega_max,
                                  double rel_tol) {
  KernelTerm term = kernel_entry_one_mode(om, entry);
  PointwiseOneMode pw{&om, entry};
  auto f = [&pw, &om](num::real x) { return (num::real)(pw((qreal)x) * om.W0); };
  num::real acc = num::integrate_adaptive(f, term.poles,
                                          (num::real)(omega_max / (double)om.W0),
                                          (num::real)rel_tol);
  num::RationalTerm ld = to_ld_term(term);
  acc += num::asymptotic_tail(ld, 0.0L, (num::real)(omega_max / (double)om.W0));
  return (double)acc;
}

num::RationalTerm to_ld_term(const KernelTerm& t) {
  num::RationalTerm out;
  out.scale = num::cplx((long double)t.scale.re, (long double)t.scale.im);
  std::vector<num::cplx> c0, c1;
  for (const qcplx& v : t.num0) c0.push_back(num::cplx((long double)v.re, (long double)v.im));
  for (const qcplx& v : t.num1) c1.push_back(num::cplx((long double)v.re, (long double)v.im));
  out.numerator = num::Poly(c0);
  out.numerator_xi = num::Poly(c1);
  out.poles = t.poles;
  return out;
}

}  // namespace mirrorstate::detail
