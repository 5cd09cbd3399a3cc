#pragma once

// Quad-precision covariance kernel: rebuilds the scaled frequency-domain
// model from the raw parameters, factorizes the output spectrum, solves the
// causal extractions and sums residues, all in __float128. Exports
// long-double terms for the quadrature backend and double snapshots for the
// public structs.

#include <array>
#include <optional>
#include <vector>

#include "mirrorstate/detail/quad.hpp"
#include "mirrorstate/params.hpp"
#include "mirrorstate/rational.hpp"
#include "mirrorstate/spectra.hpp"

namespace mirrorstate::detail {

using numq::qcplx;
using numq::qpoly;
using numq::qreal;

struct KernelModel {
  // scaled model, x = omega / W0
  qreal W0 = 0;
  qreal gh = 0;              // gamma_m / W0
  qreal wAR2h = 0, d2h = 0;  // omega_AR^2/W0^2, Delta_BR^2/W0^2
  qreal crossh = 0;          // Delta_AR^2 omega_BR^2 / W0^4
  qreal C1 = 0, C1q = 0;
  qreal r2 = 0, r30 = 0, r31 = 0;     // C2/C1 and C3 split over C1, scaled
  qreal rho0 = 0, rho1 = 0;           // rho_q split, scaled by W0^2
  qreal Wq0 = 0, Wq1 = 0;             // drive and thermal parts of W
  qreal xi0 = 0;                      // thermal strength anchor (CGS)
  qreal anchor = 0;                   // Omega / W0
  qreal M = 0, J = 0, wBR2 = 0;
  double eta = 1;

  qpoly F;                         // scaled susceptibility, leading -1
  std::array<qcplx, 4> Froots{};   // Im < 0
  std::array<PoleMode, 4> Fmode{};
  qpoly Fp;                        // causal factor, leading -1
  std::array<qcplx, 4> Fproots{};

  // causal/anticausal cubics per target (dq, dp, dphi, dpi), with the
  // dimensional prefactor folded so H_t = (C1q/C1) cub[t](x) / Fp(x)
  std::array<qpoly, 4> cub{}, cubp{};
  bool has_measurement = false;
};

struct OneModeKernel {
  qreal W0 = 0;
  qreal M = 0;
  qreal gh = 0, wm2h = 0;          // gamma_m/W0, omega_m^2/W0^2
  qreal C1 = 0, C1q = 0, r2 = 0, r3 = 0;
  qreal rho = 0;                   // rho_q scaled by W0^2
  qreal Wm = 0;                    // drive^2 + xi_m/M^2 (flat, viscous model)
  qreal Gp_h = 0, Op2_h = 0;       // Gamma'/W0, Omega'^2/W0^2
  qpoly Fm, Fpm;                   // quadratics, leading -1
  std::array<qcplx, 2> Fmroots{}, Fpmroots{};
  qpoly nq, np;                    // filter numerators so H = (C1q/C1) n(x)/Fpm(x)
  bool has_measurement = false;
  // printed closed-form constants, for the public struct
  qreal alpha = 0, beta = 0, Om_t2 = 0;
  qcplx E_m, F_m, I_m, J_m;
};

KernelModel build_kernel(const PhysicalParams& p, double delta, PhotonConvention conv);
OneModeKernel build_one_mode_kernel(const PhysicalParams& p, double delta, double N,
                                    PhotonConvention conv, qreal W0_hint);

// entry: 0 qq, 1 qp, 2 pp, 3 phiphi, 4 phipi, 5 pipi (3..5 two-mode only)
struct KernelTerm {
  qcplx scale;
  qpoly num0, num1;  // N = num0 + xi * num1
  std::vector<num::Pole> poles;  // long-double pole list with tags/families
  std::vector<qcplx> qpoles;     // same poles in quad precision
};

// optimal two-mode entry (om == nullptr) or one-mode filter applied to the
// two-mode plant
KernelTerm kernel_entry(const KernelModel& m, const OneModeKernel* om, int entry);
// one-mode filter applied to the one-mode plant (V_cm)
KernelTerm kernel_entry_one_mode(const OneModeKernel& om, int entry);

struct KernelXi {
  qreal flat = 0;
  bool pole_local = false;
  qreal xi0 = 0, anchor = 0;
};

double kernel_residues(const KernelTerm& t, const KernelXi& xi,
                       bool discard_rotational = false, bool discard_pendulum = false);

// Adaptive-quadrature backend: evaluates the four-piece integrand pointwise
// in quad precision from the root-factored model (the combined numerator
// cancels too deeply for any pointwise polynomial form), flat thermal weight.
double kernel_quadrature(const KernelModel& m, const OneModeKernel* om, int entry,
                         double omega_max, double rel_tol);
double kernel_quadrature_one_mode(const OneModeKernel& om, int entry,
                                  double omega_max, double rel_tol);

// long-double export (tails, tests, diagnostics)
num::RationalTerm to_ld_term(const KernelTerm& t);

}  // namespace mirrorstate::detail
