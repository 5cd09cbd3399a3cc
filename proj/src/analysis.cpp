#include "mirrorstate/analysis.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mirrorstate/pipeline.hpp"

namespace mirrorstate {

double purity(const CovMat2& V) {
  if (!V.normalized) throw std::invalid_argument("purity needs a normalized covariance");
  long double det = (long double)V.v11 * V.v22 - (long double)V.v12 * V.v12;
  if (!(det > 0)) throw std::domain_error("covariance not positive definite");
  return (double)(1.0L / std::sqrt(det));
}

WignerEllipse wigner_ellipse(const CovMat2& V, int n_points) {
  if (!V.normalized)
    throw std::invalid_argument("wigner_ellipse needs a normalized covariance");
  // eigendecomposition of the symmetric 2x2
  double tr = V.v11 + V.v22;
  double df = V.v11 - V.v22;
  double rad = std::sqrt(df * df + 4.0 * V.v12 * V.v12);
  double l1 = 0.5 * (tr + rad), l2 = 0.5 * (tr - rad);
  if (!(l2 > 0)) throw std::domain_error("covariance not positive definite");
  double angle = 0.5 * std::atan2(2.0 * V.v12, df);

  WignerEllipse e;
  e.semi_major = std::sqrt(2.0 * l1);
  e.semi_minor = std::sqrt(2.0 * l2);
  e.angle = angle;
  e.x.resize(n_points + 1);
  e.y.resize(n_points + 1);
  double ca = std::cos(angle), sa = std::sin(angle);
  for (int i = 0; i <= n_points; ++i) {
    double t = 2.0 * std::numbers::pi * i / n_points;
    double ux = e.semi_major * std::cos(t), uy = e.semi_minor * std::sin(t);
    e.x[i] = ca * ux - sa * uy;
    e.y[i] = sa * ux + ca * uy;
  }
  return e;
}

EntanglementResult negativity(const PhysicalParams& p, double delta,
                              double kappa_ratio, PhotonConvention conv) {
  if (!(kappa_ratio > 0)) throw std::invalid_argument("kappa_ratio must be positive");

  PipelineOptions opts;
  opts.convention = conv;
  Pipeline diff = Pipeline::build(p, delta, opts);

  PhysicalParams pc = p;
  pc.optical_decay = p.optical_decay / kappa_ratio;
  Pipeline comm = Pipeline::build(pc, kappa_ratio * delta, opts);

  // Both blocks normalized with the same local scaling (differential-mode
  // frequency); E_N is invariant under that common local symplectic.
  double wref = std::sqrt(diff.spectra.lf.omega_AR2);
  CovMat2 vm = normalize_covariance(diff.covariances().Vc, p, wref);
  CovMat2 vp = normalize_covariance(comm.covariances().Vc, p, wref);

  // per-mirror block A and cross block C of the recombined two-mirror state
  double a11 = 0.5 * (vp.v11 + vm.v11), a12 = 0.5 * (vp.v12 + vm.v12),
         a22 = 0.5 * (vp.v22 + vm.v22);
  double c11 = 0.5 * (vp.v11 - vm.v11), c12 = 0.5 * (vp.v12 - vm.v12),
         c22 = 0.5 * (vp.v22 - vm.v22);

  long double detA = (long double)a11 * a22 - (long double)a12 * a12;
  long double detC = (long double)c11 * c22 - (long double)c12 * c12;
  long double detS = ((long double)vp.v11 * vp.v22 - (long double)vp.v12 * vp.v12) *
                     ((long double)vm.v11 * vm.v22 - (long double)vm.v12 * vm.v12);
  if (!(detA > 0) || !(detS > 0))
    throw std::domain_error("two-mirror covariance not positive definite");

  // PPT symplectic eigenvalue with vacuum normalized to 1
  long double dtilde = 2.0L * detA - 2.0L * detC;
  long double inside = dtilde * dtilde - 4.0L * detS;
  if (inside < 0) inside = 0;
  long double nu2 = 0.5L * (dtilde - std::sqrt(inside));
  if (!(nu2 > 0)) throw std::domain_error("PPT eigenvalue collapsed to zero");
  double nu = (double)std::sqrt(nu2);

  EntanglementResult r;
  r.delta = delta;
  r.kappa_ratio = kappa_ratio;
  r.nu_tilde = nu;
  r.log_negativity = nu < 1.0 ? -std::log(nu) : 0.0;
  return r;
}

}  // namespace mirrorstate
