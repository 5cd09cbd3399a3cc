#include "mirrorstate/covariance.hpp"

#include <cmath>
#include <stdexcept>

#include "mirrorstate/detail/kernel.hpp"
#include "mirrorstate/one_mode.hpp"

namespace mirrorstate {

using detail::KernelTerm;
using detail::KernelXi;
using num::real;

namespace {

constexpr double kOmegaMax = 6.283185307179586e6;  // 2*pi*1e6 rad/s

KernelXi kernel_xi(const detail::KernelModel& km, XiMode mode) {
  KernelXi xi;
  xi.flat = km.xi0;
  xi.xi0 = km.xi0;
  xi.anchor = km.anchor;
  xi.pole_local = mode == XiMode::pole_local;
  return xi;
}

const detail::KernelModel& kernel_of(const WienerFilters& wf) {
  if (!wf.kernel)
    throw std::logic_error("filter bank lacks its covariance kernel");
  return *wf.kernel;
}

double entry_value(const detail::KernelModel& km, const detail::OneModeKernel* om,
                   int entry, XiMode mode, Backend backend, bool disc_rot = false,
                   bool disc_pend = false) {
  KernelXi xi = kernel_xi(km, mode);
  if (backend == Backend::quadrature) {
    if (mode != XiMode::flat)
      throw std::invalid_argument(
          "quadrature backend supports the flat thermal convention only");
    return detail::kernel_quadrature(km, om, entry, kOmegaMax, 1e-10);
  }
  try {
    return detail::kernel_residues(detail::kernel_entry(km, om, entry), xi, disc_rot,
                                   disc_pend);
  } catch (const num::NearDegeneratePoles&) {
    if (disc_rot || disc_pend || mode != XiMode::flat) throw;
    return detail::kernel_quadrature(km, om, entry, kOmegaMax, 1e-10);
  }
}

void check_pole_separation(const detail::KernelModel& km) {
  double re_p = 0, re_r = 0;
  for (int i = 0; i < 4; ++i) {
    double r = std::abs((double)km.Froots[i].re);
    if (km.Fmode[i] == PoleMode::pendulum)
      re_p = std::max(re_p, r);
    else
      re_r = std::max(re_r, r);
  }
  if (re_r <= 0 || re_p / re_r < 2.0)
    throw std::domain_error(
        "pendulum/rotational poles not separated (|Re| ratio < 2); "
        "specify the pole set explicitly");
}

}  // namespace

num::XiSpec xi_spec(const TwoModeSpectra& s, XiMode mode) {
  num::XiSpec xi;
  xi.xi0 = s.noise.xi_m2;
  xi.flat = s.noise.xi_m2;
  xi.anchor = (real)s.p.pendulum_freq / s.W0;
  xi.pole_local = mode == XiMode::pole_local;
  return xi;
}

std::vector<num::RationalTerm> covariance_integrand(const WienerFilters& wf, int entry) {
  return {detail::to_ld_term(detail::kernel_entry(kernel_of(wf), nullptr, entry))};
}

ConditionalCovariances conditional_covariance(const WienerFilters& wf, Backend backend,
                                              XiMode mode) {
  const detail::KernelModel& km = kernel_of(wf);
  ConditionalCovariances out;
  out.Vc.tag = PoleMode::pendulum;
  out.Vr.tag = PoleMode::rotational;
  auto val = [&](int e) { return entry_value(km, nullptr, e, mode, backend); };
  out.Vc.v11 = val(0);
  out.Vc.v12 = val(1);
  out.Vc.v22 = val(2);
  out.Vr.v11 = val(3);
  out.Vr.v12 = val(4);
  out.Vr.v22 = val(5);
  return out;
}

ConditionalCovariances pole_filtered_covariance(const WienerFilters& wf,
                                                DiscardSet discard, XiMode mode) {
  if (discard == DiscardSet::none)
    return conditional_covariance(wf, Backend::residues, mode);
  const detail::KernelModel& km = kernel_of(wf);
  check_pole_separation(km);
  bool rot = discard == DiscardSet::rotational;
  bool pend = discard == DiscardSet::pendulum;
  auto val = [&](int e) {
    return entry_value(km, nullptr, e, mode, Backend::residues, rot, pend);
  };
  ConditionalCovariances out;
  out.Vc.tag = PoleMode::pendulum;
  out.Vr.tag = PoleMode::rotational;
  out.Vc.v11 = val(0);
  out.Vc.v12 = val(1);
  out.Vc.v22 = val(2);
  out.Vr.v11 = val(3);
  out.Vr.v12 = val(4);
  out.Vr.v22 = val(5);
  return out;
}

double quadrature_oracle(const WienerFilters& wf, int entry, double omega_max,
                         double rel_tol) {
  return detail::kernel_quadrature(kernel_of(wf), nullptr, entry, omega_max, rel_tol);
}

CovMat2 mismatched_covariance(const WienerFilters& wf, const OneModeFilters& om,
                              DiscardSet discard, Backend backend, XiMode mode) {
  const detail::KernelModel& km = kernel_of(wf);
  const detail::OneModeKernel& ok = one_mode_kernel_of(om);
  if (fabsq(ok.W0 - km.W0) > 1e-9Q * km.W0)
    throw std::invalid_argument("one-mode filter must share the two-mode frequency scale");
  if (discard != DiscardSet::none) check_pole_separation(km);
  bool rot = discard == DiscardSet::rotational;
  bool pend = discard == DiscardSet::pendulum;
  CovMat2 out;
  out.tag = PoleMode::pendulum;
  auto val = [&](int e) {
    if (discard != DiscardSet::none)
      return entry_value(km, &ok, e, mode, Backend::residues, rot, pend);
    return entry_value(km, &ok, e, mode, backend);
  };
  out.v11 = val(0);
  out.v12 = val(1);
  out.v22 = val(2);
  return out;
}

CovMat2 one_mode_covariance(const OneModeFilters& om, Backend backend) {
  const detail::OneModeKernel& ok = one_mode_kernel_of(om);
  KernelXi xi;  // thermal strength already folded into the one-mode constants
  CovMat2 out;
  out.tag = PoleMode::pendulum;
  auto val = [&](int e) {
    if (backend == Backend::quadrature)
      return detail::kernel_quadrature_one_mode(ok, e, kOmegaMax, 1e-10);
    try {
      return detail::kernel_residues(detail::kernel_entry_one_mode(ok, e), xi);
    } catch (const num::NearDegeneratePoles&) {
      return detail::kernel_quadrature_one_mode(ok, e, kOmegaMax, 1e-10);
    }
  };
  out.v11 = val(0);
  out.v12 = val(1);
  out.v22 = val(2);
  return out;
}

CovMat2 normalize_covariance(const CovMat2& V, const PhysicalParams& p,
                             double mode_freq) {
  if (V.normalized) return V;
  double m = V.tag == PoleMode::pendulum ? p.mirror_mass : p.moment_of_inertia;
  CovMat2 out;
  out.tag = V.tag;
  out.normalized = true;
  out.v11 = V.v11 * 2.0 * m * mode_freq / p.hbar;
  out.v12 = V.v12 * 2.0 / p.hbar;
  out.v22 = V.v22 * 2.0 / (p.hbar * m * mode_freq);
  return out;
}

}  // namespace mirrorstate
