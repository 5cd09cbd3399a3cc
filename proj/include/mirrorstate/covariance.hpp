#pragma once

#include "mirrorstate/rational.hpp"
#include "mirrorstate/wiener.hpp"

namespace mirrorstate {

struct OneModeFilters;

enum class Backend { residues, quadrature };
enum class DiscardSet { none, rotational, pendulum };

// Thermal-weight convention for the covariance integrals. flat (default)
// keeps the white thermal-force strength anchored at the bare pendulum
// frequency everywhere, matching the printed noise model; pole_local
// applies the structural 1/omega law at each residue pole's frequency
// instead. flat is also the convention under which the residue and
// quadrature backends evaluate the identical integrand.
enum class XiMode { flat, pole_local };

// 2x2 symmetric conditional covariance block. v11 is position-like, v22
// momentum-like. CGS until normalized.
struct CovMat2 {
  double v11 = 0, v12 = 0, v22 = 0;
  PoleMode tag = PoleMode::pendulum;
  bool normalized = false;
};

struct ConditionalCovariances {
  CovMat2 Vc;  // pendulum block (dq, dp)
  CovMat2 Vr;  // rotational block (dphi, dPi)
};

// Entry indices: 0 qq, 1 qp, 2 pp, 3 phiphi, 4 phipi, 5 pipi. The returned
// single combined term holds the full four-piece integrand
// S_ab - conj(H_a) S_XA,b - H_b conj(S_XA,a) + conj(H_a) H_b S_XAXA
// over the common denominator.
std::vector<num::RationalTerm> covariance_integrand(const WienerFilters& wf, int entry);
num::XiSpec xi_spec(const TwoModeSpectra& s, XiMode mode);

ConditionalCovariances conditional_covariance(const WienerFilters& wf,
                                              Backend backend = Backend::residues,
                                              XiMode xi = XiMode::flat);

// Residue sum restricted to the retained poles. Classification checks that
// pendulum- and rotational-like pole groups are separated by at least a
// factor two in |Re|.
ConditionalCovariances pole_filtered_covariance(const WienerFilters& wf,
                                                DiscardSet discard,
                                                XiMode xi = XiMode::flat);

// Adaptive-quadrature evaluation of one entry (the verification backend;
// flat thermal weight by construction).
double quadrature_oracle(const WienerFilters& wf, int entry,
                         double omega_max = 6.283185307179586e6,
                         double rel_tol = 1e-10);

// Conditional covariance of (dq, dp) when the point-mass-model filter is
// applied to the beam-model output.
CovMat2 mismatched_covariance(const WienerFilters& wf, const OneModeFilters& om,
                              DiscardSet discard = DiscardSet::none,
                              Backend backend = Backend::residues,
                              XiMode xi = XiMode::flat);

// One-mode filter applied to the one-mode model itself (V_cm); the
// point-mass model is viscously damped, so its thermal strength is flat.
CovMat2 one_mode_covariance(const OneModeFilters& om,
                            Backend backend = Backend::residues);

// Vacuum normalization: position scaled by 2 m omega / hbar, momentum by
// 2 / (hbar m omega), cross by 2 / hbar, with m = M (pendulum) or J
// (rotational) and omega the mode frequency.
CovMat2 normalize_covariance(const CovMat2& V, const PhysicalParams& p,
                             double mode_freq);

}  // namespace mirrorstate
