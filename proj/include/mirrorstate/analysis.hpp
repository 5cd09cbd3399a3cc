#pragma once

#include <vector>

#include "mirrorstate/covariance.hpp"

namespace mirrorstate {

// Contour of the Gaussian Wigner function at W = W_max / e, i.e. the locus
// u^T V^{-1} u = 2 in the normalized phase plane. Vacuum gives a circle of
// radius sqrt(2).
struct WignerEllipse {
  std::vector<double> x, y;    // contour points
  double semi_major = 0, semi_minor = 0;
  double angle = 0;            // orientation of the major axis, radians
};

struct EntanglementResult {
  double delta = 0;
  double kappa_ratio = 0;
  double log_negativity = 0;   // max(0, -ln nu_tilde)
  double nu_tilde = 0;         // smallest PPT symplectic eigenvalue
};

// 1 / sqrt(det V) for a vacuum-normalized covariance.
double purity(const CovMat2& normalized);

WignerEllipse wigner_ellipse(const CovMat2& normalized, int n_points = 256);

// Two-mirror entanglement from a differential-mode run (kappa, delta) and a
// common-mode run (kappa / kappa_ratio at the same physical detuning, i.e.
// normalized detuning kappa_ratio * delta).
EntanglementResult negativity(const PhysicalParams& p, double delta,
                              double kappa_ratio = 3.0,
                              PhotonConvention conv = PhotonConvention::steady_state);

}  // namespace mirrorstate
