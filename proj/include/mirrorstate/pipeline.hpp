#pragma once

#include <optional>

#include "mirrorstate/covariance.hpp"
#include "mirrorstate/one_mode.hpp"

namespace mirrorstate {

struct PipelineOptions {
  std::optional<double> eta;  // overrides params.detection_eff
  PhotonConvention convention = PhotonConvention::steady_state;
  Backend backend = Backend::residues;
  XiMode xi = XiMode::flat;
};

// Full conditional-state pipeline at one operating point: steady state ->
// couplings -> spectra -> causal factorization -> filters -> covariances.
struct Pipeline {
  PhysicalParams params;
  double delta = 0;
  PipelineOptions options;
  TwoModeSpectra spectra;
  WienerFilters filters;

  static Pipeline build(const PhysicalParams& p, double delta,
                        const PipelineOptions& opts = {});

  ConditionalCovariances covariances(DiscardSet discard = DiscardSet::none) const;

  // One-mode filter with dissipation multiplier N applied to this model.
  CovMat2 mismatched(double N = 1.0, DiscardSet discard = DiscardSet::none) const;

  OneModeFilters one_mode(double N = 1.0) const;

  // vacuum-normalized blocks and purities
  CovMat2 normalized_Vc(DiscardSet discard = DiscardSet::none) const;
  CovMat2 normalized_Vr(DiscardSet discard = DiscardSet::none) const;
  double purity_two_mode(DiscardSet discard = DiscardSet::none) const;
  double purity_mismatched(double N = 1.0, DiscardSet discard = DiscardSet::none) const;

  double pendulum_freq() const;    // omega_AR (optical spring included)
  double rotational_freq() const;  // Delta_BR
};

}  // namespace mirrorstate
