#include "mirrorstate/pipeline.hpp"

#include <cmath>

#include "mirrorstate/analysis.hpp"

namespace mirrorstate {

Pipeline Pipeline::build(const PhysicalParams& p, double delta,
                         const PipelineOptions& opts) {
  Pipeline pl;
  pl.params = p;
  if (opts.eta) pl.params.detection_eff = *opts.eta;
  pl.delta = delta;
  pl.options = opts;
  pl.spectra = build_spectra(pl.params, delta, opts.convention);
  pl.filters = synthesize_filters(pl.spectra);
  return pl;
}

ConditionalCovariances Pipeline::covariances(DiscardSet discard) const {
  if (discard == DiscardSet::none)
    return conditional_covariance(filters, options.backend, options.xi);
  return pole_filtered_covariance(filters, discard, options.xi);
}

OneModeFilters Pipeline::one_mode(double N) const {
  double w0 = filters.factor.W0 > 0 ? filters.factor.W0 : spectra.W0;
  return one_mode_filters(params, delta, N, options.convention, w0);
}

CovMat2 Pipeline::mismatched(double N, DiscardSet discard) const {
  return mismatched_covariance(filters, one_mode(N), discard, options.backend,
                               options.xi);
}

CovMat2 Pipeline::normalized_Vc(DiscardSet discard) const {
  return normalize_covariance(covariances(discard).Vc, params, pendulum_freq());
}

CovMat2 Pipeline::normalized_Vr(DiscardSet discard) const {
  return normalize_covariance(covariances(discard).Vr, params, rotational_freq());
}

double Pipeline::purity_two_mode(DiscardSet discard) const {
  return purity(normalized_Vc(discard));
}

double Pipeline::purity_mismatched(double N, DiscardSet discard) const {
  return purity(normalize_covariance(mismatched(N, discard), params, pendulum_freq()));
}

double Pipeline::pendulum_freq() const { return std::sqrt(spectra.lf.omega_AR2); }

double Pipeline::rotational_freq() const { return std::sqrt(spectra.lf.Delta_BR2); }

}  // namespace mirrorstate
