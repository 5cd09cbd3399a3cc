#pragma once

#include <array>
#include <complex>
#include <memory>
#include <stdexcept>
#include <vector>

#include "mirrorstate/spectra.hpp"

namespace mirrorstate {

namespace detail {
struct KernelModel;
}

class DegenerateSpectrumError : public std::runtime_error {
 public:
  explicit DegenerateSpectrumError(const std::string& w) : std::runtime_error(w) {}
};
class FactorizationError : public std::runtime_error {
 public:
  explicit FactorizationError(const std::string& w) : std::runtime_error(w) {}
};

// Causal factor F'(w) = -w^4 + At w^3 + Bt w^2 + Ct w + Dt of
// J(w) = F'(w) F'(w)^*; all roots in the lower half plane.
struct QuarticFactor {
  std::array<std::complex<double>, 4> ABCD{};  // dimensional At, Bt, Ct, Dt
  std::array<std::complex<double>, 4> roots{}; // dimensional, Im < 0
  double sqrtC1 = 0;
  // scaled representation (x = omega / W0), leading coefficient -1
  double W0 = 0;
  num::Poly Fp_hat;
  std::vector<num::cplx> roots_hat;
};

// Even real polynomial J in scaled units together with its y = x^2 form.
num::Poly J_hat_poly(const TwoModeSpectra& s);

// Root-selection factorization (companion roots of J in y = x^2, lower
// half-plane selection) followed by a Newton polish on the coefficient
// identities; verifies F' F'* = J on a grid.
QuarticFactor spectral_factorize(const TwoModeSpectra& s);

// Same backend on a caller-supplied degree-8 real even polynomial
// (coefficients of x^0..x^8 in units scaled by W0).
QuarticFactor spectral_factorize_scaled(const num::Poly& J_hat, double C1, double W0);

// Numerical solution of the eight coefficient equations alone, started from
// the unpolished root estimates. Cross-check backend.
QuarticFactor factorize_coefficient_system(const TwoModeSpectra& s);

// Raw residuals of the eight coefficient equations (lhs - rhs), in
// dimensional units.
std::array<std::complex<double>, 8> factorization_coefficient_check(
    const TwoModeSpectra& s, const QuarticFactor& qf);

// S = S+ S- split; S+ has the poles of F (lower half plane) and zeros of F'.
struct SplitSpectrum {
  const TwoModeSpectra* s = nullptr;
  const QuarticFactor* qf = nullptr;
  std::complex<double> Splus(double omega) const;
  std::complex<double> Sminus(double omega) const;
};

enum class Target { dq, dp, dphi, dpi };

// Cubic numerators of the causal (retained) and anti-causal (discarded)
// parts of the filter decomposition for one target variable.
struct CausalNumerator {
  Target target;
  num::Poly causal_hat, anticausal_hat;  // cubics in x
  double prefactor = 0;                  // dimensional multiplier, see below
  // dimensional cubic coefficient of w^j is prefactor * c_hat[j] / W0^j
  std::array<std::complex<double>, 4> causal_dim{};      // c0..c3
  std::array<std::complex<double>, 4> anticausal_dim{};  // c0..c3
};

CausalNumerator causal_extract(const TwoModeSpectra& s, const QuarticFactor& qf,
                               Target t);

// Filter bank; H_t = (C1q/C1) cubic_t / F', G_t = H_t S+.
struct WienerFilters {
  TwoModeSpectra spectra;
  QuarticFactor factor;
  std::array<CausalNumerator, 4> numerators;  // dq, dp, dphi, dpi
  // quad-precision model backing the covariance integrals
  std::shared_ptr<const detail::KernelModel> kernel;

  std::complex<double> H(Target t, double omega) const;
  std::complex<double> G(Target t, double omega) const;
  std::complex<double> H_opt(Target t, double omega) const;  // non-causal optimum
};

WienerFilters synthesize_filters(const TwoModeSpectra& s);

}  // namespace mirrorstate
