#include "mirrorstate/steady_state.hpp"

#include <cmath>
#include <stdexcept>

namespace mirrorstate {

namespace {

long double exp_or_zero(long double x) {
  // exp(x) for very negative x without underflow warnings in hot paths
  return x < -11400.0L ? 0.0L : std::exp(x);
}

struct BeamGeometry {
  long double C1;     // C' = hbar G0 n_c / T, the slope of the linear part
  long double beta;   // sqrt(T / E0 I)
  long double hb;     // h * beta
  long double e2;     // exp(-2 beta ell)
  long double denom;  // (1 + h beta) + (1 - h beta) exp(-2 beta ell)
};

BeamGeometry beam_geometry(const PhysicalParams& p, double n_c) {
  DerivedConstants d = derive_constants(p);
  BeamGeometry g;
  g.beta = d.beta;
  g.C1 = (long double)p.hbar * p.coupling * n_c / d.tension;
  g.hb = (long double)p.offset * d.beta;
  g.e2 = exp_or_zero(-2.0L * g.beta * p.beam_length);
  g.denom = (1.0L + g.hb) + (1.0L - g.hb) * g.e2;
  return g;
}

}  // namespace

double photon_number(const PhysicalParams& p, double delta, PhotonConvention conv) {
  DerivedConstants d = derive_constants(p);
  long double E2 = (long double)d.drive_amplitude * d.drive_amplitude;
  long double k2 = (long double)p.optical_decay * p.optical_decay;
  if (conv == PhotonConvention::steady_state) {
    long double D = -2.0L * p.optical_decay * delta;
    return (double)(E2 / (k2 + D * D));
  }
  return (double)(E2 / (k2 * (1.0L + (long double)delta * delta)));
}

double beam_profile_exact(const PhysicalParams& p, double delta, double sigma,
                          PhotonConvention conv) {
  if (sigma < 0.0 || sigma > p.beam_length)
    throw std::out_of_range("sigma outside [0, ell]");
  BeamGeometry g = beam_geometry(p, photon_number(p, delta, conv));
  long double bs = g.beta * sigma;
  // Numerator of the exponential part, divided through by exp(2 beta ell):
  //   (1 - h b)(1 - e^{b s}) e^{-2 b l} + (1 + h b)(e^{-b s} - 1)
  long double t1 =
      (1.0L - g.hb) * (g.e2 - exp_or_zero(g.beta * (sigma - 2.0L * p.beam_length)));
  long double t2 = (1.0L + g.hb) * std::expm1(-bs);
  return (double)((g.C1 / g.beta) * (t1 + t2) / g.denom + g.C1 * sigma);
}

double beam_profile_approx(const PhysicalParams& p, double delta, double sigma,
                           PhotonConvention conv) {
  if (sigma < 0.0 || sigma > p.beam_length)
    throw std::out_of_range("sigma outside [0, ell]");
  BeamGeometry g = beam_geometry(p, photon_number(p, delta, conv));
  return (double)(g.C1 * sigma);
}

SteadyState steady_state(const PhysicalParams& p, double delta, PhotonConvention conv) {
  DerivedConstants d = derive_constants(p);
  SteadyState s;
  s.photon_number = photon_number(p, delta, conv);
  s.alpha_s = std::sqrt(s.photon_number);
  s.theta = std::atan2(-2.0 * p.optical_decay * delta, p.optical_decay);

  BeamGeometry g = beam_geometry(p, s.photon_number);
  long double ell = p.beam_length;

  // A' = -(C'/beta)(1 - h b)/Den, B' = (C'/beta)(1 + h b) e^{2 b l}/Den,
  // D' = -(A' + B'). In ratio form (dividing by e^{2 b l}):
  s.A = (double)(-(g.C1 / g.beta) * (1.0L - g.hb) * g.e2 / g.denom);
  s.B = (double)((g.C1 / g.beta) * (1.0L + g.hb) / g.denom);
  s.C = (double)g.C1;
  s.D = -(s.A + s.B);

  // phibar = C' (1 - 2 e^{b l} / Den_full) = C' (1 - 2 e^{-b l} / denom)
  long double ebl = exp_or_zero(-g.beta * ell);
  s.phibar = (double)(g.C1 * (1.0L - 2.0L * ebl / g.denom));

  // Exact qbar from the closed form, divided through by e^{2 b l}:
  //   qbar = (C'/beta) [ (1-hb)(1+(h+l)b) e^{-2bl}
  //                      - (1+hb)(1-b(h+l)) ] / denom
  long double bhl = g.beta * (p.offset + ell);
  long double num =
      (1.0L - g.hb) * (1.0L + bhl) * g.e2 - (1.0L + g.hb) * (1.0L - bhl);
  s.qbar = (double)((g.C1 / g.beta) * num / g.denom);
  s.qbar_approx = (double)(g.C1 * (ell + p.offset));
  return s;
}

}  // namespace mirrorstate
