#include "mirrorstate/rational.hpp"

#include <algorithm>
#include <cmath>

namespace mirrorstate::num {

namespace {

constexpr real kPi = 3.14159265358979323846264338327950288L;

// Gauss 7 / Kronrod 15 nodes and weights on [-1, 1].
const real kKronrodX[8] = {0.0L,
                           0.207784955007898467600689403773245L,
                           0.405845151377397166906606412076961L,
                           0.586087235467691130294144838258730L,
                           0.741531185599394439863864773280788L,
                           0.864864423359769072789712788640926L,
                           0.949107912342758524526189684047851L,
                           0.991455371120812639206854697526329L};
const real kKronrodW[8] = {0.209482141084727828012999174891714L,
                           0.204432940075298892414161999234649L,
                           0.190350578064785409913256402421014L,
                           0.169004726639267902826583426598550L,
                           0.140653259715525918745189590510238L,
                           0.104790010322250183839876322541518L,
                           0.063092092629978553290700663189204L,
                           0.022935322010529224963732008058970L};
const real kGaussW[4] = {0.417959183673469387755102040816327L,
                         0.381830050505118944950369775488975L,
                         0.279705391489276667901467771423780L,
                         0.129484966168869693270611432679082L};

}  // namespace

thread_local long quadrature_evals = 0;

cplx eval_term(const RationalTerm& t, real xi_flat, cplx x) {
  ++quadrature_evals;
  cplx den(1, 0);
  for (const Pole& p : t.poles) den *= (x - p.z);
  cplx num = t.numerator(x) + cplx(xi_flat) * t.numerator_xi(x);
  return t.scale * num / den;
}

real integrate_residues(const std::vector<RationalTerm>& terms, const XiSpec& xi,
                        bool discard_rotational, bool discard_pendulum) {
  cplx total(0, 0);
  for (const RationalTerm& t : terms) {
    int deg = std::max(t.numerator.degree(), t.numerator_xi.degree());
    if (deg > static_cast<int>(t.poles.size()) - 2)
      throw std::domain_error("rational term does not decay fast enough");
    for (size_t i = 0; i < t.poles.size(); ++i) {
      const Pole& pi = t.poles[i];
      if (!(pi.z.imag() > 0)) continue;
      if (discard_rotational && pi.tag == PoleTag::rotational) continue;
      if (discard_pendulum && pi.tag == PoleTag::pendulum) continue;
      cplx dprod(1, 0);
      for (size_t k = 0; k < t.poles.size(); ++k) {
        if (k == i) continue;
        const Pole& pk = t.poles[k];
        cplx diff = pi.z - pk.z;
        bool conj_partner =
            pk.z.real() == pi.z.real() && pk.z.imag() == -pi.z.imag();
        if (!conj_partner) {
          real lim = (pk.family == pi.family ? 1e-6L : 1e-9L) *
                     std::max<real>(std::abs(pi.z), 1e-30L);
          if (std::abs(diff) < lim)
            throw NearDegeneratePoles("nearly coincident poles in residue sum");
        }
        dprod *= diff;
      }
      cplx num = t.numerator(pi.z) + cplx(xi.at(pi)) * t.numerator_xi(pi.z);
      total += t.scale * num / dprod;
    }
  }
  return (cplx(0, 1) * total).real();
}

namespace {

struct Evaluator {
  const std::vector<RationalTerm>* terms;
  real xi;
  real operator()(real x) const {
    cplx s(0, 0);
    for (const RationalTerm& t : *terms) s += eval_term(t, xi, cplx(x));
    return s.real();
  }
};

struct GK {
  real integral, error, roundoff;
};

template <typename F>
GK gk15(const F& f, real a, real b) {
  real c = 0.5L * (a + b), h = 0.5L * (b - a);
  real k15 = 0, g7 = 0, mag = 0;
  {
    real f0 = f(c);
    k15 += kKronrodW[0] * f0;
    g7 += kGaussW[0] * f0;
    mag += kKronrodW[0] * std::abs(f0);
  }
  for (int i = 1; i < 8; ++i) {
    real fp = f(c + h * kKronrodX[i]), fm = f(c - h * kKronrodX[i]);
    k15 += kKronrodW[i] * (fp + fm);
    mag += kKronrodW[i] * (std::abs(fp) + std::abs(fm));
    if (i % 2 == 0) g7 += kGaussW[i / 2] * (fp + fm);
  }
  // samples of deeply cancelling integrands carry ~1e-15 relative noise;
  // refining below that level only burns time
  return {k15 * h, std::abs(k15 - g7) * std::abs(h), 1e-15L * mag * std::abs(h)};
}

template <typename F>
void adapt(const F& f, real a, real b, real tol, int depth, real& acc, long& budget) {
  GK g = gk15(f, a, b);
  --budget;
  if (g.error <= std::max(tol, g.roundoff) || depth >= 30 || budget <= 0) {
    acc += g.integral;
    return;
  }
  real m = 0.5L * (a + b);
  adapt(f, a, m, tol * 0.5L, depth + 1, acc, budget);
  adapt(f, m, b, tol * 0.5L, depth + 1, acc, budget);
}

struct Segment {
  real a, b;      // integration bounds (in x, or in t for windows)
  bool window;    // window: x = c + s*tan(t)
  real c, s;
};

}  // namespace

real integrate_adaptive(const std::function<real(real)>& f,
                        const std::vector<Pole>& poles, real xmax, real rel_tol) {
  // Windows around near-axis pole centers; tan substitution inside.
  struct Win {
    real c, s;
  };
  std::vector<Win> wins;
  for (const Pole& p : poles) {
    real im = std::abs(p.z.imag());
    real re = p.z.real();
    if (im < 1e-3L * (1.0L + std::abs(re)) && std::abs(re) < xmax) {
      bool merged = false;
      for (Win& w : wins) {
        if (std::abs(w.c - re) < 1e-12L * (1.0L + std::abs(re))) {
          w.s = std::min(w.s, std::max<real>(im, 1e-290L));
          merged = true;
          break;
        }
      }
      if (!merged) wins.push_back({re, std::max<real>(im, 1e-290L)});
    }
  }
  std::sort(wins.begin(), wins.end(), [](const Win& a, const Win& b) { return a.c < b.c; });

  std::vector<Segment> segs;
  real cursor = -xmax;
  auto push_smooth = [&](real a, real b) {
    if (b - a < 1e-14L * (1 + std::abs(a))) return;
    // geometric subdivision so each piece is comparable to its distance
    // from the spectral features near the origin
    std::vector<real> cuts{a};
    real x = a;
    while (x < b) {
      real step = std::max<real>(0.5L, 0.5L * std::abs(x + 0.25L));
      x = std::min(b, x + step);
      cuts.push_back(x);
    }
    for (size_t i = 0; i + 1 < cuts.size(); ++i)
      segs.push_back({cuts[i], cuts[i + 1], false, 0, 0});
  };
  for (size_t i = 0; i < wins.size(); ++i) {
    // a window only needs to cover its own Lorentzian core; the power-law
    // tails outside are handled by the ordinary adaptive segments
    real half = std::min<real>(1e4L * wins[i].s, 0.02L * (1.0L + std::abs(wins[i].c)));
    if (i > 0) half = std::min(half, 0.45L * (wins[i].c - wins[i - 1].c));
    if (i + 1 < wins.size()) half = std::min(half, 0.45L * (wins[i + 1].c - wins[i].c));
    real lo = wins[i].c - half, hi = wins[i].c + half;
    push_smooth(cursor, lo);
    real ta = std::atan((lo - wins[i].c) / wins[i].s);
    real tb = std::atan((hi - wins[i].c) / wins[i].s);
    segs.push_back({ta, tb, true, wins[i].c, wins[i].s});
    cursor = hi;
  }
  push_smooth(cursor, xmax);

  auto seg_fn = [&](const Segment& sg) {
    return [&f, sg](real t) {
      if (!sg.window) return f(t);
      real ct = std::cos(t);
      return f(sg.c + sg.s * std::tan(t)) * sg.s / (ct * ct);
    };
  };

  // Coarse pass anchors the absolute tolerance to the bulk magnitude, not
  // to the (possibly deeply cancelling) net result.
  std::vector<real> coarse(segs.size());
  real bulk = 0;
  for (size_t i = 0; i < segs.size(); ++i) {
    GK g = gk15(seg_fn(segs[i]), segs[i].a, segs[i].b);
    coarse[i] = std::abs(g.integral) + g.error;
    bulk += coarse[i];
  }
  if (bulk <= 0) bulk = 1e-300L;

  real acc = 0;
  for (size_t i = 0; i < segs.size(); ++i) {
    real tol = rel_tol * std::max(coarse[i], bulk / (4.0L * segs.size()));
    long budget = 40000;
    adapt(seg_fn(segs[i]), segs[i].a, segs[i].b, tol, 0, acc, budget);
  }
  return acc / (2.0L * kPi);
}

real asymptotic_tail(const RationalTerm& t, real xi_flat, real xmax) {
  // tail of the asymptotic series sum_m b_m x^{-m} beyond +-xmax
  int nd = static_cast<int>(t.poles.size());
  Poly den = Poly::from_roots(cplx(1), [&] {
    std::vector<cplx> zs;
    for (const Pole& p : t.poles) zs.push_back(p.z);
    return zs;
  }());
  Poly num = t.numerator;
  if (t.numerator_xi.degree() >= 0) num = num + t.numerator_xi * cplx(xi_flat);
  int degN = num.degree();
  const int mmax = 11;
  std::vector<cplx> b(mmax + 1, cplx(0));
  std::vector<cplx> Nr(mmax + 1, cplx(0)), Dr(mmax + 1, cplx(0));
  for (int k = 0; k <= degN; ++k)
    if (degN - k <= mmax) Nr[degN - k] = num.coeff(k);
  for (int k = 0; k <= nd; ++k)
    if (nd - k <= mmax) Dr[nd - k] = den.coeff(k);
  std::vector<cplx> q(mmax + 1, cplx(0));
  for (int m = 0; m <= mmax; ++m) {
    cplx v = Nr[m];
    for (int j = 1; j <= m; ++j) v -= Dr[j] * q[m - j];
    q[m] = v / Dr[0];
  }
  for (int m = 0; m <= mmax; ++m) {
    int mm = nd - degN + m;
    if (mm >= 2 && mm <= mmax) b[mm] += q[m];
  }
  cplx tail(0, 0);
  for (int mm = 2; mm <= mmax; ++mm) {
    if (mm % 2 != 0) continue;
    tail += b[mm] * std::pow(xmax, (real)(1 - mm)) / (real)(mm - 1) * 2.0L;
  }
  return (t.scale * tail).real() / (2.0L * kPi);
}

real integrate_quadrature(const std::vector<RationalTerm>& terms, const XiSpec& xi,
                          real xmax, real rel_tol) {
  std::vector<Pole> poles;
  for (const RationalTerm& t : terms)
    poles.insert(poles.end(), t.poles.begin(), t.poles.end());
  Evaluator ev{&terms, xi.flat};
  real acc = integrate_adaptive([&ev](real x) { return ev(x); }, poles, xmax, rel_tol);
  for (const RationalTerm& t : terms) acc += asymptotic_tail(t, xi.flat, xmax);
  return acc;
}

}  // namespace mirrorstate::num
