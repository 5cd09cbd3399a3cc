#pragma once

#include <stdexcept>
#include <vector>

#include "mirrorstate/poly.hpp"

namespace mirrorstate::num {

// Pole tags let the covariance engine drop residues belonging to one
// mechanical mode while keeping the rest of the integrand intact.
enum class PoleTag { plain, pendulum, rotational };

struct Pole {
  cplx z;
  PoleTag tag = PoleTag::plain;
  // Roots of one polynomial factor share a family id. Near-coincidence
  // inside a family marks a genuine double root (residue formula breaks);
  // across families the differences are benign until rounding scale. A pole
  // and its bitwise conjugate are always exempt: their difference is exact.
  int family = 0;
};

// [N(x) + xi * N_xi(x)] / prod_i (x - pole_i) with a monic, factored
// denominator. Denominators are kept factored; several poles sit within
// ~1e-14 of the real axis and coefficient evaluation would lose them to
// cancellation. N_xi carries the thermal-force-linear part so the
// structural-damping weight xi can be assigned per pole.
struct RationalTerm {
  cplx scale{1, 0};
  Poly numerator;     // xi-independent part
  Poly numerator_xi;  // coefficient of xi (may be empty)
  std::vector<Pole> poles;
};

// Thermal weight assignment. flat is used by the quadrature backend and by
// residues when pole_local is off; with pole_local the residue at pole p
// uses xi0 * anchor / max(|Re p|, anchor), the structural 1/omega law
// evaluated at the pole frequency.
struct XiSpec {
  real flat = 0;
  bool pole_local = false;
  real xi0 = 0;
  real anchor = 0;  // scaled anchor frequency (Omega / W0)

  real at(const Pole& p) const {
    if (!pole_local) return flat;
    real re = std::abs(p.z.real());
    return xi0 * anchor / std::max(re, anchor);
  }
};

class NearDegeneratePoles : public std::runtime_error {
 public:
  explicit NearDegeneratePoles(const std::string& w) : std::runtime_error(w) {}
};

// (1/2pi) Integral over the real line of Re[sum of terms], closing in the
// upper half plane. Degree of each numerator must be <= #poles - 2.
// Throws NearDegeneratePoles when two poles of one term nearly coincide.
real integrate_residues(const std::vector<RationalTerm>& terms, const XiSpec& xi,
                        bool discard_rotational = false,
                        bool discard_pendulum = false);

// Same integral by pole-aware adaptive Gauss-Kronrod quadrature over
// [-xmax, xmax] plus an analytic asymptotic tail; always uses xi.flat.
real integrate_quadrature(const std::vector<RationalTerm>& terms, const XiSpec& xi,
                          real xmax, real rel_tol = 1e-10L);

// Adaptive core for a caller-supplied integrand: (1/2pi) Integral of f over
// [-xmax, xmax], with tan-mapped windows around the near-axis poles. The
// asymptotic tail is NOT included.
real integrate_adaptive(const std::function<real(real)>& f,
                        const std::vector<Pole>& poles, real xmax,
                        real rel_tol = 1e-10L);

// (1/2pi) analytic tail of one rational term beyond +-xmax.
real asymptotic_tail(const RationalTerm& t, real xi_flat, real xmax);

cplx eval_term(const RationalTerm& t, real xi_flat, cplx x);

// evaluation counter for performance diagnostics in tests
extern thread_local long quadrature_evals;

}  // namespace mirrorstate::num
