#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace mirrorstate::num {

using real = long double;
using cplx = std::complex<real>;

// Dense univariate polynomial, c[k] is the coefficient of w^k.
class Poly {
 public:
  Poly() = default;
  explicit Poly(std::vector<cplx> coeffs) : c_(std::move(coeffs)) { trim(); }
  static Poly constant(cplx v) { return Poly({v}); }
  static Poly from_roots(cplx leading, const std::vector<cplx>& roots);

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  const std::vector<cplx>& coeffs() const { return c_; }
  cplx coeff(int k) const {
    return (k >= 0 && k < static_cast<int>(c_.size())) ? c_[k] : cplx(0);
  }

  cplx operator()(cplx w) const;  // Horner
  Poly derivative() const;
  Poly conj_coeffs() const;  // w -> conj coefficients (equals conj(P(conj w)))

  Poly operator+(const Poly& o) const;
  Poly operator-(const Poly& o) const;
  Poly operator*(const Poly& o) const;
  Poly operator*(cplx s) const;

  void trim(real tol = 0);

 private:
  std::vector<cplx> c_;
};

// All complex roots via the companion matrix (double-precision eigenvalues)
// followed by long-double Newton polishing. The polynomial should be scaled
// so its roots are O(1).
std::vector<cplx> poly_roots(const Poly& p);

// Newton-polish a root estimate of f (with derivative df); returns the
// refined root. Stops when the update stagnates at rounding level.
cplx polish_root(const std::function<cplx(cplx)>& f,
                 const std::function<cplx(cplx)>& df, cplx z0, int max_iter = 60);

}  // namespace mirrorstate::num
