#include "mirrorstate/poly.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mirrorstate::num {

Poly Poly::from_roots(cplx leading, const std::vector<cplx>& roots) {
  std::vector<cplx> c{leading};  // lowest power first
  for (const cplx& r : roots) {
    c.push_back(cplx(0));
    for (int k = static_cast<int>(c.size()) - 1; k >= 1; --k)
      c[k] = c[k - 1] - r * c[k];
    c[0] *= -r;
  }
  return Poly(std::move(c));
}

cplx Poly::operator()(cplx w) const {
  cplx acc(0);
  for (int k = static_cast<int>(c_.size()) - 1; k >= 0; --k) acc = acc * w + c_[k];
  return acc;
}

Poly Poly::derivative() const {
  if (c_.size() <= 1) return Poly({cplx(0)});
  std::vector<cplx> d(c_.size() - 1);
  for (size_t k = 1; k < c_.size(); ++k) d[k - 1] = c_[k] * cplx(static_cast<real>(k));
  return Poly(std::move(d));
}

Poly Poly::conj_coeffs() const {
  std::vector<cplx> d(c_.size());
  for (size_t k = 0; k < c_.size(); ++k) d[k] = std::conj(c_[k]);
  return Poly(std::move(d));
}

Poly Poly::operator+(const Poly& o) const {
  std::vector<cplx> d(std::max(c_.size(), o.c_.size()), cplx(0));
  for (size_t k = 0; k < c_.size(); ++k) d[k] += c_[k];
  for (size_t k = 0; k < o.c_.size(); ++k) d[k] += o.c_[k];
  return Poly(std::move(d));
}

Poly Poly::operator-(const Poly& o) const {
  std::vector<cplx> d(std::max(c_.size(), o.c_.size()), cplx(0));
  for (size_t k = 0; k < c_.size(); ++k) d[k] += c_[k];
  for (size_t k = 0; k < o.c_.size(); ++k) d[k] -= o.c_[k];
  return Poly(std::move(d));
}

Poly Poly::operator*(const Poly& o) const {
  if (c_.empty() || o.c_.empty()) return Poly();
  std::vector<cplx> d(c_.size() + o.c_.size() - 1, cplx(0));
  for (size_t i = 0; i < c_.size(); ++i)
    for (size_t j = 0; j < o.c_.size(); ++j) d[i + j] += c_[i] * o.c_[j];
  return Poly(std::move(d));
}

Poly Poly::operator*(cplx s) const {
  std::vector<cplx> d(c_);
  for (auto& v : d) v *= s;
  return Poly(std::move(d));
}

void Poly::trim(real tol) {
  while (c_.size() > 1 && std::abs(c_.back()) <= tol) c_.pop_back();
}

cplx polish_root(const std::function<cplx(cplx)>& f,
                 const std::function<cplx(cplx)>& df, cplx z0, int max_iter) {
  cplx z = z0;
  real last = INFINITY;
  for (int it = 0; it < max_iter; ++it) {
    cplx d = df(z);
    if (d == cplx(0)) break;
    cplx step = f(z) / d;
    real mag = std::abs(step);
    z -= step;
    if (mag <= 4 * std::numeric_limits<real>::epsilon() * std::abs(z)) break;
    if (it > 6 && mag >= last) break;  // stagnating at rounding noise
    last = mag;
  }
  return z;
}

std::vector<cplx> poly_roots(const Poly& p) {
  int n = p.degree();
  if (n < 1) return {};
  while (n >= 1 && p.coeff(n) == cplx(0)) --n;
  if (n < 1) return {};

  Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(n, n);
  std::complex<double> lead(static_cast<double>(p.coeff(n).real()),
                            static_cast<double>(p.coeff(n).imag()));
  for (int k = 0; k < n; ++k) {
    std::complex<double> ck(static_cast<double>(p.coeff(k).real()),
                            static_cast<double>(p.coeff(k).imag()));
    companion(k, n - 1) = -ck / lead;
    if (k + 1 < n) companion(k + 1, k) = 1.0;
  }
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(companion, false);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("companion eigenvalue iteration failed");

  auto f = [&p](cplx z) { return p(z); };
  Poly dp = p.derivative();
  auto df = [&dp](cplx z) { return dp(z); };

  std::vector<cplx> roots;
  roots.reserve(n);
  for (int k = 0; k < n; ++k) {
    cplx z(es.eigenvalues()(k).real(), es.eigenvalues()(k).imag());
    roots.push_back(polish_root(f, df, z));
  }
  return roots;
}

}  // namespace mirrorstate::num
