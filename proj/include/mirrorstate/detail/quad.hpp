#pragma once

// Minimal quad-precision complex arithmetic for the covariance kernel. The
// conditional state of the barely damped rotational mode comes out of
// cancellations ~1e12 deep, so every constant feeding the residue sums is
// carried in __float128 end to end.

#include <quadmath.h>

#include <vector>

namespace mirrorstate::numq {

using qreal = __float128;

struct qcplx {
  qreal re = 0, im = 0;
  qcplx() = default;
  qcplx(qreal r) : re(r) {}
  qcplx(qreal r, qreal i) : re(r), im(i) {}
};

inline qcplx operator+(qcplx a, qcplx b) { return {a.re + b.re, a.im + b.im}; }
inline qcplx operator-(qcplx a, qcplx b) { return {a.re - b.re, a.im - b.im}; }
inline qcplx operator-(qcplx a) { return {-a.re, -a.im}; }
inline qcplx operator*(qcplx a, qcplx b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
inline qcplx operator/(qcplx a, qcplx b) {
  qreal d = b.re * b.re + b.im * b.im;
  return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
}
inline qcplx& operator+=(qcplx& a, qcplx b) { a = a + b; return a; }
inline qcplx& operator-=(qcplx& a, qcplx b) { a = a - b; return a; }
inline qcplx& operator*=(qcplx& a, qcplx b) { a = a * b; return a; }
inline qcplx conj(qcplx a) { return {a.re, -a.im}; }
inline qreal norm(qcplx a) { return a.re * a.re + a.im * a.im; }
inline qreal abs(qcplx a) { return sqrtq(norm(a)); }
inline qcplx sqrt(qcplx a) {
  qreal m = abs(a);
  qreal r = sqrtq((m + a.re) / 2);
  qreal i = sqrtq((m - a.re) / 2);
  return {r, a.im >= 0 ? i : -i};
}

// dense polynomial, lowest power first
using qpoly = std::vector<qcplx>;

inline qcplx peval(const qpoly& p, qcplx x) {
  qcplx acc;
  for (int k = (int)p.size() - 1; k >= 0; --k) acc = acc * x + p[k];
  return acc;
}

inline qpoly pmul(const qpoly& a, const qpoly& b) {
  if (a.empty() || b.empty()) return {};
  qpoly c(a.size() + b.size() - 1);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  return c;
}

inline qpoly padd(const qpoly& a, const qpoly& b) {
  qpoly c(std::max(a.size(), b.size()));
  for (size_t i = 0; i < a.size(); ++i) c[i] += a[i];
  for (size_t i = 0; i < b.size(); ++i) c[i] += b[i];
  return c;
}

inline qpoly pscale(const qpoly& a, qcplx s) {
  qpoly c(a);
  for (auto& v : c) v *= s;
  return c;
}

inline qpoly pconj(const qpoly& a) {
  qpoly c(a);
  for (auto& v : c) v = conj(v);
  return c;
}

inline qpoly pfrom_roots(qcplx lead, const std::vector<qcplx>& roots) {
  qpoly c{lead};
  for (const qcplx& r : roots) {
    c.push_back(qcplx());
    for (int k = (int)c.size() - 1; k >= 1; --k) c[k] = c[k - 1] - r * c[k];
    c[0] = -r * c[0];
  }
  return c;
}

inline int pdeg(const qpoly& p) {
  int d = (int)p.size() - 1;
  while (d > 0 && p[d].re == 0 && p[d].im == 0) --d;
  return (d == 0 && p.empty()) ? -1 : d;
}

// partial-pivot Gaussian elimination, in place
void qsolve(std::vector<std::vector<qcplx>>& A, std::vector<qcplx>& b);

}  // namespace mirrorstate::numq
