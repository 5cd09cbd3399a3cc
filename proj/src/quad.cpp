#include "mirrorstate/detail/quad.hpp"

#include <stdexcept>

namespace mirrorstate::numq {

void qsolve(std::vector<std::vector<qcplx>>& A, std::vector<qcplx>& b) {
  const int n = (int)A.size();
  for (int col = 0; col < n; ++col) {
    int piv = col;
    qreal best = norm(A[col][col]);
    for (int r = col + 1; r < n; ++r) {
      qreal v = norm(A[r][col]);
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (best == 0) throw std::domain_error("singular linear system");
    std::swap(A[col], A[piv]);
    std::swap(b[col], b[piv]);
    for (int r = col + 1; r < n; ++r) {
      qcplx f = A[r][col] / A[col][col];
      A[r][col] = qcplx();
      for (int c = col + 1; c < n; ++c) A[r][c] -= f * A[col][c];
      b[r] -= f * b[col];
    }
  }
  for (int r = n - 1; r >= 0; --r) {
    qcplx acc = b[r];
    for (int c = r + 1; c < n; ++c) acc -= A[r][c] * b[c];
    b[r] = acc / A[r][r];
  }
}

}  // namespace mirrorstate::numq
