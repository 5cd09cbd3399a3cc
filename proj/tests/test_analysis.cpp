#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mirrorstate/analysis.hpp"
#include "mirrorstate/pipeline.hpp"
#include "test_util.hpp"

using namespace mirrorstate;

namespace {
CovMat2 normalized(double v11, double v12, double v22) {
  CovMat2 v;
  v.v11 = v11;
  v.v12 = v12;
  v.v22 = v22;
  v.normalized = true;
  return v;
}
}  // namespace

TEST_CASE("purity: reference values and rotation invariance") {
  CHECK(purity(normalized(1, 0, 1)) == doctest::Approx(1.0));
  CHECK(purity(normalized(2, 0, 2)) == doctest::Approx(0.5));
  CHECK_THROWS_AS(purity(normalized(1, 2, 1)), std::domain_error);
  CovMat2 raw;
  raw.v11 = 1;
  raw.v22 = 1;
  CHECK_THROWS_AS(purity(raw), std::invalid_argument);

  std::mt19937 rng(53);
  std::uniform_real_distribution<double> u(0, 2 * std::numbers::pi);
  CovMat2 v = normalized(1.7, 0.4, 2.9);
  double p0 = purity(v);
  for (int i = 0; i < 10; ++i) {
    double th = u(rng), c = std::cos(th), s = std::sin(th);
    CovMat2 r = normalized(c * c * v.v11 + 2 * c * s * v.v12 + s * s * v.v22,
                           (c * c - s * s) * v.v12 + c * s * (v.v22 - v.v11),
                           s * s * v.v11 - 2 * c * s * v.v12 + c * c * v.v22);
    CHECK(purity(r) == doctest::Approx(p0).epsilon(1e-12));
  }
}

TEST_CASE("Wigner contour: vacuum circle, squeezed axes, level set, area") {
  WignerEllipse circ = wigner_ellipse(normalized(1, 0, 1), 64);
  for (size_t i = 0; i < circ.x.size(); ++i)
    CHECK(std::hypot(circ.x[i], circ.y[i]) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

  WignerEllipse sq = wigner_ellipse(normalized(0.5, 0, 2.0), 64);
  CHECK(sq.semi_minor == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sq.semi_major == doctest::Approx(2.0).epsilon(1e-12));

  CovMat2 v = normalized(1.3, -0.5, 2.2);
  WignerEllipse e = wigner_ellipse(v, 128);
  double det = v.v11 * v.v22 - v.v12 * v.v12;
  double inv11 = v.v22 / det, inv12 = -v.v12 / det, inv22 = v.v11 / det;
  for (size_t i = 0; i < e.x.size(); ++i) {
    double q = inv11 * e.x[i] * e.x[i] + 2 * inv12 * e.x[i] * e.y[i] +
               inv22 * e.y[i] * e.y[i];
    CHECK(q == doctest::Approx(2.0).epsilon(1e-10));
  }
  CHECK(std::numbers::pi * e.semi_major * e.semi_minor ==
        doctest::Approx(2.0 * std::numbers::pi * std::sqrt(det)).epsilon(1e-8));
}

TEST_CASE("negativity: product state, consistency, continuity") {
  const PhysicalParams& p = table1();

  // identical common and differential runs give a product state
  EntanglementResult same = negativity(p, 0.2, 1.0);
  CHECK(same.log_negativity == 0.0);
  CHECK(same.nu_tilde >= 1.0 - 1e-12);

  CHECK_THROWS_AS(negativity(p, 0.2, -1.0), std::invalid_argument);

  double prev_nu = -1;
  for (double d : {0.08, 0.1, 0.12, 0.14}) {
    EntanglementResult r = negativity(p, d, 3.0);
    // E_N and nu_tilde are mutually consistent
    if (r.nu_tilde >= 1.0) CHECK(r.log_negativity == 0.0);
    if (r.nu_tilde < 1.0)
      CHECK(r.log_negativity == doctest::Approx(-std::log(r.nu_tilde)).epsilon(1e-12));
    // continuity: nu moves smoothly through the boundary region
    if (prev_nu > 0) CHECK(std::abs(r.nu_tilde - prev_nu) < 0.5);
    prev_nu = r.nu_tilde;
  }
}
