#pragma once

#include <doctest.h>

#include <cmath>
#include <random>

#include "mirrorstate/params.hpp"

inline const mirrorstate::PhysicalParams& table1() {
  static mirrorstate::PhysicalParams p =
      mirrorstate::load_params_file(TABLE1_CFG).params;
  return p;
}

inline double rel_err(double a, double b) {
  double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0 ? 0 : std::abs(a - b) / scale;
}
