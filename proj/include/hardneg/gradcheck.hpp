#pragma once

#include <algorithm>
#include <cmath>

#include "hardneg/autodiff.hpp"

namespace hardneg {

// Denominator floor for relative error, so entries whose true gradient is
// zero are judged on absolute error instead.
inline constexpr double kGradErrorFloor = 1e-6;

inline double relative_error(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), kGradErrorFloor});
  return std::abs(analytic - numeric) / denom;
}

// Central differences of f with respect to every entry of param, compared
// against `analytic`. f reads param by reference; param is restored.
template <typename F>
double max_relative_error(ad::Matrix& param, const ad::Matrix& analytic, double step, F&& f) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < param.size(); ++i) {
    const double saved = param.data()[i];
    param.data()[i] = saved + step;
    const double up = f();
    param.data()[i] = saved - step;
    const double down = f();
    param.data()[i] = saved;
    worst = std::max(worst, relative_error(analytic.data()[i], (up - down) / (2.0 * step)));
  }
  return worst;
}

}  // namespace hardneg
