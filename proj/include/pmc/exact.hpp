#pragma once

#include "pmc/domain.hpp"

namespace pmc {

/// Scherk's minimal surface log(cos x1 / cos x2); needs |x_i| < pi/2.
double scherk_height(const Point& x);

/// Lower spherical cap -sqrt(R^2 - |x|^2) over R^n (n = 1, 2). Its mean
/// curvature in divergence form is n / R.
double cap_height(const Point& x, double R, int n);

}  // namespace pmc
