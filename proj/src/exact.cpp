#include "pmc/exact.hpp"

#include <cmath>
#include <stdexcept>

namespace pmc {

double scherk_height(const Point& x) {
  const double c0 = std::cos(x[0]), c1 = std::cos(x[1]);
  if (!(c0 > 0.0 && c1 > 0.0)) throw std::domain_error("scherk_height: point outside (-pi/2, pi/2)^2");
  return std::log(c0 / c1);
}

double cap_height(const Point& x, double R, int n) {
  const double r2 = x[0] * x[0] + (n == 2 ? x[1] * x[1] : 0.0);
  if (!(r2 < R * R)) throw std::domain_error("cap_height: point outside the cap's ball");
  return -std::sqrt(R * R - r2);
}

}  // namespace pmc
