#include "fd_weights.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <stdexcept>

namespace pmc::detail {

std::vector<double> fd_weights(double z, std::span<const double> x, int m) {
  const int n = static_cast<int>(x.size()) - 1;
  if (n < m) throw std::invalid_argument("fd_weights: not enough points for derivative order");
  std::vector<std::vector<double>> c(n + 1, std::vector<double>(m + 1, 0.0));
  double c1 = 1.0;
  double c4 = x[0] - z;
  c[0][0] = 1.0;
  for (int i = 1; i <= n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - z;
    for (int j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n + 1);
  for (int i = 0; i <= n; ++i) w[i] = c[i][m];
  return w;
}

std::vector<double> matched_first_derivative(std::span<const double> x, double h) {
  if (x.size() != 4) throw std::invalid_argument("matched_first_derivative: needs four points");
  Eigen::Matrix4d vandermonde;
  for (int i = 0; i < 4; ++i) {
    double p = 1.0;
    for (int k = 0; k < 4; ++k) {
      vandermonde(k, i) = p;
      p *= x[i];
    }
  }
  const Eigen::Vector4d moments(0.0, 1.0, 0.0, h * h);
  const Eigen::Vector4d w = vandermonde.fullPivLu().solve(moments);
  return {w[0], w[1], w[2], w[3]};
}

}  // namespace pmc::detail
