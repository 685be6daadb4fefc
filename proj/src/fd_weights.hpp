#pragma once

#include <span>
#include <vector>

namespace pmc::detail {

/// Fornberg's recursion: weights w such that sum_k w_k f(x_k) approximates
/// the m-th derivative of f at z, exact for polynomials of degree < x.size().
std::vector<double> fd_weights(double z, std::span<const double> x, int m);

/// First-derivative weights at 0 for four points whose leading truncation term
/// equals that of the centred difference with spacing h (h^2 f'''/6). Used at
/// nodes with one short arm so that the gradient error field stays smooth
/// across the transition from regular to boundary-adjacent nodes.
std::vector<double> matched_first_derivative(std::span<const double> x, double h);

}  // namespace pmc::detail
