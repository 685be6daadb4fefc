#pragma once

#include "pmc/norms.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>

namespace pmc {

/// Vector field f(x, t) with n + 1 components packed as (f_1, ..., f_n,
/// f_{n+1}) in the first n + 1 entries; `jacobian[i]` holds
/// (d_x1 f_i, d_x2 f_i, d_t f_i).
struct VectorField {
  int n = 2;
  std::function<std::array<double, 3>(const Point&, double)> value;
  std::function<std::array<std::array<double, 3>, 3>(const Point&, double)> jacobian;
};

using CurvatureFn = std::function<double(const Point&, double, std::span<const double>)>;

/// Right-hand side H(x, t, z) with its envelope G(x, t) >= |H(x, t, z)|.
struct Prescription {
  std::string name;
  int n = 2;
  CurvatureFn H;
  SlabFunction G;
  std::optional<VectorField> f;
  /// H is nonincreasing in t.
  bool monotone_flag = false;
  /// False when the envelope has no finite W^{1,p}(Omega x R) norm.
  bool within_hypotheses = true;
  std::string note;
};

/// H = nu(z) . f with G = sum |f_i|. Throws std::invalid_argument if a
/// component of f has no finite slab norm over omega (exponent p).
Prescription from_vector_field(const VectorField& f, const Domain& omega, double p, std::string name = "vector_field");

Prescription zero_prescription(int n);

/// H = c everywhere; outside the hypotheses because a constant envelope has
/// infinite slab norm.
Prescription constant_H(double c, int n);

/// f = (0, ..., 0, s exp(-t^2)); H = -s exp(-t^2) / sqrt(1 + |z|^2).
Prescription vertical_gaussian(double s, const Domain& omega, double p);

/// f = (0, ..., 0, c |x - x0|^(-gamma) exp(-t^2)): unbounded but in
/// W^{1,p}(Omega x R) when 0 < gamma < n/p - 1. Throws std::invalid_argument
/// outside that range.
Prescription singular(double c, double gamma, const Point& x0, const Domain& omega, double p);

/// H = -s tanh(t): nonincreasing in t. No nonzero H that is monotone in t has
/// a W^{1,p}(Omega x R) envelope, so this member is outside the hypotheses.
Prescription tanh_decreasing(double s, int n);

struct EnvelopeReport {
  int samples = 0;
  double max_violation = 0.0;  // max(|H| - |G|, 0)
  Point worst_x{0.0, 0.0};
  double worst_t = 0.0;
  std::array<double, 2> worst_z{0.0, 0.0};
  /// Largest sampled increase H(x, t + dt, z) - H(x, t, z); <= 0 for
  /// nonincreasing H up to rounding.
  double max_t_increase = 0.0;
  /// Largest |H(x, t + dt, z + dz) - H(x, t, z)| for dt, |dz| = 1e-7.
  double max_small_jump = 0.0;
};

/// Samples (x, t, z) with x over the domain's nodes, |t| <= 10 and
/// log-uniform |z| up to 10^3 plus z = 0.
EnvelopeReport envelope_check(const Prescription& P, const Domain& omega, int samples, std::uint64_t seed = 0);

}  // namespace pmc
