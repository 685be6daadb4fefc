#pragma once

#include "pmc/grid_field.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace pmc {

/// Exponents tied together by the trace embedding: q = n p / (n + 1 - p) and
/// the Holder exponent beta = 1/2 - n / (2 q).
struct SobolevParams {
  int n = 2;
  double p = 2.0;
  double q = 4.0;
  double beta = 0.25;
};

/// Throws std::invalid_argument naming the violated bound unless
/// (n + 1) / 2 < p < n + 1 and n is 1 or 2.
SobolevParams derive_q(int n, double p);

// Quadrature-weighted norms. W-norms use the sum-of-powers convention over
// multi-indices, each mixed derivative counted once. Exponents below 1 are
// rejected with std::invalid_argument.
double lq_norm(const GridField& u, double q);
double linf_norm(const GridField& u);
double w1p_norm(const GridField& u, double p);
double w2q_norm(const GridField& u, double q);
/// max(sup |u|, sup |d_i u|) over nodes.
double w1inf_norm(const GridField& u);

/// Sampled Holder seminorm of the gradient:
///   max over node pairs of |grad u(x) - grad u(y)| / |x - y|^beta.
/// Pairs: every pair within 5 grid steps plus 10^4 seeded random pairs. The
/// result is a lower bound of the continuous seminorm.
double holder_seminorm(const GridField& u, double beta, std::uint64_t seed = 0);

/// sup |u| + sup |grad u| + holder_seminorm(u, beta). Requires 0 < beta < 1.
double holder_c1beta(const GridField& u, double beta, std::uint64_t seed = 0);

/// A function G(x, t) on Omega x R with its gradient (d_x1, d_x2, d_t); the
/// second spatial entry is ignored in one dimension.
struct SlabFunction {
  std::function<double(const Point&, double)> value;
  std::function<std::array<double, 3>(const Point&, double)> grad;
  double T = 1.0;  // initial slab half-height
  double V = 0.0;  // Lipschitz bound of admissible graphs

  /// Throws std::invalid_argument unless T >= 2V > 0, or V = 0 and T > 0.
  void validate() const;
};

struct SlabNormResult {
  double norm = 0.0;
  double half_height = 0.0;  // final T after adaptive doubling
  double tail_mass = 0.0;    // mass of |G|^p + |grad G|^p in the last added layer
};

/// ||G||_{W^{1,p}(Omega x R)} by tensor-product quadrature: the domain's nodal
/// weights in x and the midpoint rule in t. The slab [-T, T] is doubled until
/// the mass added by the last doubling is below `tail_tol`; throws
/// std::runtime_error if the added mass stops decreasing.
SlabNormResult slab_w1p(const SlabFunction& G, const Domain& omega, double p, double tail_tol = 1e-10);
double slab_w1p_norm(const SlabFunction& G, const Domain& omega, const SobolevParams& params);

/// ||G(., v(.))||_{L^q(Omega)}. Throws std::invalid_argument if the discrete
/// W^{1,inf} norm of v exceeds G.V.
double trace_lq_norm(const SlabFunction& G, const GridField& v, double q);

/// Upper density r^{-n} area(graph of v inside B_r(c)) maximised over sampled
/// balls centred on the graph. Areas come from a polar quadrature around the
/// centre with the interpolated field and gradient.
struct DensityResult {
  double density = 0.0;
  Point center{0.0, 0.0};
  double radius = 0.0;
  double lipschitz = 0.0;  // max |grad v| over nodes
  double bound = 0.0;      // (1 + lipschitz) * omega_n
};
DensityResult graph_density(const GridField& v, int samples, std::uint64_t seed = 0);

/// Volume of the unit ball in R^n (n = 1 or 2).
double unit_ball_volume(int n);

/// Trace-to-slab ratio sweep over random Lipschitz fields with
/// ||v||_{W^{1,inf}} <= V.
struct RatioSweep {
  SobolevParams params;
  double V = 0.0;
  std::uint64_t seed = 0;
  int samples = 0;
  double slab_norm = 0.0;
  double max_ratio = 0.0;
  int argmax_witness = -1;
  std::vector<double> ratios;
};
RatioSweep trace_ratio_sweep(const SlabFunction& G, const DomainPtr& omega, const SobolevParams& params,
                             int samples, std::uint64_t seed);

/// The k-th member of a seeded family of smooth test functions: a constant
/// plus four plane waves with frequencies in [0.5, 4].
std::function<double(const Point&)> random_smooth_function(std::uint64_t seed, int k);

/// The k-th random Lipschitz field of a sweep with the given seed, scaled so
/// that its discrete W^{1,inf} norm equals `V` up to a factor 0.999.
GridField random_lipschitz_field(const DomainPtr& omega, double V, std::uint64_t seed, int k);

}  // namespace pmc
