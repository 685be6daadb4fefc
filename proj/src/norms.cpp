#include "pmc/norms.hpp"

#include "pmc/io_util.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace pmc {

SobolevParams derive_q(int n, double p) {
  if (n != 1 && n != 2) throw std::invalid_argument("derive_q: dimension n must be 1 or 2, got " + std::to_string(n));
  if (!std::isfinite(p)) throw std::invalid_argument("derive_q: p must be finite");
  const double lo = 0.5 * (n + 1), hi = n + 1.0;
  if (!(p > lo))
    throw std::invalid_argument("derive_q: p = " + format_double(p) + " violates the lower bound p > (n+1)/2 = " +
                                format_double(lo));
  if (!(p < hi))
    throw std::invalid_argument("derive_q: p = " + format_double(p) + " violates the upper bound p < n+1 = " +
                                format_double(hi));
  SobolevParams s;
  s.n = n;
  s.p = p;
  s.q = n * p / (n + 1 - p);
  s.beta = 0.5 - n / (2.0 * s.q);
  return s;
}

namespace {

void check_exponent(double q, const char* who) {
  if (!(q >= 1.0) || !std::isfinite(q))
    throw std::invalid_argument(std::string(who) + ": exponent must be a finite number >= 1, got " + format_double(q));
}

// Sum of w |u|^q over nodes.
double power_sum(const GridField& u, double q) {
  const Domain& d = u.domain();
  double s = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double w = d.quadrature_weight(static_cast<int>(k));
    if (w > 0.0) s += w * std::pow(std::abs(u[static_cast<int>(k)]), q);
  }
  return s;
}

}  // namespace

double lq_norm(const GridField& u, double q) {
  check_exponent(q, "lq_norm");
  return std::pow(power_sum(u, q), 1.0 / q);
}

double linf_norm(const GridField& u) {
  double m = 0.0;
  for (double v : u.values()) m = std::max(m, std::abs(v));
  return m;
}

double w1p_norm(const GridField& u, double p) {
  check_exponent(p, "w1p_norm");
  double s = power_sum(u, p);
  for (const auto& g : gradient(u)) s += power_sum(g, p);
  return std::pow(s, 1.0 / p);
}

double w2q_norm(const GridField& u, double q) {
  check_exponent(q, "w2q_norm");
  double s = power_sum(u, q);
  for (const auto& g : gradient(u)) s += power_sum(g, q);
  const HessianField h = hessian(u);
  const int n = u.domain().dim();
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) s += power_sum(h(i, j), q);
  return std::pow(s, 1.0 / q);
}

double w1inf_norm(const GridField& u) {
  double m = linf_norm(u);
  for (const auto& g : gradient(u)) m = std::max(m, linf_norm(g));
  return m;
}

double holder_seminorm(const GridField& u, double beta, std::uint64_t seed) {
  const Domain& d = u.domain();
  const int n = d.dim();
  const auto g = gradient(u);
  std::vector<int> nodes;
  for (std::size_t k = 0; k < d.node_count(); ++k)
    if (d.has_own_stencil(static_cast<int>(k))) nodes.push_back(static_cast<int>(k));

  double best = 0.0;
  auto consider = [&](int a, int b) {
    const Point& x = d.position(a);
    const Point& y = d.position(b);
    double dist2 = 0.0, diff2 = 0.0;
    for (int c = 0; c < n; ++c) {
      dist2 += (x[c] - y[c]) * (x[c] - y[c]);
      diff2 += (g[c][a] - g[c][b]) * (g[c][a] - g[c][b]);
    }
    if (dist2 <= 0.0) return;
    best = std::max(best, std::sqrt(diff2) / std::pow(dist2, 0.5 * beta));
  };

  constexpr int kRadius = 5;
  for (int a : nodes) {
    const auto [i, j] = d.grid_index(a);
    if (i < 0) continue;
    for (int di = 0; di <= kRadius; ++di)
      for (int dj = (n == 2 ? -kRadius : 0); dj <= (n == 2 ? kRadius : 0); ++dj) {
        if (di == 0 && dj <= 0) continue;
        const int b = d.grid_node(i + di, j + dj);
        if (b >= 0 && d.has_own_stencil(b)) consider(a, b);
      }
  }

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, nodes.size() - 1);
  for (int k = 0; k < 10000; ++k) consider(nodes[pick(rng)], nodes[pick(rng)]);
  return best;
}

double holder_c1beta(const GridField& u, double beta, std::uint64_t seed) {
  if (!(beta > 0.0 && beta < 1.0))
    throw std::invalid_argument("holder_c1beta: beta must lie in (0, 1), got " + format_double(beta));
  const Domain& d = u.domain();
  const auto g = gradient(u);
  double grad_max = 0.0;
  for (std::size_t k = 0; k < d.node_count(); ++k) {
    double s = 0.0;
    for (const auto& gc : g) s += gc[static_cast<int>(k)] * gc[static_cast<int>(k)];
    grad_max = std::max(grad_max, std::sqrt(s));
  }
  return linf_norm(u) + grad_max + holder_seminorm(u, beta, seed);
}

void SlabFunction::validate() const {
  if (!value || !grad) throw std::invalid_argument("SlabFunction: value and gradient evaluators are required");
  if (!(V >= 0.0) || !std::isfinite(V)) throw std::invalid_argument("SlabFunction: V must be finite and >= 0");
  if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("SlabFunction: T must be finite and > 0");
  if (V > 0.0 && T < 2.0 * V)
    throw std::invalid_argument("SlabFunction: slab half-height T = " + format_double(T) +
                                " is below 2V = " + format_double(2.0 * V));
}

namespace {

// Integral of |G|^p + sum |dG|^p over Omega x [a, b] (midpoint rule in t).
double slab_mass(const SlabFunction& G, const Domain& omega, double p, double a, double b, double dt_max) {
  const int cells = std::max(1, static_cast<int>(std::ceil((b - a) / dt_max - 1e-9)));
  const double dt = (b - a) / cells;
  const int n = omega.dim();
  double s = 0.0;
  for (std::size_t k = 0; k < omega.node_count(); ++k) {
    const double w = omega.quadrature_weight(static_cast<int>(k));
    if (w <= 0.0) continue;
    const Point& x = omega.position(static_cast<int>(k));
    double col = 0.0;
    for (int c = 0; c < cells; ++c) {
      const double t = a + (c + 0.5) * dt;
      const auto gr = G.grad(x, t);
      double f = std::pow(std::abs(G.value(x, t)), p);
      for (int i = 0; i < n; ++i) f += std::pow(std::abs(gr[i]), p);
      f += std::pow(std::abs(gr[2]), p);
      col += f;
    }
    s += w * col * dt;
  }
  return s;
}

}  // namespace

SlabNormResult slab_w1p(const SlabFunction& G, const Domain& omega, double p, double tail_tol) {
  G.validate();
  check_exponent(p, "slab_w1p_norm");
  const double dt_max = std::min(0.05, omega.min_spacing());
  double T = G.T;
  double total = slab_mass(G, omega, p, -T, T, dt_max);
  double previous = -1.0;
  int growing = 0;
  for (int round = 0; round < 40; ++round) {
    const double layer = slab_mass(G, omega, p, -2.0 * T, -T, dt_max) + slab_mass(G, omega, p, T, 2.0 * T, dt_max);
    total += layer;
    T *= 2.0;
    if (!std::isfinite(total)) throw std::runtime_error("slab_w1p_norm: non-finite slab mass");
    if (layer <= tail_tol * total) return {std::pow(total, 1.0 / p), T, layer};
    growing = (previous > 0.0 && layer >= previous) ? growing + 1 : 0;
    if (growing >= 3)
      throw std::runtime_error("slab_w1p_norm: tail mass does not decrease under slab doubling (T = " +
                               format_double(T) + ", layer mass " + format_double(layer) + ")");
    previous = layer;
  }
  throw std::runtime_error("slab_w1p_norm: tail mass still above tolerance after 40 doublings");
}

double slab_w1p_norm(const SlabFunction& G, const Domain& omega, const SobolevParams& params) {
  return slab_w1p(G, omega, params.p).norm;
}

double trace_lq_norm(const SlabFunction& G, const GridField& v, double q) {
  G.validate();
  const double lip = w1inf_norm(v);
  if (lip > G.V * (1.0 + 1e-12))
    throw std::invalid_argument("trace_lq_norm: ||v||_{W^{1,inf}} = " + format_double(lip) +
                                " exceeds the slab bound V = " + format_double(G.V));
  const Domain& d = v.domain();
  GridField composed(v.domain_ptr(), "trace");
  for (std::size_t k = 0; k < d.node_count(); ++k)
    composed[static_cast<int>(k)] = G.value(d.position(static_cast<int>(k)), v[static_cast<int>(k)]);
  return lq_norm(composed, q);
}

double unit_ball_volume(int n) {
  if (n == 1) return 2.0;
  if (n == 2) return std::numbers::pi;
  throw std::invalid_argument("unit_ball_volume: n must be 1 or 2");
}

namespace {

struct GraphSampler {
  const Domain& d;
  const GridField& v;
  std::vector<GridField> g;
  std::vector<StencilTerm> w;

  // Interpolated value and area element at x; false outside the
  // interpolation region.
  bool eval(const Point& x, double& value, double& area) {
    if (!d.contains(x) || !d.interpolation_weights(x, w)) return false;
    value = 0.0;
    std::array<double, 2> grad{};
    for (const auto& t : w) {
      value += t.weight * v[t.node];
      for (std::size_t c = 0; c < g.size(); ++c) grad[c] += t.weight * g[c][t.node];
    }
    area = std::sqrt(1.0 + grad[0] * grad[0] + grad[1] * grad[1]);
    return true;
  }
};

// Graph measure inside the ball of radius r around (x0, t0), by polar
// quadrature in the footprint |x - x0| < r.
double ball_measure(GraphSampler& s, const Point& x0, double t0, double r) {
  const int n = s.d.dim();
  constexpr int kAngles = 48;
  constexpr int kSegments = 48;
  static const double gl_x[3] = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
  static const double gl_w[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

  const int directions = n == 1 ? 2 : kAngles;
  const double dtheta = n == 1 ? 1.0 : 2.0 * std::numbers::pi / kAngles;
  double total = 0.0;
  for (int k = 0; k < directions; ++k) {
    Point e{0.0, 0.0};
    if (n == 1) {
      e[0] = k == 0 ? -1.0 : 1.0;
    } else {
      const double th = (k + 0.5) * dtheta;
      e = {std::cos(th), std::sin(th)};
    }
    auto inside = [&](double rho, double* area) {
      const Point x{x0[0] + rho * e[0], x0[1] + rho * e[1]};
      double val = 0.0, a = 0.0;
      if (!s.eval(x, val, a)) return false;
      if (rho * rho + (val - t0) * (val - t0) >= r * r) return false;
      if (area) *area = a;
      return true;
    };
    auto crossing = [&](double lo, double hi, bool lo_inside) {
      for (int it = 0; it < 40; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (inside(mid, nullptr) == lo_inside)
          lo = mid;
        else
          hi = mid;
      }
      return 0.5 * (lo + hi);
    };
    auto integrate = [&](double a, double b) {
      double sum = 0.0;
      for (int q = 0; q < 3; ++q) {
        const double rho = 0.5 * (a + b) + 0.5 * (b - a) * gl_x[q];
        const Point x{x0[0] + rho * e[0], x0[1] + rho * e[1]};
        double val = 0.0, area = 0.0;
        if (s.eval(x, val, area)) sum += gl_w[q] * area * (n == 2 ? rho : 1.0);
      }
      return 0.5 * (b - a) * sum;
    };

    // Split [0, r] where the ray enters or leaves the ball; rho = r is always
    // outside.
    const double h = r / kSegments;
    bool prev_in = inside(0.0, nullptr);
    double seg_start = 0.0;
    for (int m = 1; m <= kSegments; ++m) {
      const double rho = m * h;
      const bool now_in = m < kSegments && inside(rho, nullptr);
      if (now_in != prev_in) {
        const double c = crossing(rho - h, rho, prev_in);
        if (prev_in) total += dtheta * integrate(seg_start, c);
        seg_start = c;
        prev_in = now_in;
      }
    }
  }
  return total;
}

}  // namespace

DensityResult graph_density(const GridField& v, int samples, std::uint64_t seed) {
  const Domain& d = v.domain();
  const int n = d.dim();
  GraphSampler s{d, v, gradient(v), {}};
  DensityResult out;
  for (std::size_t k = 0; k < d.node_count(); ++k) {
    double g2 = 0.0;
    for (const auto& gc : s.g) g2 += gc[static_cast<int>(k)] * gc[static_cast<int>(k)];
    out.lipschitz = std::max(out.lipschitz, std::sqrt(g2));
  }
  out.bound = (1.0 + out.lipschitz) * unit_ball_volume(n);

  Point lo{1e300, 1e300}, hi{-1e300, -1e300};
  for (std::size_t k = 0; k < d.node_count(); ++k)
    for (int a = 0; a < 2; ++a) {
      lo[a] = std::min(lo[a], d.position(static_cast<int>(k))[a]);
      hi[a] = std::max(hi[a], d.position(static_cast<int>(k))[a]);
    }
  const double r_min = 2.0 * std::max(d.spacing()[0], n == 2 ? d.spacing()[1] : 0.0);
  const double r_max = std::max(r_min, 0.5 * d.diameter());

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int k = 0; k < samples; ++k) {
    Point x0{0.0, 0.0};
    double t0 = 0.0, area = 0.0;
    int tries = 0;
    do {
      x0[0] = lo[0] + unit(rng) * (hi[0] - lo[0]);
      if (n == 2) x0[1] = lo[1] + unit(rng) * (hi[1] - lo[1]);
    } while (!s.eval(x0, t0, area) && ++tries < 1000);
    if (tries >= 1000) continue;
    const double r = r_min * std::pow(r_max / r_min, unit(rng));
    const double dens = ball_measure(s, x0, t0, r) / std::pow(r, n);
    if (dens > out.density) {
      out.density = dens;
      out.center = x0;
      out.radius = r;
    }
  }
  return out;
}

std::function<double(const Point&)> random_smooth_function(std::uint64_t seed, int k) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(k)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  struct Mode {
    double a, kx, ky, phase;
  };
  std::vector<Mode> modes;
  const double offset = 2.0 * unit(rng) - 1.0;
  for (int m = 0; m < 4; ++m) {
    const double freq = 0.5 + 3.5 * unit(rng);
    const double ang = 2.0 * std::numbers::pi * unit(rng);
    modes.push_back({2.0 * unit(rng) - 1.0, freq * std::cos(ang), freq * std::sin(ang),
                     2.0 * std::numbers::pi * unit(rng)});
  }
  return [offset, modes](const Point& x) {
    double s = offset;
    for (const auto& md : modes) s += md.a * std::sin(md.kx * x[0] + md.ky * x[1] + md.phase);
    return s;
  };
}

GridField random_lipschitz_field(const DomainPtr& omega, double V, std::uint64_t seed, int k) {
  GridField f = GridField::from_function(omega, random_smooth_function(seed, k), "v");
  const double norm = w1inf_norm(f);
  if (norm > 0.0) f *= 0.999 * V / norm;
  return f;
}

RatioSweep trace_ratio_sweep(const SlabFunction& G, const DomainPtr& omega, const SobolevParams& params,
                             int samples, std::uint64_t seed) {
  RatioSweep out;
  out.params = params;
  out.V = G.V;
  out.seed = seed;
  out.samples = samples;
  out.slab_norm = slab_w1p_norm(G, *omega, params);
  if (!(out.slab_norm > 0.0)) throw std::invalid_argument("trace_ratio_sweep: slab norm of G is zero");
  for (int k = 0; k < samples; ++k) {
    const GridField v = random_lipschitz_field(omega, G.V, seed, k);
    const double ratio = trace_lq_norm(G, v, params.q) / out.slab_norm;
    out.ratios.push_back(ratio);
    if (ratio > out.max_ratio) {
      out.max_ratio = ratio;
      out.argmax_witness = k;
    }
  }
  return out;
}

}  // namespace pmc
