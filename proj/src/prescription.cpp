#include "pmc/prescription.hpp"

#include "pmc/geometry.hpp"
#include "pmc/io_util.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace pmc {

namespace {

double nu_dot(std::span<const double> z, const std::array<double, 3>& f, int n) {
  double z2 = 0.0, s = 0.0;
  for (int i = 0; i < n; ++i) {
    z2 += z[i] * z[i];
    s += z[i] * f[i];
  }
  return (s - f[n]) / std::sqrt(1.0 + z2);
}

}  // namespace

Prescription from_vector_field(const VectorField& f, const Domain& omega, double p, std::string name) {
  const int n = f.n;
  if (n != omega.dim()) throw std::invalid_argument("from_vector_field: field dimension does not match the domain");
  if (!f.value || !f.jacobian) throw std::invalid_argument("from_vector_field: value and jacobian are required");
  for (int i = 0; i <= n; ++i) {
    SlabFunction comp;
    comp.value = [f, i](const Point& x, double t) { return f.value(x, t)[i]; };
    comp.grad = [f, i](const Point& x, double t) { return f.jacobian(x, t)[i]; };
    try {
      const auto r = slab_w1p(comp, omega, p);
      if (!std::isfinite(r.norm)) throw std::runtime_error("non-finite norm");
    } catch (const std::runtime_error& e) {
      throw std::invalid_argument("from_vector_field: component " + std::to_string(i + 1) +
                                  " has no finite W^{1,p}(Omega x R) norm (" + e.what() + ")");
    }
  }
  Prescription P;
  P.name = std::move(name);
  P.n = n;
  P.f = f;
  P.H = [f, n](const Point& x, double t, std::span<const double> z) { return nu_dot(z, f.value(x, t), n); };
  P.G.value = [f, n](const Point& x, double t) {
    const auto v = f.value(x, t);
    double s = 0.0;
    for (int i = 0; i <= n; ++i) s += std::abs(v[i]);
    return s;
  };
  P.G.grad = [f, n](const Point& x, double t) {
    const auto v = f.value(x, t);
    const auto J = f.jacobian(x, t);
    std::array<double, 3> g{};
    for (int i = 0; i <= n; ++i) {
      const double sg = v[i] > 0.0 ? 1.0 : (v[i] < 0.0 ? -1.0 : 0.0);
      for (int k = 0; k < 3; ++k) g[k] += sg * J[i][k];
    }
    return g;
  };
  return P;
}

Prescription zero_prescription(int n) {
  Prescription P;
  P.name = "zero";
  P.n = n;
  P.H = [](const Point&, double, std::span<const double>) { return 0.0; };
  P.G.value = [](const Point&, double) { return 0.0; };
  P.G.grad = [](const Point&, double) { return std::array<double, 3>{}; };
  P.monotone_flag = true;
  VectorField f;
  f.n = n;
  f.value = [](const Point&, double) { return std::array<double, 3>{}; };
  f.jacobian = [](const Point&, double) { return std::array<std::array<double, 3>, 3>{}; };
  P.f = f;
  return P;
}

Prescription constant_H(double c, int n) {
  Prescription P;
  P.name = "constant";
  P.n = n;
  P.H = [c](const Point&, double, std::span<const double>) { return c; };
  P.G.value = [c](const Point&, double) { return std::abs(c); };
  P.G.grad = [](const Point&, double) { return std::array<double, 3>{}; };
  P.monotone_flag = true;
  if (c != 0.0) {
    P.within_hypotheses = false;
    P.note = "outside the existence hypotheses: a constant envelope has infinite W^{1,p}(Omega x R) norm";
  }
  return P;
}

Prescription vertical_gaussian(double s, const Domain& omega, double p) {
  VectorField f;
  f.n = omega.dim();
  const int n = f.n;
  f.value = [s, n](const Point&, double t) {
    std::array<double, 3> v{};
    v[n] = s * std::exp(-t * t);
    return v;
  };
  f.jacobian = [s, n](const Point&, double t) {
    std::array<std::array<double, 3>, 3> J{};
    J[n][2] = -2.0 * t * s * std::exp(-t * t);
    return J;
  };
  return from_vector_field(f, omega, p, "vertical_gaussian");
}

Prescription singular(double c, double gamma, const Point& x0, const Domain& omega, double p) {
  const int n = omega.dim();
  const double limit = n / p - 1.0;
  if (!(gamma > 0.0 && gamma < limit))
    throw std::invalid_argument("singular: gamma = " + format_double(gamma) + " must lie in (0, n/p - 1) = (0, " +
                                format_double(limit) + ") for the field to be unbounded yet in W^{1,p}");
  VectorField f;
  f.n = n;
  auto radius = [x0, n](const Point& x) {
    double r2 = 0.0;
    for (int k = 0; k < n; ++k) r2 += (x[k] - x0[k]) * (x[k] - x0[k]);
    return std::sqrt(r2);
  };
  f.value = [c, gamma, n, radius](const Point& x, double t) {
    std::array<double, 3> v{};
    v[n] = c * std::pow(radius(x), -gamma) * std::exp(-t * t);
    return v;
  };
  f.jacobian = [c, gamma, n, x0, radius](const Point& x, double t) {
    std::array<std::array<double, 3>, 3> J{};
    const double r = radius(x);
    const double g = c * std::pow(r, -gamma) * std::exp(-t * t);
    for (int k = 0; k < n; ++k) J[n][k] = -gamma * g * (x[k] - x0[k]) / (r * r);
    J[n][2] = -2.0 * t * g;
    return J;
  };
  Prescription P = from_vector_field(f, omega, p, "singular");
  P.note = "f is unbounded near x0 but lies in W^{1,p}(Omega x R)";
  return P;
}

Prescription tanh_decreasing(double s, int n) {
  if (!(s >= 0.0)) throw std::invalid_argument("tanh_decreasing: s must be >= 0");
  Prescription P;
  P.name = "tanh_decreasing";
  P.n = n;
  P.H = [s](const Point&, double t, std::span<const double>) { return -s * std::tanh(t); };
  P.G.value = [s](const Point&, double t) { return s * std::abs(std::tanh(t)); };
  P.G.grad = [s](const Point&, double t) {
    const double c = 1.0 / std::cosh(t);
    return std::array<double, 3>{0.0, 0.0, (t > 0.0 ? 1.0 : (t < 0.0 ? -1.0 : 0.0)) * s * c * c};
  };
  P.monotone_flag = true;
  if (s != 0.0) {
    P.within_hypotheses = false;
    P.note = "outside the existence hypotheses: the envelope s|tanh t| is not in W^{1,p}(Omega x R)";
  }
  return P;
}

EnvelopeReport envelope_check(const Prescription& P, const Domain& omega, int samples, std::uint64_t seed) {
  EnvelopeReport rep;
  rep.samples = samples;
  const int n = P.n;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> node(0, omega.node_count() - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  constexpr double kStep = 1e-7;
  for (int k = 0; k < samples; ++k) {
    const Point x = omega.position(static_cast<int>(node(rng)));
    const double t = 20.0 * unit(rng) - 10.0;
    std::array<double, 2> z{0.0, 0.0}, e{1.0, 0.0};
    if (n == 2) {
      const double ang = 2.0 * std::numbers::pi * unit(rng);
      e = {std::cos(ang), std::sin(ang)};
    } else {
      e[0] = unit(rng) < 0.5 ? -1.0 : 1.0;
    }
    if (k % 10 != 0) {
      const double mag = std::pow(10.0, 6.0 * unit(rng) - 3.0);
      z = {mag * e[0], mag * e[1]};
    }
    const std::span<const double> zs(z.data(), static_cast<std::size_t>(n));
    const double h = P.H(x, t, zs);
    const double g = std::abs(P.G.value(x, t));
    const double viol = std::abs(h) - g;
    if (viol > rep.max_violation) {
      rep.max_violation = viol;
      rep.worst_x = x;
      rep.worst_t = t;
      rep.worst_z = z;
    }
    rep.max_t_increase = std::max(rep.max_t_increase, P.H(x, t + kStep, zs) - h);
    std::array<double, 2> z2{z[0] + kStep * e[0], z[1] + kStep * e[1]};
    const double moved = P.H(x, t + kStep, std::span<const double>(z2.data(), static_cast<std::size_t>(n)));
    rep.max_small_jump = std::max(rep.max_small_jump, std::abs(moved - h));
  }
  return rep;
}

}  // namespace pmc
