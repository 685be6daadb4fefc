#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "pmc/prescription.hpp"

#include <cmath>
#include <random>

using namespace pmc;

namespace {

double H_at(const Prescription& P, const Point& x, double t, std::array<double, 2> z) {
  return P.H(x, t, std::span<const double>(z.data(), static_cast<std::size_t>(P.n)));
}

VectorField random_field(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> c(-2.0, 2.0);
  std::array<double, 3> a{c(rng), c(rng), c(rng)}, k{c(rng), c(rng), c(rng)};
  VectorField f;
  f.n = 2;
  f.value = [a, k](const Point& x, double t) {
    std::array<double, 3> v{};
    for (int i = 0; i < 3; ++i) v[i] = a[i] * std::sin(k[i] * x[0] + x[1]) * std::exp(-t * t);
    return v;
  };
  f.jacobian = [a, k](const Point& x, double t) {
    std::array<std::array<double, 3>, 3> J{};
    for (int i = 0; i < 3; ++i) {
      const double e = std::exp(-t * t);
      J[i][0] = a[i] * k[i] * std::cos(k[i] * x[0] + x[1]) * e;
      J[i][1] = a[i] * std::cos(k[i] * x[0] + x[1]) * e;
      J[i][2] = -2.0 * t * a[i] * std::sin(k[i] * x[0] + x[1]) * e;
    }
    return J;
  };
  return f;
}

}  // namespace

TEST_CASE("zero field gives H = 0 and G = 0") {
  auto d = build_domain(DomainSpec::square(0.0, 1.0, 17));
  const auto P = from_vector_field(zero_prescription(2).f.value(), *d, 2.0);
  CHECK(H_at(P, {0.3, 0.4}, 0.7, {1.0, -2.0}) == 0.0);
  CHECK(P.G.value({0.3, 0.4}, 0.7) == 0.0);
}

TEST_CASE("constant vertical field") {
  auto d = build_domain(DomainSpec::square(0.0, 1.0, 17));
  const double c = 0.8;
  const auto P = vertical_gaussian(c, *d, 2.0);
  CHECK(H_at(P, {0.5, 0.5}, 0.0, {0.0, 0.0}) == doctest::Approx(-c));
  CHECK(H_at(P, {0.5, 0.5}, 0.0, {3.0, 4.0}) == doctest::Approx(-c / std::sqrt(26.0)));
  CHECK(P.G.value({0.5, 0.5}, 0.0) == doctest::Approx(c));
  const auto params = derive_q(2, 2.0);
  const double base = slab_w1p_norm(P.G, *d, params);
  CHECK(slab_w1p_norm(vertical_gaussian(3.0 * c, *d, 2.0).G, *d, params) ==
        doctest::Approx(3.0 * base).epsilon(1e-12));
  CHECK(P.within_hypotheses);
  CHECK_FALSE(P.monotone_flag);
}

TEST_CASE("a component without finite slab norm is rejected") {
  auto d = build_domain(DomainSpec::square(0.0, 1.0, 17));
  VectorField f;
  f.n = 2;
  f.value = [](const Point&, double) { return std::array<double, 3>{0.0, 0.0, 1.0}; };
  f.jacobian = [](const Point&, double) { return std::array<std::array<double, 3>, 3>{}; };
  CHECK_THROWS_WITH_AS(from_vector_field(f, *d, 2.0), doctest::Contains("component 3"), std::invalid_argument);
}

TEST_CASE("constant H is flagged outside the hypotheses") {
  const auto P = constant_H(1.0, 2);
  CHECK(H_at(P, {0.1, 0.2}, 5.0, {100.0, 0.0}) == 1.0);
  CHECK_FALSE(P.within_hypotheses);
  CHECK(P.note.find("outside") != std::string::npos);
  CHECK(constant_H(0.0, 2).within_hypotheses);
}

TEST_CASE("envelope check: catalog members have no violations, planted faults are caught") {
  auto d = build_domain(DomainSpec::square(0.0, 1.0, 17));
  for (const auto& P : {vertical_gaussian(2.0, *d, 2.0), constant_H(-1.5, 2), tanh_decreasing(0.7, 2),
                        from_vector_field(random_field(4), *d, 2.0)}) {
    const auto rep = envelope_check(P, *d, 5000, 1);
    CAPTURE(P.name);
    CHECK(rep.max_violation <= 1e-12);
    CHECK(rep.max_small_jump < 1e-5);
  }
  Prescription bad = vertical_gaussian(1.0, *d, 2.0);
  const auto G = bad.G;
  bad.H = [G](const Point& x, double t, std::span<const double>) { return 2.0 * G.value(x, t); };
  const auto rep = envelope_check(bad, *d, 2000, 1);
  CHECK(rep.max_violation > 0.0);
  CHECK(rep.max_violation == doctest::Approx(G.value(rep.worst_x, rep.worst_t)).epsilon(1e-12));
}

TEST_CASE("property: |nu . f| <= |f| <= sum |f_i| and linearity in f") {
  auto d = build_domain(DomainSpec::square(0.0, 1.0, 17));
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    const VectorField f = random_field(100 + trial), g = random_field(200 + trial);
    const auto Pf = from_vector_field(f, *d, 2.0), Pg = from_vector_field(g, *d, 2.0);
    const double a = u(rng), b = u(rng);
    VectorField sum;
    sum.n = 2;
    sum.value = [&](const Point& x, double t) {
      const auto fv = f.value(x, t), gv = g.value(x, t);
      return std::array<double, 3>{a * fv[0] + b * gv[0], a * fv[1] + b * gv[1], a * fv[2] + b * gv[2]};
    };
    sum.jacobian = [&](const Point& x, double t) {
      const auto fj = f.jacobian(x, t), gj = g.jacobian(x, t);
      std::array<std::array<double, 3>, 3> J{};
      for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) J[i][k] = a * fj[i][k] + b * gj[i][k];
      return J;
    };
    const auto Ps = from_vector_field(sum, *d, 2.0);
    for (int k = 0; k < 200; ++k) {
      const Point x{0.5 + 0.5 * u(rng), 0.5 + 0.5 * u(rng)};
      const double t = 3.0 * u(rng);
      const double mag = std::pow(10.0, 3.0 * u(rng));
      const std::array<double, 2> z{mag * u(rng), mag * u(rng)};
      const auto fv = f.value(x, t);
      const double fnorm = std::sqrt(fv[0] * fv[0] + fv[1] * fv[1] + fv[2] * fv[2]);
      CHECK(std::abs(H_at(Pf, x, t, z)) <= fnorm * (1.0 + 1e-14));
      CHECK(fnorm <= Pf.G.value(x, t) * (1.0 + 1e-14));
      const double lin = a * H_at(Pf, x, t, z) + b * H_at(Pg, x, t, z);
      CHECK(H_at(Ps, x, t, z) == doctest::Approx(lin).epsilon(1e-12).scale(1.0));
    }
  }
}

TEST_CASE("large slopes keep |H| below the horizontal part of f") {
  auto d = build_domain(DomainSpec::square(0.0, 1.0, 17));
  const auto P = from_vector_field(random_field(9), *d, 2.0);
  const Point x{0.3, 0.6};
  const double t = 0.4;
  const auto fv = P.f->value(x, t);
  const std::array<double, 2> dir{0.6, 0.8};
  const double limit = fv[0] * dir[0] + fv[1] * dir[1];
  const double h = H_at(P, x, t, {1e8 * dir[0], 1e8 * dir[1]});
  CHECK(h == doctest::Approx(limit).epsilon(1e-6));
  CHECK(std::abs(h) <= P.G.value(x, t));
}

TEST_CASE("monotone members are nonincreasing in t") {
  auto d = build_domain(DomainSpec::square(0.0, 1.0, 17));
  for (const auto& P : {tanh_decreasing(2.0, 2), constant_H(0.5, 2), zero_prescription(2)}) {
    CHECK(P.monotone_flag);
    CHECK(envelope_check(P, *d, 3000, 2).max_t_increase <= 1e-12);
  }
  CHECK(envelope_check(vertical_gaussian(-1.0, *d, 2.0), *d, 3000, 2).max_t_increase > 1e-12);
  CHECK_FALSE(tanh_decreasing(1.0, 2).within_hypotheses);
}

TEST_CASE("singular field: unbounded near x0, finite slab norm, exponent range enforced") {
  auto d = build_domain(DomainSpec::square(0.0, 1.0, 33));
  const Point x0{0.5 + 1.0 / 3.0 / 64.0, 0.5 + 1.0 / 7.0 / 64.0};
  const auto P = singular(1.0, 0.2, x0, *d, 1.6);
  const auto params = derive_q(2, 1.6);
  const double norm = slab_w1p_norm(P.G, *d, params);
  CHECK(std::isfinite(norm));
  CHECK(P.G.value({x0[0] + 1e-8, x0[1]}, 0.0) > 30.0);
  CHECK(envelope_check(P, *d, 3000, 3).max_violation <= 1e-12);
  CHECK_THROWS_AS(singular(1.0, 0.2, x0, *d, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(singular(1.0, 0.0, x0, *d, 1.6), std::invalid_argument);
}
