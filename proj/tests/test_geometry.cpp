#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "pmc/geometry.hpp"

#include <cmath>
#include <limits>
#include <random>

using namespace pmc;

namespace {

double scherk(const Point& x) { return std::log(std::cos(x[0]) / std::cos(x[1])); }
double cap(const Point& x) { return -std::sqrt(4.0 - x[0] * x[0] - x[1] * x[1]); }

double max_interior(const GridField& f, double target = 0.0) {
  double e = 0.0;
  for (int id : f.domain().interior()) e = std::max(e, std::abs(f[id] - target));
  return e;
}

}  // namespace

TEST_CASE("coefficient matrix at slope (1, 0)") {
  const std::array<double, 2> z{1.0, 0.0};
  const CoeffMatrix c = coeff_matrix(z);
  CHECK(c(0, 0) == doctest::Approx(0.35355339059327373).epsilon(1e-15));
  CHECK(c(1, 1) == doctest::Approx(0.7071067811865475).epsilon(1e-15));
  CHECK(c(0, 1) == 0.0);
  CHECK(c(1, 0) == 0.0);
  CHECK(c.lambda == doctest::Approx(std::pow(2.0, -1.5)).epsilon(1e-15));
}

TEST_CASE("coefficient matrix at zero slope is the identity") {
  const std::array<double, 2> z{0.0, 0.0};
  const CoeffMatrix c = coeff_matrix(z);
  CHECK(c(0, 0) == 1.0);
  CHECK(c(1, 1) == 1.0);
  CHECK(c(0, 1) == 0.0);
  CHECK(c.lambda == 1.0);
  const std::array<double, 1> z1{0.0};
  CHECK(coeff_matrix(z1)(0, 0) == 1.0);
}

TEST_CASE("non-finite slopes are rejected") {
  const std::array<double, 2> z{std::numeric_limits<double>::quiet_NaN(), 0.0};
  CHECK_THROWS_AS(coeff_matrix(z), std::invalid_argument);
  const std::array<double, 2> zi{std::numeric_limits<double>::infinity(), 0.0};
  CHECK_THROWS_AS(coeff_matrix(zi), std::invalid_argument);
}

TEST_CASE("unit normal examples") {
  const std::array<double, 2> z0{0.0, 0.0};
  const auto n0 = unit_normal(z0);
  CHECK(n0.size() == 3);
  CHECK(n0[0] == 0.0);
  CHECK(n0[1] == 0.0);
  CHECK(n0[2] == -1.0);
  const std::array<double, 2> z{3.0, 4.0};
  const auto n = unit_normal(z);
  CHECK(n[0] == doctest::Approx(3.0 / std::sqrt(26.0)));
  CHECK(n[1] == doctest::Approx(4.0 / std::sqrt(26.0)));
  CHECK(n[2] == doctest::Approx(-1.0 / std::sqrt(26.0)));
}

TEST_CASE("property: ellipticity, symmetry and unit normal over random slopes") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> mag(-1.0, 1.0);
  std::uniform_real_distribution<double> expo(-3.0, 3.0);
  for (int trial = 0; trial < 2000; ++trial) {
    const double s = std::pow(10.0, expo(rng));
    const std::array<double, 2> z{s * mag(rng), s * mag(rng)};
    const CoeffMatrix c = coeff_matrix(z);
    CHECK(c(0, 1) == c(1, 0));
    const double z2 = z[0] * z[0] + z[1] * z[1];
    CHECK(c.lambda == doctest::Approx(std::pow(1.0 + z2, -1.5)).epsilon(1e-13));
    CHECK(c.Lambda <= 1.0 + 1e-15);
    const std::array<double, 2> xi{mag(rng), mag(rng)};
    const double xi2 = xi[0] * xi[0] + xi[1] * xi[1];
    CHECK(c.quadratic_form(xi) >= c.lambda * xi2 * (1.0 - 1e-12));
    CHECK(c.quadratic_form(xi) <= xi2 / std::sqrt(1.0 + z2) * (1.0 + 1e-12));
    // The slope direction is the soft one.
    CHECK(c.quadratic_form(z) == doctest::Approx(c.lambda * z2).epsilon(1e-10));
    const auto nu = unit_normal(z);
    CHECK(nu[0] * nu[0] + nu[1] * nu[1] + nu[2] * nu[2] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(nu[2] < 0.0);
  }
}

TEST_CASE("planes have zero discrete mean curvature") {
  auto d = build_domain(DomainSpec::square(0.0, 1.0, 17));
  auto u = GridField::from_function(d, [](const Point& x) { return 0.3 + x[0] - 2.0 * x[1]; });
  CHECK(max_interior(mean_curvature_div(u)) < 1e-12);
  CHECK(max_interior(mean_curvature_nondiv(u)) < 1e-12);
  const auto e = ellipticity_bounds(GridField::from_function(d, [](const Point& x) { return x[0]; }));
  CHECK(e.lambda_min == doctest::Approx(std::pow(2.0, -1.5)).epsilon(1e-12));
  CHECK(e.Lambda_max == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
}

TEST_CASE("Scherk surface: both discrete forms vanish at second order") {
  auto errors = [](int n) {
    auto d = build_domain(DomainSpec::square(-1.0, 1.0, n));
    auto h = GridField::from_function(d, scherk);
    return std::array<double, 2>{max_interior(mean_curvature_div(h)), max_interior(mean_curvature_nondiv(h))};
  };
  const auto e1 = errors(17), e2 = errors(33), e3 = errors(65);
  for (int form = 0; form < 2; ++form) {
    CAPTURE(form);
    CHECK(e1[form] / e2[form] >= 3.3);
    CHECK(e2[form] / e3[form] >= 3.3);
    CHECK(e2[form] / e3[form] <= 4.7);
    CHECK(e3[form] < 1e-3);
  }
}

TEST_CASE("Scherk on [-1.2, 1.2]^2: flux-form residual ratios over 33, 65, 129 nodes") {
  double prev = 0.0;
  for (int n : {33, 65, 129}) {
    auto d = build_domain(DomainSpec::square(-1.2, 1.2, n));
    const double e = max_interior(mean_curvature_div(GridField::from_function(d, scherk)));
    if (prev > 0.0) {
      CHECK(prev / e >= 3.3);
      CHECK(prev / e <= 4.7);
    }
    prev = e;
  }
}

TEST_CASE("spherical cap of radius 2 over the unit disc has mean curvature 1") {
  // Flux form: second order everywhere. Pointwise Hessian form: second order
  // away from the circle, first order at nodes with a shortened arm.
  struct Err {
    double div, nondiv_inner, nondiv_all;
  };
  auto errors = [](int n) {
    auto d = build_domain(DomainSpec::disc({0.0, 0.0}, 1.0, n));
    auto u = GridField::from_function(d, cap);
    const GridField a = mean_curvature_div(u), b = mean_curvature_nondiv(u);
    Err e{0, 0, 0};
    for (int id : d->interior()) {
      const Point x = d->position(id);
      e.div = std::max(e.div, std::abs(a[id] - 1.0));
      e.nondiv_all = std::max(e.nondiv_all, std::abs(b[id] - 1.0));
      if (std::hypot(x[0], x[1]) < 0.8) e.nondiv_inner = std::max(e.nondiv_inner, std::abs(b[id] - 1.0));
    }
    return e;
  };
  const Err e1 = errors(17), e2 = errors(33), e3 = errors(65);
  CHECK(e1.div / e2.div >= 3.5);
  CHECK(e2.div / e3.div >= 3.5);
  CHECK(e3.div < 5e-4);
  CHECK(e1.nondiv_inner / e2.nondiv_inner >= 3.5);
  CHECK(e2.nondiv_inner / e3.nondiv_inner >= 3.5);
  CHECK(e1.nondiv_all / e2.nondiv_all >= 1.4);
  CHECK(e3.nondiv_all < 1e-2);
}

TEST_CASE("one-dimensional arc of radius 2 has curvature 1/2") {
  auto d = build_domain(DomainSpec::interval(-1.0, 1.0, 129));
  auto u = GridField::from_function(d, [](const Point& x) { return -std::sqrt(4.0 - x[0] * x[0]); });
  CHECK(max_interior(mean_curvature_div(u), 0.5) < 1e-4);
  CHECK(max_interior(mean_curvature_nondiv(u), 0.5) < 1e-4);
}

TEST_CASE("perturbation identity around a minimal graph holds to rounding") {
  // nondiv(v + h) = A(grad(v + h)) : D^2 v + B . grad v + kappa (1 + |grad h|^2)^(3/2) nondiv(h)
  auto d = build_domain(DomainSpec::square(-1.0, 1.0, 33));
  auto h = GridField::from_function(d, scherk);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    const double a = coef(rng), b = coef(rng), c = coef(rng);
    auto v = GridField::from_function(d, [&](const Point& x) {
      return a * std::sin(2.0 * x[0] + x[1]) + b * x[0] * x[1] + c * std::exp(x[1]);
    });
    const GridField lhs = mean_curvature_nondiv(v + h);
    const GridField bt = b_term(v, h, v);
    const GridField hh = mean_curvature_nondiv(h);
    const auto gv = gradient(v), gh = gradient(h);
    const auto hv = hessian(v);
    double worst = 0.0;
    for (int id : d->interior()) {
      const std::array<double, 2> p{gv[0][id] + gh[0][id], gv[1][id] + gh[1][id]};
      const CoeffMatrix A = coeff_matrix(p);
      double av = 0.0;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) av += A(i, j) * hv(i, j)[id];
      const double q2 = gh[0][id] * gh[0][id] + gh[1][id] * gh[1][id];
      const double rhs = av + bt[id] + A.lambda * std::pow(1.0 + q2, 1.5) * hh[id];
      worst = std::max(worst, std::abs(lhs[id] - rhs) / (1.0 + std::abs(lhs[id])));
    }
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("first-order term vanishes without a base graph") {
  auto d = build_domain(DomainSpec::square(0.0, 1.0, 17));
  auto v = GridField::from_function(d, [](const Point& x) { return std::sin(3 * x[0]) * x[1]; });
  auto zero = GridField::constant(d, 0.0);
  CHECK(max_interior(b_term(v, zero, v)) == 0.0);
}
