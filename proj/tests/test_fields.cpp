#include <doctest.h>

#include "vbmo/fields.hpp"

using namespace vbmo;

TEST_CASE("grid indexing round-trips") {
  const Grid g = Grid::box(3, 5, {0, 0, 0}, {1, 2, 3});
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto c = g.unravel(i);
    CHECK(g.index(c[0], c[1], c[2]) == i);
  }
}

TEST_CASE("box grids are cell centred") {
  const Grid g = Grid::box(2, 4, {-1, 0, 0}, {1, 1, 0});
  CHECK(g.node(0)[0] == doctest::Approx(-0.75));
  CHECK(g.node(0)[1] == doctest::Approx(0.125));
  CHECK(g.cell_volume() == doctest::Approx(0.5 * 0.25));
}

TEST_CASE("Lp norm of a constant is its value times volume^(1/p)") {
  const Grid g = Grid::box(2, 16, {0, 0, 0}, {2, 3, 0});
  const ScalarField u(g, 1.5);
  CHECK(lp_norm(u, 2.0) == doctest::Approx(1.5 * std::sqrt(6.0)).epsilon(1e-12));
  CHECK(lp_norm(u, 4.0) == doctest::Approx(1.5 * std::pow(6.0, 0.25)).epsilon(1e-12));
  CHECK(lp_norm(u, kInf) == 1.5);
}

TEST_CASE("spectral derivative of a trigonometric polynomial is exact") {
  const Grid g = Grid::torus(2, 32);
  const auto u = sample(g, [](const Vec& x) { return std::sin(2 * kPi * 3 * x[0]) * std::cos(2 * kPi * x[1]); });
  const auto du = partial(u, 0, Scheme::spectral);
  double err = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Vec x = g.node(i);
    err = std::max(err, std::fabs(du.v[i] - 6 * kPi * std::cos(6 * kPi * x[0]) * std::cos(2 * kPi * x[1])));
  }
  CHECK(err < 1e-11);
}

TEST_CASE("central differences converge at second order") {
  double prev = 0.0;
  for (std::size_t n : {32ul, 64ul}) {
    const Grid g = Grid::torus(2, n);
    const auto u = sample(g, [](const Vec& x) { return std::sin(2 * kPi * x[1]); });
    const auto du = partial(u, 1, Scheme::central);
    double err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) err = std::max(err, std::fabs(du.v[i] - 2 * kPi * std::cos(2 * kPi * g.node(i)[1])));
    if (prev > 0.0) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.02));
    prev = err;
  }
}

TEST_CASE("ball average of an affine function is its centre value") {
  const Grid g = Grid::torus(2, 64);
  const auto u = sample(g, [](const Vec& x) { return 2.0 * x[0] - x[1]; });
  const Vec c{g.node(g.index(20, 30))};
  CHECK(ball_average(u, c, 0.1) == doctest::Approx(2.0 * c[0] - c[1]).epsilon(1e-12));
}

TEST_CASE("synthetic fields are deterministic with unit L2 norm") {
  const Grid g = Grid::torus(2, 32);
  const auto a = synth_field(g, 2.0, 9), b = synth_field(g, 2.0, 9), c = synth_field(g, 2.0, 10);
  CHECK(a.v == b.v);
  CHECK(a.v != c.v);
  CHECK(lp_norm(a, 2.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("face sampling reads each component at its face midpoint") {
  const Grid g = Grid::box(2, 8, {0, 0, 0}, {1, 1, 0});
  const auto f = sample_on_faces(g, [](const Vec& x) { return Vec{x[0], 10 * x[1], 0}; });
  const std::size_t i = g.index(3, 5);
  CHECK(f.c[0][i] == doctest::Approx(g.node(i)[0] + 0.5 * g.spacing[0]));
  CHECK(f.c[1][i] == doctest::Approx(10 * (g.node(i)[1] + 0.5 * g.spacing[1])));
}

TEST_CASE("non-finite input is rejected") {
  const Grid g = Grid::torus(2, 16);
  ScalarField u(g);
  u.v[3] = std::nan("");
  CHECK_THROWS(require_finite(u));
}
