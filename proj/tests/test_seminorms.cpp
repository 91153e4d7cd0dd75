#include <doctest.h>

#include "vbmo/helmholtz.hpp"
#include "vbmo/seminorms.hpp"

using namespace vbmo;

namespace {
BallPolicySpec exhaustive() {
  BallPolicySpec p;
  p.kind = BallPolicy::exhaustive;
  return p;
}
}  // namespace

TEST_CASE("exhaustive sweep equals the brute-force oracle bitwise") {
  const Grid g = Grid::torus(2, 16);
  const Region R = region_from_spec(DomainSpec::torus(2), g);
  const ScalarField u = synth_field(g, 1.5, 3);
  CHECK(bmo_seminorm(u, R, make_ball_set(R, kInf, exhaustive())).value == brute_force_bmo(u, R, kInf));
}

TEST_CASE("exhaustive sweep equals brute force on a masked domain") {
  const DomainSpec s = DomainSpec::ball(2, {0, 0, 0}, 0.4);
  const Grid g = Grid::box(2, 24, s.box_lo, s.box_hi);
  const Region R = region_from_spec(s, g);
  const VectorField f = sample(g, corpus_function(2, s.box_lo, s.box_hi, 4));
  CHECK(bmo_seminorm(f, R, make_ball_set(R, 0.3, exhaustive())).value == brute_force_bmo(f, R, 0.3));
}

TEST_CASE("constants have zero oscillation and scaling is linear") {
  const Grid g = Grid::torus(2, 32);
  const Region R = region_from_spec(DomainSpec::torus(2), g);
  const BallSet balls = make_ball_set(R, kInf, BallPolicySpec{});
  CHECK(bmo_seminorm(ScalarField(g, 3.25), R, balls).value == 0.0);
  const ScalarField u = synth_field(g, 2.0, 8);
  ScalarField v = u;
  for (double& x : v.v) x *= -2.0;
  const double a = bmo_seminorm(u, R, balls).value, b = bmo_seminorm(v, R, balls).value;
  CHECK(b == doctest::Approx(2.0 * a).epsilon(1e-12));
  ScalarField w = u;
  for (double& x : w.v) x += 7.0;
  CHECK(bmo_seminorm(w, R, balls).value == doctest::Approx(a).epsilon(1e-10));
}

TEST_CASE("lattice policy stays within [0.9, 1] of exhaustive") {
  const Grid g = Grid::torus(2, 32);
  const Region R = region_from_spec(DomainSpec::torus(2), g);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const ScalarField u = synth_field(g, 2.0, seed);
    const double ex = bmo_seminorm(u, R, make_ball_set(R, 0.25, exhaustive())).value;
    const double lat = bmo_seminorm(u, R, make_ball_set(R, 0.25, BallPolicySpec{})).value;
    CHECK(lat / ex >= 0.9);
    CHECK(lat / ex <= 1.0);
  }
}

TEST_CASE("b-seminorm of the unit normal field is about half the unit-ball volume") {
  // For f = e_n on a half space, r^-n times the integral of |f . nu| over the
  // half ball is omega_n / 2 for every radius.
  const DomainSpec s = DomainSpec::half_space(2, {0, -0.5, 0}, {1, 0.5, 0});
  Grid g = Grid::box(2, 128, s.box_lo, s.box_hi);
  g.periodic[0] = true;
  const VectorField f = sample(g, [](const Vec&) { return Vec{0, 1, 0}; });
  const SignedDistanceField sdf = signed_distance(s, g);
  const BoundarySet set = make_boundary_set(s, g, 0.25);
  const BSupResult b = b_seminorm(f, sdf, domain_mask(s, g), set);
  CHECK(b.value == doctest::Approx(kPi / 2).epsilon(0.05));
}

TEST_CASE("Hoelder quotient of an affine function is its slope") {
  const Grid g = Grid::box(2, 32, {0, 0, 0}, {1, 1, 0});
  const ScalarField u = sample(g, [](const Vec& x) { return 3.0 * x[0]; });
  const Mask m(g.size(), 1);
  CHECK(holder_norm(u, 1.0, m) == doctest::Approx(3.0 + lp_norm(u, kInf)).epsilon(1e-9));
}

TEST_CASE("interpolation constant needs ordered finite exponents") {
  const Grid g = Grid::torus(2, 16);
  const SeminormContext ctx = make_context(DomainSpec::torus(2), g, kInf, kInf);
  const ScalarField u = synth_field(g, 2.0, 1);
  CHECK_THROWS_AS(interpolation_constant(u, 4.0, 2.0, ctx), PreconditionError);
  CHECK_THROWS_AS(interpolation_constant(u, 2.0, kInf, ctx), PreconditionError);
  CHECK(interpolation_constant(u, 2.0, 4.0, ctx) > 0.0);
}
