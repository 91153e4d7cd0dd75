#include <doctest.h>

#include "vbmo/domains.hpp"

using namespace vbmo;

TEST_CASE("half-space distance is the normal coordinate") {
  const DomainSpec s = DomainSpec::half_space(3, {0, 0, -1}, {1, 1, 1});
  const DistanceSample d = distance_at(s, {0.3, 0.4, 0.25});
  REQUIRE(d.valid);
  CHECK(d.d == doctest::Approx(0.25));
  CHECK(d.grad[2] == doctest::Approx(1.0));
  CHECK(d.foot[2] == doctest::Approx(0.0));
}

TEST_CASE("ball signed distance matches R - |x - c|") {
  const DomainSpec s = DomainSpec::ball(2, {0.1, -0.2, 0}, 0.5);
  Rng rng(3);
  for (int k = 0; k < 50; ++k) {
    const Vec x = Vec{0.1, -0.2, 0} + 0.5 * random_in_ball(rng, 2);
    const DistanceSample d = distance_at(s, x);
    if (!d.valid) continue;
    CHECK(d.d == doctest::Approx(0.5 - norm(x - Vec{0.1, -0.2, 0})).epsilon(1e-10));
    CHECK(norm(d.grad) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("sphere cap heights match the closed form") {
  const SphereCapGraph cap(1, 0.5);
  for (double y : {0.0, 0.1, 0.2, 0.3}) CHECK(cap.h({y, 0, 0}) == doctest::Approx(0.5 - std::sqrt(0.25 - y * y)).epsilon(1e-12));
  const GraphBounds b = graph_bounds(cap, 0.3);
  CHECK(b.sup_h == doctest::Approx(0.5 - std::sqrt(0.25 - 0.09)).epsilon(1e-6));
}

TEST_CASE("normal coordinates invert the forward map") {
  const DomainSpec s = DomainSpec::ball(3, {0, 0, 0}, 1.0);
  const Chart ch = chart_at(s, {0, 0, -1});
  Rng rng(4);
  for (int k = 0; k < 20; ++k) {
    const Vec eta{rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1), rng.uniform(-0.05, 0.05)};
    const Vec x = normal_map_forward(ch, eta);
    const Vec back = normal_map_inverse(ch, x);
    CHECK(norm(back - eta) < 1e-9);
  }
}

TEST_CASE("charts are centred with zero slope") {
  const DomainSpec s = DomainSpec::ball(2, {0, 0, 0}, 1.0);
  const Chart ch = chart_at(s, {std::sqrt(0.5), std::sqrt(0.5), 0});
  CHECK(std::fabs(ch.graph->h({0, 0, 0})) < 1e-12);
  CHECK(std::fabs(ch.graph->grad({0, 0, 0})[0]) < 1e-9);
  CHECK(ch.inside_local({0, 0.01, 0}));
}

TEST_CASE("ball boundary patches are star-like and the reach is the radius") {
  const DomainSpec s = DomainSpec::ball(2, {0, 0, 0}, 1.0);
  const double rho = 0.9 / (32.0 * 2 * s.K);
  CHECK(check_star_like(s, {1, 0, 0}, rho, 64).pass);
  const ReachReport r = estimate_reach(s);
  CHECK(r.estimated == doctest::Approx(1.0).epsilon(0.05));
  CHECK_FALSE(r.flagged);
}

TEST_CASE("masks follow membership") {
  const DomainSpec s = DomainSpec::ball(2, {0, 0, 0}, 0.4);
  const Grid g = Grid::box(2, 32, s.box_lo, s.box_hi);
  const Mask m = domain_mask(s, g);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK((m[i] != 0) == (norm(g.node(i)) < 0.4));
}

TEST_CASE("graph projection resolves the foot point to roundoff near the surface") {
  auto H = std::make_shared<RadialSumGraph>(2, std::vector<Bump>{Bump{{0, 0, 0}, 0.05, 0.4}});
  Rng rng(21);
  for (int k = 0; k < 50; ++k) {
    Vec x{rng.uniform(-0.35, 0.35), rng.uniform(-0.35, 0.35), 0};
    x[2] = H->h(x) + rng.uniform(-1e-4, 1e-4);
    const Vec foot = graph_projection(*H, 3, x);
    const Vec g = H->grad(foot);
    const Vec nu = (1.0 / std::sqrt(1 + g[0] * g[0] + g[1] * g[1])) * Vec{-g[0], -g[1], 1};
    const Vec r = x - foot;
    // x - foot is parallel to the normal at the foot.
    CHECK(norm(r - dot(r, nu) * nu) < 1e-14);
  }
}
