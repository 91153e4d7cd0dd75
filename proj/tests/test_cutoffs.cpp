#include <doctest.h>

#include "vbmo/cutoffs.hpp"

using namespace vbmo;

TEST_CASE("plateau profiles hit exactly 1 and 0 at their radii") {
  for (Profile p : {Profile::phi, Profile::psi, Profile::theta}) {
    const double a = plateau_radius(p), b = support_radius(p);
    CHECK(bump_value(p, 0.0) == 1.0);
    CHECK(bump_value(p, a) == 1.0);
    CHECK(bump_value(p, -a) == 1.0);
    CHECK(bump_value(p, b) == 0.0);
    CHECK(bump_value(p, b + 1.0) == 0.0);
    const double mid = bump_value(p, 0.5 * (a + b));
    CHECK(mid > 0.0);
    CHECK(mid < 1.0);
  }
}

TEST_CASE("profile jets agree with finite differences") {
  const double h = 1e-5;
  for (Profile p : {Profile::phi, Profile::psi, Profile::theta}) {
    const double t = 0.5 * (plateau_radius(p) + support_radius(p)) + 0.013;
    const Jet3 j = bump(p, t);
    const double d1 = (bump_value(p, t + h) - bump_value(p, t - h)) / (2 * h);
    const double d2 = (bump(p, t + h).d1 - bump(p, t - h).d1) / (2 * h);
    const double d3 = (bump(p, t + h).d2 - bump(p, t - h).d2) / (2 * h);
    CHECK(j.d1 == doctest::Approx(d1).epsilon(1e-6));
    CHECK(j.d2 == doctest::Approx(d2).epsilon(1e-6));
    CHECK(j.d3 == doctest::Approx(d3).epsilon(1e-5));
  }
}

TEST_CASE("interior cut-off plateau and support are exact") {
  const InteriorCutoff c(3, {0.1, 0.2, 0.3}, 0.05);
  const CutoffAudit a = audit_interior_cutoff(c, 4000);
  CHECK(a.plateau_ok);
  CHECK(a.support_ok);
  CHECK(a.min_value >= 0.0);
  CHECK(a.max_value <= 1.0);
}

TEST_CASE("eps^2 times the Hessian is scale invariant") {
  std::vector<double> v;
  for (double e : {0.1, 0.05, 0.025}) v.push_back(audit_interior_cutoff(InteriorCutoff(2, {0, 0, 0}, e), 2000).eps2_hessian);
  CHECK(v[1] == doctest::Approx(v[0]).epsilon(1e-6));
  CHECK(v[2] == doctest::Approx(v[0]).epsilon(1e-6));
}

TEST_CASE("interior plateau measure approaches the ball volume") {
  const Grid g = Grid::torus(2, 256);
  const InteriorCutoff c(2, {0.5, 0.5, 0}, 0.1);
  CHECK(interior_plateau_measure(c, g) == doctest::Approx(kPi * 0.01).epsilon(0.03));
}

TEST_CASE("boundary cut-off on a half space is flat in the normal band") {
  const DomainSpec s = DomainSpec::half_space(2, {0, -0.5, 0}, {1, 0.5, 0});
  const BoundaryCutoff c(chart_at(s, {0.5, 0, 0}), 0.02);
  const CutoffAudit a = audit_boundary_cutoff(c, s, 1000);
  CHECK(a.plateau_ok);
  CHECK(a.support_ok);
  CHECK(a.max_normal_derivative < 1e-6);
}

TEST_CASE("boundary cut-off on a curved boundary stays flat along the normal") {
  const DomainSpec s = DomainSpec::ball(3, {0, 0, 0}, 1.0);
  const BoundaryCutoff c(chart_at(s, {0, 0, 1}), 0.01);
  const CutoffAudit a = audit_boundary_cutoff(c, s, 400);
  CHECK(a.plateau_ok);
  CHECK(a.support_ok);
  CHECK(a.max_normal_derivative < 1e-6);
}
