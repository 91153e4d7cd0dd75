#include <doctest.h>

#include <cmath>

#include "vbmo/helmholtz.hpp"

using namespace vbmo;

namespace {

double max_abs_diff(const VectorField& a, const VectorField& b, const Mask* mask = nullptr) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.c.size(); ++k)
    for (std::size_t i = 0; i < a.c[k].size(); ++i)
      if (!mask || (*mask)[i]) m = std::max(m, std::fabs(a.c[k][i] - b.c[k][i]));
  return m;
}

double max_abs(const VectorField& a) {
  double m = 0.0;
  for (const auto& comp : a.c)
    for (double x : comp) m = std::max(m, std::fabs(x));
  return m;
}

// Fluxes of a corner-valued stream function: discretely divergence-free.
VectorField stream_field(const Grid& g, const std::function<double(double, double)>& psi) {
  VectorField F(g);
  const double h = g.spacing[0];
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Vec x = g.node(i);
    const double xr = x[0] + 0.5 * h, xl = x[0] - 0.5 * h, yt = x[1] + 0.5 * h, yb = x[1] - 0.5 * h;
    F.c[0][i] = (psi(xr, yt) - psi(xr, yb)) / h;
    F.c[1][i] = -(psi(xr, yt) - psi(xl, yt)) / h;
  }
  return F;
}

}  // namespace

TEST_CASE("whole-space projector separates gradient and solenoidal parts") {
  const Grid g = Grid::torus(2, 32);
  const double w = 2 * kPi;
  const VectorField grad = sample(g, [&](const Vec& x) {
    return Vec{w * std::cos(w * x[0]) * std::cos(w * x[1]), -w * std::sin(w * x[0]) * std::sin(w * x[1]), 0};
  });
  const VectorField sol = sample(g, [&](const Vec& x) { return Vec{std::sin(w * x[1]), std::sin(2 * w * x[0]), 0}; });
  const auto rg = project_whole_space(grad);
  CHECK(max_abs(rg.f0) < 1e-12 * max_abs(grad));
  CHECK(max_abs_diff(rg.grad_p, grad) < 1e-12 * max_abs(grad));
  const auto rs = project_whole_space(sol);
  CHECK(max_abs_diff(rs.f0, sol) == 0.0);
  CHECK(max_abs(rs.grad_p) == 0.0);
}

TEST_CASE("whole-space projector is idempotent bitwise and contracts norms") {
  const Grid g = Grid::torus(3, 16);
  VectorField f(g);
  for (int a = 0; a < 3; ++a) f.c[static_cast<std::size_t>(a)] = synth_field(g, 1.5, 40 + a).v;
  const auto r1 = project_whole_space(f);
  const auto r2 = project_whole_space(r1.f0);
  CHECK(max_abs_diff(r1.f0, r2.f0) == 0.0);
  const double nf = lp_norm(f, 2.0), n0 = lp_norm(r1.f0, 2.0), ng = lp_norm(r1.grad_p, 2.0);
  CHECK(n0 <= nf + 1e-12);
  CHECK(ng <= nf + 1e-12);
  CHECK(std::fabs(inner(r1.f0, r1.grad_p)) < 1e-10 * nf * nf);
  CHECK(r1.diag.reconstruction_error < 1e-12);
}

TEST_CASE("reflection to the doubled grid round-trips") {
  Grid slab = Grid::box(2, 16, {0, 0, 0}, {1, 1, 0});
  slab.periodic[0] = true;
  const VectorField f = sample(slab, [](const Vec& x) { return Vec{std::cos(9 * x[0] + x[1]), x[1] * x[1] - x[0], 0}; });
  const VectorField F = reflect_to_doubled(f, 1);
  CHECK(max_abs_diff(restrict_from_doubled(F, 1, 16), f) == 0.0);
  const VectorField S = symmetrize_doubled(F, 1);
  CHECK(max_abs_diff(S, F) == 0.0);
  const VectorField G = sample(F.grid, [](const Vec& x) { return Vec{std::sin(3 * x[1]), x[0] * x[1], 0}; });
  const VectorField SG = symmetrize_doubled(G, 1);
  CHECK(max_abs_diff(symmetrize_doubled(SG, 1), SG) == 0.0);
}

TEST_CASE("masked Laplacian is symmetric with constants in its kernel") {
  const Grid g = Grid::box(2, 24, {-0.5, -0.5, 0}, {0.5, 0.5, 0});
  const Mask mask = domain_mask(DomainSpec::ball(2, {0, 0, 0}, 0.4), g);
  const MaskedLaplacian A(g, mask);
  const std::size_t n = A.size();
  std::vector<double> x(n), y(n), Ax(n), Ay(n), one(n, 1.0), A1(n);
  Rng rng(8);
  for (std::size_t k = 0; k < n; ++k) x[k] = rng.normal(), y[k] = rng.normal();
  A.apply(x.data(), Ax.data());
  A.apply(y.data(), Ay.data());
  A.apply(one.data(), A1.data());
  double xAy = 0, yAx = 0, xAx = 0, scale = 0;
  for (std::size_t k = 0; k < n; ++k) {
    xAy += x[k] * Ay[k], yAx += y[k] * Ax[k], xAx += x[k] * Ax[k];
    scale += std::fabs(x[k] * Ay[k]);
    CHECK(A1[k] == 0.0);
  }
  CHECK(std::fabs(xAy - yAx) < 1e-12 * scale);
  CHECK(xAx > 0.0);
}

TEST_CASE("masked projection recovers a discrete gradient") {
  const Grid g = Grid::box(2, 48, {-0.5, -0.5, 0}, {0.5, 0.5, 0});
  const DomainSpec spec = DomainSpec::ball(2, {0, 0, 0}, 0.4);
  const Mask mask = domain_mask(spec, g);
  const VectorField F = face_gradient(sample(g, [](const Vec& x) { return std::cos(3 * x[0]) * std::exp(x[1]); }), mask);
  const auto r = project_domain(F, mask);
  CHECK(r.solve.converged);
  CHECK(face_max(r.f0, mask) < 1e-7 * face_max(F, mask));
  CHECK(max_abs_diff(r.grad_p, F, &mask) < 1e-7 * face_max(F, mask));
}

TEST_CASE("masked projection leaves a discrete stream field unchanged") {
  const Grid g = Grid::box(2, 40, {0, 0, 0}, {1, 1, 0});
  const Mask mask(g.size(), 1);
  const VectorField F = stream_field(g, [](double x, double y) {
    return std::pow(std::sin(kPi * x) * std::sin(kPi * y), 2) * (1 + x);
  });
  const auto r = project_domain(F, mask);
  CHECK(face_max(face_gradient(r.p, mask), mask) < 1e-7 * face_max(F, mask));
  for (std::size_t i = 0; i < g.size(); ++i)
    for (int a = 0; a < 2; ++a)
      if (face_kind(g, mask, i, a) == FaceKind::interior)
        CHECK(std::fabs(r.f0.c[static_cast<std::size_t>(a)][i] - F.c[static_cast<std::size_t>(a)][i]) <
              1e-7 * face_max(F, mask));
}

TEST_CASE("masked projection zeroes the boundary flux and is orthogonal") {
  const Grid g = Grid::box(3, 24, {-0.5, -0.5, -0.5}, {0.5, 0.5, 0.5});
  const DomainSpec spec = DomainSpec::ball(3, {0, 0, 0}, 0.4);
  const VectorField f = theorem_corpus(g, spec.box_lo, spec.box_hi, 1, 5).front();
  const auto r = project_domain(f, spec);
  CHECK(r.solve.converged);
  CHECK(r.diag.normal_trace == 0.0);
  CHECK(std::fabs(r.diag.orthogonality) < 1e-8);
  CHECK(r.diag.div_residual < 1e-8);
  CHECK(r.diag.reconstruction_error < 1e-12);
}

TEST_CASE("multigrid and Jacobi preconditioning reach the same potential") {
  const Grid g = Grid::box(2, 40, {-0.5, -0.5, 0}, {0.5, 0.5, 0});
  const DomainSpec spec = DomainSpec::ball(2, {0.05, 0, 0}, 0.4);
  const Mask mask = domain_mask(spec, g);
  const VectorField f = theorem_corpus(g, spec.box_lo, spec.box_hi, 1, 9).front();
  NeumannOptions jac;
  jac.precond = Preconditioner::jacobi;
  const auto a = project_domain(f, mask, jac);
  const auto b = project_domain(f, mask);
  CHECK(a.solve.converged);
  CHECK(b.solve.converged);
  CHECK(b.solve.iterations < a.solve.iterations);
  CHECK(max_abs_diff(a.f0, b.f0, &mask) < 1e-7 * face_max(f, mask));
}

TEST_CASE("serial and OpenMP Neumann solves agree bitwise") {
  const Grid g = Grid::box(2, 32, {-0.5, -0.5, 0}, {0.5, 0.5, 0});
  const DomainSpec spec = DomainSpec::ball(2, {0, 0, 0}, 0.4);
  const VectorField f = theorem_corpus(g, spec.box_lo, spec.box_hi, 1, 2).front();
  for (Preconditioner pc : {Preconditioner::jacobi, Preconditioner::multigrid}) {
    NeumannOptions s, o;
    s.exec = Exec::serial, o.exec = Exec::omp;
    s.precond = o.precond = pc;
    const auto a = project_domain(f, spec, s);
    const auto b = project_domain(f, spec, o);
    CHECK(a.p.v == b.p.v);
    CHECK(a.solve.iterations == b.solve.iterations);
  }
}

TEST_CASE("divergence solver vanishes on zero data and outside the domain") {
  const Grid g = Grid::box(2, 48, {-0.5, -0.5, 0}, {0.5, 0.5, 0});
  const StarDomain d = star_ball(g, {0, 0, 0}, 0.4, 0.2);
  CHECK(star_like(d, 64));
  const auto z = bogovskii(ScalarField(g), d);
  CHECK(max_abs(z.u) == 0.0);
  const ScalarField gdat = sample(g, [](const Vec& x) {
    const double r2 = (x[0] * x[0] + x[1] * x[1]) / 0.09;
    return r2 < 1 ? x[0] * std::exp(1 - 1 / (1 - r2)) : 0.0;
  });
  const auto r = bogovskii(gdat, d);
  CHECK(r.trace_max == 0.0);
  CHECK(std::fabs(r.flux) < 1e-12);
  CHECK(r.div_residual < 0.2);
  CHECK(r.ratio > 0.0);
}

TEST_CASE("divergence solver rejects data with nonzero mean") {
  const Grid g = Grid::box(2, 32, {-0.5, -0.5, 0}, {0.5, 0.5, 0});
  const StarDomain d = star_ball(g, {0, 0, 0}, 0.4, 0.2);
  CHECK_THROWS_AS(bogovskii(ScalarField(g, 1.0), d), PreconditionError);
}

TEST_CASE("operator bound shape grows as the core shrinks") {
  CHECK(bogovskii_shape_bound(3, 1.0, 0.125) > bogovskii_shape_bound(3, 1.0, 0.25));
  CHECK(bogovskii_shape_bound(2, 1.0, 1.0) == 2.0);
}

TEST_CASE("localization identities hold trivially for zero data") {
  const DomainSpec spec = DomainSpec::ball(2, {0, 0, 0}, 0.4);
  const Grid g = Grid::box(2, 64, {-0.5, -0.5, 0}, {0.5, 0.5, 0});
  const VectorField f(g);
  const auto dec = project_domain(f, spec);
  const auto r = localized_interior_identity(f, dec, spec, {0, 0, 0}, 0.05);
  CHECK(r.residual == 0.0);
  CHECK(r.mean_defect == 0.0);
}

TEST_CASE("interior identity is satisfied to roundoff") {
  const DomainSpec spec = DomainSpec::ball(2, {0, 0, 0}, 0.4);
  const Grid g = Grid::box(2, 96, {-0.5, -0.5, 0}, {0.5, 0.5, 0});
  const VectorField f = theorem_corpus(g, spec.box_lo, spec.box_hi, 1, 12).front();
  const auto dec = project_domain(f, spec);
  const auto r = localized_interior_identity(f, dec, spec, {0.02, -0.03, 0}, 0.05);
  CHECK(r.faces > 0);
  CHECK(r.relative < 1e-8);
  CHECK(std::isfinite(r.consistency));
  CHECK_THROWS_AS(localized_interior_identity(f, dec, spec, {0.3, 0, 0}, 0.05), PreconditionError);
}

TEST_CASE("epsilon cap is infinite without a boundary and positive otherwise") {
  CHECK(std::isinf(epsilon_cap(DomainSpec::torus(3))));
  const double c = epsilon_cap(DomainSpec::ball(3, {0, 0, 0}, 0.4));
  CHECK(c > 0.0);
  CHECK(std::isfinite(c));
}

TEST_CASE("gradient of a polynomial is classified as a gradient") {
  const DomainSpec spec = DomainSpec::ball(2, {0, 0, 0}, 0.4);
  const Grid g = Grid::box(2, 32, {-0.5, -0.5, 0}, {0.5, 0.5, 0});
  const Mask mask = domain_mask(spec, g);
  const VectorField v = face_gradient(sample(g, [](const Vec& x) { return x[0] * x[1]; }), mask);
  const Classification c = characterize_subspaces(v, spec);
  CHECK(c.kind == FieldClass::gradient);
  CHECK(c.agrees);
  CHECK(class_name(c.kind) == "gradient");
}

TEST_CASE("stability audit labels two-dimensional runs") {
  const DomainSpec spec = DomainSpec::ball(2, {0, 0, 0}, 0.4);
  const Grid g = Grid::box(2, 32, {-0.5, -0.5, 0}, {0.5, 0.5, 0});
  TheoremOptions opt;
  opt.eps = 0.05;
  opt.policy.random_count = 64;
  const auto rep = verify_main_theorem(theorem_corpus(g, spec.box_lo, spec.box_hi, 1, 3), spec, opt);
  CHECK_FALSE(rep.dimension_hypothesis);
  CHECK(rep.label.find("n = 2") != std::string::npos);
  REQUIRE(rep.fields.size() == 1);
  CHECK(std::isfinite(rep.fields[0].c_emp));
  CHECK(rep.fields[0].n_f0 <= rep.max_c * rep.fields[0].n_f + 1e-12);
}
