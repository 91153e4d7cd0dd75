#include <algorithm>

#include "vbmo/helmholtz.hpp"

namespace vbmo {

double epsilon_cap(const DomainSpec& spec) {
  if (!spec.has_boundary()) return kInf;
  const DomainConstants& c = spec.constants;
  const double n = spec.ndim, K = spec.K;
  double cap = std::min({spec.beta / 96.0, c.c_half / 7.0, 1.0 / (1152.0 * n * K + 48.0), c.c0 / 12.0});
  if (K > 0.0) cap = std::min(cap, c.M0 / (12.0 * n * K));
  return cap;
}

namespace {

// Neighbour along +axis, -1 when none.
long up(const Grid& g, std::size_t i, int a) {
  const auto ua = static_cast<std::size_t>(a);
  const std::size_t c = g.unravel(i)[ua], N = g.shape[ua], st = g.stride(a);
  if (c + 1 < N) return static_cast<long>(i + st);
  return g.periodic[ua] && N > 1 ? static_cast<long>(i - (N - 1) * st) : -1;
}

struct LocalTerms {
  ScalarField phi;       // nodes
  Mask region;           // Bogovskii domain nodes
  double M = 0.0;
};

// Shared part of both identities: the face residual, the mean-zero premise,
// the Bogovskii solve and the identity check.
void assemble(const VectorField& f, const DecompositionResult& dec, const Mask& mask, const LocalTerms& t,
              const StarDomain& star, const std::function<Vec(const Vec&)>& grad_phi, IdentityRecord& rec,
              VectorField& omega) {
  const Grid& g = f.grid;
  const int n = g.ndim;
  const double vol = g.cell_volume();
  // g = grad phi . f0 split half to each endpoint of every interior face.
  ScalarField rhs(g);
  std::vector<double> flux(g.size(), 0.0);
  for (std::size_t i = 0; i < g.size(); ++i)
    for (int a = 0; a < n; ++a) {
      if (face_kind(g, mask, i, a) != FaceKind::interior) continue;
      const auto j = static_cast<std::size_t>(up(g, i, a));
      const double prod = (t.phi.v[j] - t.phi.v[i]) / g.spacing[a] * dec.f0.c[static_cast<std::size_t>(a)][i];
      if (prod == 0.0) continue;
      flux[i] += prod;
      rhs.v[i] += 0.5 * prod;
      rhs.v[j] += 0.5 * prod;
    }
  rec.mean_defect = tree_sum(flux) * vol;
  // Project the remaining solver-level defect out before the divergence solve.
  double s = 0.0;
  long cnt = 0;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (t.region[i]) {
      s += rhs.v[i];
      ++cnt;
    }
  for (std::size_t i = 0; i < g.size(); ++i)
    if (t.region[i]) rhs.v[i] -= s / static_cast<double>(cnt);
    else rhs.v[i] = 0.0;

  BogovskiiOptions bo;
  bo.check_star = false;
  bo.mean_tol = 1e-8;
  const BogovskiiResult bog = bogovskii(rhs, star, bo);
  rec.bogovskii_defect = bog.div_residual;
  omega = bog.u;

  rec.f_scale = face_max(f, mask);
  double res = 0.0, gap = 0.0;
  int faces = 0;
  for (std::size_t i = 0; i < g.size(); ++i)
    for (int a = 0; a < n; ++a) {
      if (face_kind(g, mask, i, a) != FaceKind::interior) continue;
      const auto j = static_cast<std::size_t>(up(g, i, a));
      const auto ua = static_cast<std::size_t>(a);
      const double h = g.spacing[a];
      const double pi = t.phi.v[i], pj = t.phi.v[j];
      const double qi = dec.p.v[i] - t.M, qj = dec.p.v[j] - t.M;
      const double phibar = 0.5 * (pi + pj), dphi = (pj - pi) / h, qbar = 0.5 * (qi + qj);
      const double wbar = 0.5 * (omega.c[ua][i] + omega.c[ua][j]);
      const double lhs = phibar * f.c[ua][i] + dphi * qbar - wbar;
      const double rhs_id = (phibar * dec.f0.c[ua][i] - wbar) + (pj * qj - pi * qi) / h;
      if (phibar != 0.0 || wbar != 0.0) ++faces;
      res = std::max(res, std::fabs(lhs - rhs_id));
      if (t.region[i] && t.region[j]) {
        Vec mid = g.node(i);
        mid[a] += 0.5 * h;
        gap = std::max(gap, std::fabs((grad_phi(mid)[a] - dphi) * qbar));
      }
    }
  rec.residual = res;
  rec.faces = faces;
  rec.relative = rec.f_scale > 0.0 ? res / rec.f_scale : res;
  rec.consistency = rec.f_scale > 0.0 ? gap / rec.f_scale : gap;
  rec.M = t.M;
}

double mean_over(const ScalarField& p, const Mask& region) {
  double s = 0.0;
  long c = 0;
  for (std::size_t i = 0; i < region.size(); ++i)
    if (region[i]) {
      s += p.v[i];
      ++c;
    }
  if (c == 0) throw DegenerateBallError("localization region holds no nodes");
  return s / static_cast<double>(c);
}

}  // namespace

IdentityRecord localized_interior_identity(const VectorField& f, const DecompositionResult& dec, const DomainSpec& spec,
                                           const Vec& x, double eps) {
  const Grid& g = f.grid;
  const int n = g.ndim;
  if (spec.has_boundary()) {
    const DistanceSample ds = distance_at(spec, x);
    const double d = ds.valid ? ds.d : spec.band;
    if (!spec.inside(x) || d < 3.0 * eps) throw PreconditionError("interior point closer than 3 eps to the boundary");
  }
  const Mask mask = domain_mask(spec, g);
  const InteriorCutoff cut(n, x, eps);
  LocalTerms t;
  t.phi = ScalarField(g);
  t.region.assign(g.size(), 0);
  const double r2 = 4.0 * eps * eps;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Vec y = g.node(i);
    Vec d{0, 0, 0};
    for (int a = 0; a < n; ++a) d[a] = axis_displacement(g, a, y[a], x[a]);
    if (dot(d, d) >= r2) continue;
    t.phi.v[i] = cut.value(x + d);
    if (mask[i]) t.region[i] = 1;
  }
  t.M = mean_over(dec.p, t.region);
  StarDomain star;
  star.grid = g;
  star.mask = t.region;
  star.inside = [x, eps, n](const Vec& y) {
    double s = 0.0;
    for (int a = 0; a < n; ++a) s += (y[a] - x[a]) * (y[a] - x[a]);
    return s < 4.0 * eps * eps;
  };
  star.x0 = x;
  star.R = eps;
  star.diameter = 4.0 * eps;

  IdentityRecord rec;
  VectorField omega;
  auto grad_phi = [&](const Vec& y) {
    Vec d{0, 0, 0};
    for (int a = 0; a < n; ++a) d[a] = axis_displacement(g, a, y[a], x[a]);
    return cut.eval(x + d).grad;
  };
  assemble(f, dec, mask, t, star, grad_phi, rec, omega);

  // vBMOL^2 norms on B_{2 eps}(x) of the three localized terms.
  const DomainSpec ball = DomainSpec::ball(n, x, 2.0 * eps);
  const SeminormContext ctx = make_context(ball, g, kInf, kInf);
  const VectorField fn = faces_to_nodes(f, mask);
  VectorField a(g), b(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!t.region[i]) continue;
    const CutoffValue cv = cut.eval(g.node(i));
    for (int k = 0; k < n; ++k) {
      a.c[static_cast<std::size_t>(k)][i] = t.phi.v[i] * fn.c[static_cast<std::size_t>(k)][i];
      b.c[static_cast<std::size_t>(k)][i] = cv.grad[k] * (dec.p.v[i] - t.M);
    }
  }
  rec.norm_phi_f = vbmo_norm(a, ctx).norm;
  rec.norm_grad_phi_p = vbmo_norm(b, ctx).norm;
  rec.norm_omega = vbmo_norm(omega, ctx).norm;
  return rec;
}

IdentityRecord localized_boundary_identity(const VectorField& f, const DecompositionResult& dec,
                                           const DomainSpec& spec, const Vec& z0, double eps) {
  const Grid& g = f.grid;
  const int n = g.ndim;
  if (!spec.has_boundary()) throw PreconditionError("domain has no boundary");
  if (!(eps < epsilon_cap(spec))) throw PreconditionError("eps exceeds the localization cap of the domain");
  const DistanceSample ds = distance_at(spec, z0);
  if (!ds.valid || std::fabs(ds.d) > 1e-9) throw PreconditionError("z0 must lie on the boundary");
  const double rho = 12.0 * eps;
  const StarAudit audit = check_star_like(spec, z0, rho, 64);
  if (!audit.pass) throw PreconditionError("boundary patch is not star-like w.r.t. its core ball");
  const Chart chart = chart_at(spec, z0);
  const BoundaryCutoff cut(chart, eps);
  const Mask mask = domain_mask(spec, g);

  LocalTerms t;
  t.phi = ScalarField(g);
  t.region.assign(g.size(), 0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Vec y = g.node(i);
    if (norm(y - z0) >= rho) continue;
    t.phi.v[i] = cut.value(y);
    if (mask[i]) t.region[i] = 1;
  }
  t.M = mean_over(dec.p, t.region);
  StarDomain star;
  star.grid = g;
  star.mask = t.region;
  star.inside = [spec, z0, rho](const Vec& y) { return norm(y - z0) < rho && spec.inside(y); };
  star.x0 = audit.x0;
  star.R = 0.25 * rho;
  star.diameter = 2.0 * rho;

  IdentityRecord rec;
  VectorField omega;
  assemble(f, dec, mask, t, star, [&](const Vec& y) { return cut.eval(y, false).grad; }, rec, omega);

  // Zero extension: the terms vanish outside B_{12 eps}(z0), where the domain
  // and its localized half space agree, so the norms are taken on that patch.
  SeminormContext ctx;
  ctx.spec = spec;
  ctx.region = region_from_mask(g, t.region);
  ctx.balls = make_ball_set(ctx.region, kInf, BallPolicySpec{});
  ctx.sdf = signed_distance(spec, g);
  // Boundary points on the graph of the chart, spaced about one cell.
  const double h = g.max_spacing();
  const int k = 2 * static_cast<int>(std::ceil(11.0 * eps / h)) + 1;
  const double span = 11.0 * eps;
  std::vector<Vec> pts;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < (n == 3 ? k : 1); ++j) {
      Vec yl{0, 0, 0};
      yl[0] = -span + 2.0 * span * i / (k - 1);
      if (n == 3) yl[1] = -span + 2.0 * span * j / (k - 1);
      double r2 = 0.0;
      for (int a = 0; a < n - 1; ++a) r2 += yl[a] * yl[a];
      if (r2 > span * span) continue;
      yl[n - 1] = chart.graph->h(yl);
      pts.push_back(chart.to_global(yl));
    }
  ctx.bset.points = pts;
  ctx.bset.nu = kInf;
  for (int m = 0; m < 8; ++m) {
    const double r = std::min(rho, spec.band) * (1.0 - 1e-9) * std::pow(2.0, -0.5 * m);
    if (r < 2.0 * h) break;
    ctx.bset.radii.push_back(r);
  }
  const VectorField fn = faces_to_nodes(f, mask);
  VectorField a(g), b(g);
  ScalarField bterm(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!t.region[i]) continue;
    const Vec y = g.node(i);
    const CutoffValue cv = cut.eval(y, false);
    const DistanceSample d = distance_at(spec, y);
    double gdgp = 0.0;
    for (int c = 0; c < n; ++c) {
      a.c[static_cast<std::size_t>(c)][i] = t.phi.v[i] * fn.c[static_cast<std::size_t>(c)][i];
      b.c[static_cast<std::size_t>(c)][i] = cv.grad[c] * (dec.p.v[i] - t.M);
      gdgp += d.grad[c] * cv.grad[c];
    }
    bterm.v[i] = gdgp * (dec.p.v[i] - t.M);
  }
  rec.norm_phi_f = vbmo_norm(a, ctx).norm;
  rec.norm_grad_phi_p = vbmo_norm(b, ctx).norm;
  rec.norm_omega = vbmo_norm(omega, ctx).norm;
  BoundarySet beps;
  beps.points = pts;
  beps.nu = eps;
  for (int m = 0; m < 8; ++m) {
    const double r = eps * (1.0 - 1e-9) * std::pow(2.0, -0.5 * m);
    if (r < 2.0 * h) break;
    beps.radii.push_back(r);
  }
  if (!beps.radii.empty()) rec.b_term = b_seminorm_scalar(bterm, t.region, beps).value;
  return rec;
}

// ---- corpus and end-to-end audit ----

std::function<Vec(const Vec&)> corpus_function(int ndim, const Vec& lo, const Vec& hi, std::uint64_t seed) {
  struct Term {
    std::array<int, 3> m{0, 0, 0};
    double phase = 0.0;
    Vec amp{0, 0, 0};
  };
  Rng rng(seed);
  std::vector<Term> terms(6);
  for (auto& t : terms) {
    bool zero = true;
    while (zero) {
      for (int a = 0; a < ndim; ++a) {
        t.m[static_cast<std::size_t>(a)] = static_cast<int>(rng.index(5)) - 2;
        if (t.m[static_cast<std::size_t>(a)] != 0) zero = false;
      }
    }
    t.phase = rng.uniform(0.0, 2.0 * kPi);
    for (int a = 0; a < ndim; ++a) t.amp[a] = rng.normal();
  }
  return [terms, ndim, lo, hi](const Vec& x) {
    Vec v{0, 0, 0};
    for (const auto& t : terms) {
      double arg = t.phase;
      for (int a = 0; a < ndim; ++a) arg += 2.0 * kPi * t.m[static_cast<std::size_t>(a)] * (x[a] - lo[a]) / (hi[a] - lo[a]);
      v = v + std::cos(arg) * t.amp;
    }
    return v;
  };
}

std::vector<VectorField> theorem_corpus(const Grid& g, const Vec& lo, const Vec& hi, int count, std::uint64_t seed) {
  std::vector<VectorField> out;
  for (int k = 0; k < count; ++k)
    out.push_back(sample_on_faces(g, corpus_function(g.ndim, lo, hi, seed + 7919ull * static_cast<std::uint64_t>(k))));
  return out;
}

namespace {

// Distance from a ball centre to the boundary: exact inside the band, the
// nearest boundary sample beyond it (only used to sort balls into splits).
struct CenterDistance {
  const DomainSpec& spec;
  std::vector<BoundaryPoint> samples;
  double operator()(const Vec& c) const {
    const DistanceSample d = distance_at(spec, c);
    if (d.valid) return d.d;
    double best = kInf;
    for (const BoundaryPoint& b : samples) best = std::min(best, norm(c - b.x));
    return std::max(best, spec.band);
  }
};

BallSet filter(const BallSet& s, const std::function<bool(const Ball&)>& keep) {
  BallSet out;
  out.mu = s.mu;
  for (const Ball& b : s.balls)
    if (keep(b)) out.balls.push_back(b);
  return out;
}

}  // namespace

TheoremReport verify_main_theorem(const std::vector<VectorField>& corpus, const DomainSpec& spec,
                                  const TheoremOptions& opt) {
  if (corpus.empty()) throw PreconditionError("empty corpus");
  if (!spec.has_boundary()) throw PreconditionError("the estimate concerns domains with boundary");
  const Grid& g = corpus.front().grid;
  const int n = g.ndim;
  const double eps = opt.eps;
  TheoremReport rep;
  rep.eps = eps;
  rep.eps_cap = epsilon_cap(spec);
  rep.eps_compliant = eps < rep.eps_cap;
  rep.dimension_hypothesis = n >= 3;
  if (!rep.dimension_hypothesis) rep.label = "outside theorem hypothesis (n = 2)";
  if (!rep.eps_compliant) {
    if (!rep.label.empty()) rep.label += "; ";
    rep.label += "eps above the localization cap";
  }

  const CenterDistance center_distance{spec, boundary_samples(spec, n == 3 ? 96 : 1024)};
  SeminormContext ctx;
  ctx.spec = spec;
  ctx.region = region_from_spec(spec, g);
  const Grid ref = opt.reference_grid ? *opt.reference_grid : g;
  const Region ref_region = opt.reference_grid ? region_from_spec(spec, ref) : ctx.region;
  rep.balls = opt.balls ? *opt.balls : make_ball_set(ref_region, kInf, opt.policy).balls;
  ctx.balls = snap_ball_set(ctx.region, rep.balls, kInf);
  if (opt.small_balls) {
    rep.small_balls = *opt.small_balls;
  } else {
    const BallSet small = make_ball_set(ref_region, eps, opt.policy);
    for (const Ball& b : small.balls)
      if (center_distance(b.c) < 3.0 * eps) rep.small_balls.push_back(b);
  }
  const BallSet small = snap_ball_set(ctx.region, rep.small_balls, eps);
  const BallSet interior = filter(ctx.balls, [&](const Ball& b) { return center_distance(b.c) - b.r >= 2.0 * eps; });
  ctx.sdf = signed_distance(spec, g);
  ctx.bset = make_boundary_set(spec, g, kInf);
  if (opt.boundary_points) ctx.bset.points = *opt.boundary_points;
  rep.boundary_points = ctx.bset.points;
  BoundarySet beps = make_boundary_set(spec, g, eps);
  beps.points = ctx.bset.points;
  ctx.mu = ctx.nu = kInf;

  const Mask& mask = ctx.region.mask;
  for (const VectorField& f : corpus) {
    if (!(f.grid == g)) throw PreconditionError("corpus fields must share one grid");
    const DecompositionResult dec = project_domain(f, mask, opt.solver);
    const VectorField F = faces_to_nodes(f, mask), F0 = faces_to_nodes(dec.f0, mask),
                      GP = faces_to_nodes(dec.grad_p, mask);
    TheoremFieldReport fr;
    fr.diag = dec.diag;
    fr.solve = dec.solve;
    fr.n_f = vbmo_norm(F, ctx).norm;
    fr.n_f0 = vbmo_norm(F0, ctx).norm;
    fr.n_gp = vbmo_norm(GP, ctx).norm;
    if (!(fr.n_f > 0.0)) throw UndefinedRatioError("zero input norm");
    fr.c_emp = (fr.n_f0 + fr.n_gp) / fr.n_f;
    auto split = [&](const VectorField& X) {
      SplitReport s;
      if (!interior.balls.empty()) s.interior_bmo = bmo_seminorm(X, ctx.region, interior).value;
      if (!small.balls.empty()) s.boundary_bmo = bmo_seminorm(X, ctx.region, small).value;
      if (!beps.radii.empty()) s.b_eps = b_seminorm(X, ctx.sdf, mask, beps).value;
      return s;
    };
    fr.f0 = split(F0);
    fr.gp = split(GP);
    rep.max_c = std::max(rep.max_c, fr.c_emp);
    rep.fields.push_back(fr);
  }
  return rep;
}

}  // namespace vbmo
