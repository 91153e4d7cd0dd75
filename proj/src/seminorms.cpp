#include "vbmo/seminorms.hpp"

#include <algorithm>
#include <set>

namespace vbmo {

bool ball_less(const Ball& a, const Ball& b) {
  for (int i = 0; i < 3; ++i)
    if (a.c[i] != b.c[i]) return a.c[i] < b.c[i];
  return a.r < b.r;
}

namespace {

// Closed ball fits inside the cell extent of the grid on non-periodic axes.
bool inside_extent(const Grid& g, const Vec& c, double r) {
  for (int a = 0; a < g.ndim; ++a) {
    if (g.periodic[a]) continue;
    const double lo = g.origin[a] - 0.5 * g.spacing[a];
    const double hi = g.coord(a, g.shape[a] - 1) + 0.5 * g.spacing[a];
    if (c[a] - r < lo || c[a] + r > hi) return false;
  }
  return true;
}

std::size_t nearest_node(const Grid& g, const Vec& c) {
  std::array<std::size_t, 3> ijk{0, 0, 0};
  for (int a = 0; a < g.ndim; ++a) {
    const long N = static_cast<long>(g.shape[a]);
    long i = std::lround((c[a] - g.origin[a]) / g.spacing[a]);
    if (g.periodic[a])
      i = ((i % N) + N) % N;
    else
      i = std::clamp(i, 0L, N - 1);
    ijk[a] = static_cast<std::size_t>(i);
  }
  return g.index(ijk[0], ijk[1], ijk[2]);
}

}  // namespace

Region region_from_spec(const DomainSpec& spec, const Grid& grid) {
  Region r;
  r.grid = grid;
  r.mask = domain_mask(spec, grid);
  const Grid g = grid;
  if (spec.kind == DomainKind::torus) {
    r.contains = [](const Vec&, double) { return true; };
    double s = 0.0;
    for (int a = 0; a < grid.ndim; ++a) s += 0.25 * grid.length(a) * grid.length(a);
    r.diameter = std::sqrt(s);
    return r;
  }
  const DomainSpec sp = spec;
  r.contains = [sp, g](const Vec& c, double rad) {
    if (!sp.inside(c) || !inside_extent(g, c, rad)) return false;
    if (sp.kind == DomainKind::graph) {
      for (int a = 0; a < sp.ndim; ++a)
        if (c[a] - rad < sp.box_lo[a] || c[a] + rad > sp.box_hi[a]) return false;
    }
    return distance_at(sp, c).d >= rad;
  };
  double s = 0.0;
  for (int a = 0; a < grid.ndim; ++a) s += std::pow(grid.length(a), 2);
  r.diameter = std::min(spec.diameter(), std::sqrt(s));
  return r;
}

Region region_from_mask(const Grid& grid, const Mask& mask) {
  Region r;
  r.grid = grid;
  r.mask = mask;
  const Grid g = grid;
  const Mask m = mask;
  r.contains = [g, m](const Vec& c, double rad) {
    if (!inside_extent(g, c, rad)) return false;
    const BallIndex b = ball_index(g, c, rad);
    bool ok = true;
    for_each_in_ball(g, b, [&](std::size_t i) {
      if (!m[i]) ok = false;
    });
    return ok;
  };
  double s = 0.0;
  for (int a = 0; a < grid.ndim; ++a) s += std::pow(grid.length(a), 2);
  r.diameter = std::sqrt(s);
  return r;
}

double effective_mu(const Region& region, double mu) { return std::isfinite(mu) ? mu : region.diameter; }

std::vector<double> exhaustive_radii(const Grid& g, double mu) {
  const double h = g.max_spacing();
  std::vector<double> d2;
  std::array<long, 3> lim{0, 0, 0};
  for (int a = 0; a < g.ndim; ++a) {
    const double reach = std::isfinite(mu) ? mu : 0.0;
    long l = static_cast<long>(std::ceil(reach / g.spacing[a])) + 1;
    l = std::min<long>(l, static_cast<long>(g.shape[a]));
    lim[a] = l;
  }
  for (long i = 0; i <= lim[0]; ++i)
    for (long j = 0; j <= lim[1]; ++j)
      for (long k = 0; k <= lim[2]; ++k) {
        const double a = i * g.spacing[0], b = j * g.spacing[1], c = g.ndim == 3 ? k * g.spacing[2] : 0.0;
        const double D = a * a + b * b + c * c;
        if (D >= 4.0 * h * h * (1.0 - 1e-12)) d2.push_back(D);
      }
  std::sort(d2.begin(), d2.end());
  std::vector<double> radii;
  double last = -1.0;
  for (double D : d2) {
    if (last >= 0.0 && D <= last * (1.0 + 1e-9)) continue;
    last = D;
    const double r = std::sqrt(D) * (1.0 + 1e-12);
    if (r < mu) radii.push_back(r);
  }
  return radii;
}

BallSet make_ball_set(const Region& region, double mu_in, const BallPolicySpec& policy) {
  const Grid& g = region.grid;
  BallSet set;
  set.mu = mu_in;
  const double mu = effective_mu(region, mu_in);
  const double h = g.max_spacing();
  const double rmin = 2.0 * h * (1.0 - 1e-12);
  if (policy.kind == BallPolicy::exhaustive) {
    const auto radii = exhaustive_radii(g, mu);
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!region.mask[i]) continue;
      const Vec c = g.node(i);
      for (double r : radii) {
        if (!region.contains(c, r)) break;
        set.balls.push_back({c, r});
      }
    }
    return set;
  }
  const double rtop = std::min(mu * (1.0 - 1e-9), 0.5 * region.diameter);
  if (policy.kind == BallPolicy::lattice) {
    for (int l = 0; l < policy.levels; ++l) {
      const double rl = rtop * std::pow(0.5, l);
      if (rl < rmin) break;
      const long k = std::max(1L, std::lround(policy.center_stride * rl / h));
      for (std::size_t i = 0; i < g.size(); ++i) {
        if (!region.mask[i]) continue;
        const auto ijk = g.unravel(i);
        bool on = true;
        for (int a = 0; a < g.ndim; ++a)
          if (static_cast<long>(ijk[a]) % k != 0) on = false;
        if (!on) continue;
        const Vec c = g.node(i);
        for (int t = 0; t < policy.radii_per_level; ++t) {
          const double r = rl * std::pow(2.0, -static_cast<double>(t) / policy.radii_per_level);
          if (r < rmin || !(r < mu)) continue;
          if (region.contains(c, r)) set.balls.push_back({c, r});
        }
      }
    }
  }
  if (rtop >= rmin) {
    Rng rng(policy.seed);
    std::vector<std::size_t> nodes;
    for (std::size_t i = 0; i < g.size(); ++i)
      if (region.mask[i]) nodes.push_back(i);
    if (!nodes.empty()) {
      for (int s = 0; s < policy.random_count; ++s) {
        const Vec c = g.node(nodes[rng.index(nodes.size())]);
        const double r = std::exp(rng.uniform(std::log(2.0 * h), std::log(rtop)));
        if (r >= rmin && r < mu && region.contains(c, r)) set.balls.push_back({c, r});
      }
    }
  }
  return set;
}

BallSet snap_ball_set(const Region& region, const std::vector<Ball>& balls, double mu_in) {
  BallSet set;
  set.mu = mu_in;
  const double mu = effective_mu(region, mu_in);
  const double rmin = 2.0 * region.grid.max_spacing() * (1.0 - 1e-12);
  for (const Ball& b : balls) {
    const std::size_t i = nearest_node(region.grid, b.c);
    if (!region.mask[i]) continue;
    const Vec c = region.grid.node(i);
    if (b.r >= rmin && b.r < mu && region.contains(c, b.r)) set.balls.push_back({c, b.r});
  }
  return set;
}

SupResult bmo_seminorm(const Region& region, const std::vector<const double*>& comps, const BallSet& set, Exec exec) {
  if (set.balls.empty()) throw PreconditionError("empty ball set");
  const std::size_t nb = set.balls.size();
  std::vector<double> val(nb, -1.0);
  const Mask* mask = &region.mask;
#pragma omp parallel for schedule(dynamic, 8) if (exec == Exec::omp)
  for (std::size_t b = 0; b < nb; ++b) {
    double osc = 0.0;
    if (ball_oscillation(region.grid, comps, mask, set.balls[b].c, set.balls[b].r, osc)) val[b] = osc;
  }
  SupResult out;
  for (std::size_t b = 0; b < nb; ++b) {
    if (val[b] < 0.0) continue;
    if (!out.found || val[b] > out.value || (val[b] == out.value && ball_less(set.balls[b], out.ball))) {
      out.value = val[b];
      out.ball = set.balls[b];
      out.found = true;
    }
  }
  return out;
}

SupResult bmo_seminorm(const ScalarField& u, const Region& region, const BallSet& balls, Exec exec) {
  return bmo_seminorm(region, {u.v.data()}, balls, exec);
}

SupResult bmo_seminorm(const VectorField& f, const Region& region, const BallSet& balls, Exec exec) {
  std::vector<const double*> c;
  for (const auto& comp : f.c) c.push_back(comp.data());
  return bmo_seminorm(region, c, balls, exec);
}

namespace {

double brute_force(const Grid& g, const std::vector<const std::vector<double>*>& comps, const Region& region,
                   double mu_in) {
  if (g.size() > kBruteForceCap) throw SizeCapError("brute-force BMO limited to 4096 nodes");
  const double mu = effective_mu(region, mu_in);
  const auto radii = exhaustive_radii(g, mu);
  const std::size_t N = g.size(), nc = comps.size();
  double best = 0.0;
  std::vector<std::size_t> members;
  for (std::size_t ci = 0; ci < N; ++ci) {
    if (!region.mask[ci]) continue;
    const Vec c = g.node(ci);
    for (double r : radii) {
      if (!region.contains(c, r)) break;
      members.clear();
      for (std::size_t j = 0; j < N; ++j) {
        const Vec x = g.node(j);
        double d2 = 0.0;
        for (int a = 0; a < 3; ++a) {
          const double d = a < g.ndim ? axis_displacement(g, a, x[a], c[a]) : 0.0;
          d2 += d * d;
        }
        if (d2 <= r * r && region.mask[j]) members.push_back(j);
      }
      if (members.empty()) continue;
      std::array<double, 3> mean{0, 0, 0};
      for (std::size_t j : members)
        for (std::size_t k = 0; k < nc; ++k) mean[k] += (*comps[k])[j];
      for (std::size_t k = 0; k < nc; ++k) mean[k] /= static_cast<double>(members.size());
      double acc = 0.0;
      for (std::size_t j : members) {
        if (nc == 1) {
          acc += std::fabs((*comps[0])[j] - mean[0]);
        } else {
          double s = 0.0;
          for (std::size_t k = 0; k < nc; ++k) {
            const double d = (*comps[k])[j] - mean[k];
            s += d * d;
          }
          acc += std::sqrt(s);
        }
      }
      best = std::max(best, acc / static_cast<double>(members.size()));
    }
  }
  return best;
}

}  // namespace

double brute_force_bmo(const ScalarField& u, const Region& region, double mu) {
  return brute_force(u.grid, {&u.v}, region, mu);
}

double brute_force_bmo(const VectorField& f, const Region& region, double mu) {
  std::vector<const std::vector<double>*> c;
  for (const auto& comp : f.c) c.push_back(&comp);
  return brute_force(f.grid, c, region, mu);
}

BoundarySet make_boundary_set(const DomainSpec& spec, const Grid& grid, double nu, int per_axis) {
  BoundarySet s;
  s.nu = nu;
  if (!spec.has_boundary()) return s;
  for (const auto& b : boundary_samples(spec, per_axis)) s.points.push_back(b.x);
  double ext = 0.0;
  for (int a = 0; a < grid.ndim; ++a) ext = std::max(ext, grid.length(a));
  const double top = std::min({nu, spec.band, 0.5 * ext});
  const double rmin = 2.0 * grid.max_spacing();
  for (int k = 0; k < 8; ++k) {
    const double r = top * (1.0 - 1e-9) * std::pow(2.0, -0.5 * k);
    if (r < rmin) break;
    s.radii.push_back(r);
  }
  return s;
}

double b_integral(const VectorField& f, const SignedDistanceField& sdf, const Mask& mask, const Vec& x, double r) {
  const Grid& g = f.grid;
  const BallIndex b = ball_index(g, x, r);
  double acc = 0.0;
  for_each_in_ball(g, b, [&](std::size_t i) {
    if (!mask[i]) return;
    double s = 0.0;
    for (int a = 0; a < g.ndim; ++a) s += sdf.grad.c[a][i] * f.c[a][i];
    acc += std::fabs(s);
  });
  return acc * g.cell_volume() / std::pow(r, g.ndim);
}

namespace {

template <class Eval>
BSupResult b_sup(const BoundarySet& set, Exec exec, Eval&& eval) {
  const std::size_t np = set.points.size(), nr = set.radii.size();
  std::vector<double> val(np * nr, 0.0);
#pragma omp parallel for schedule(dynamic, 4) if (exec == Exec::omp)
  for (std::size_t k = 0; k < np * nr; ++k) val[k] = eval(set.points[k / nr], set.radii[k % nr]);
  BSupResult out;
  for (std::size_t k = 0; k < np * nr; ++k) {
    const Ball cand{set.points[k / nr], set.radii[k % nr]};
    if (!out.found || val[k] > out.value ||
        (val[k] == out.value && ball_less(cand, Ball{out.point, out.radius}))) {
      out.value = val[k];
      out.point = cand.c;
      out.radius = cand.r;
      out.found = true;
    }
  }
  return out;
}

}  // namespace

BSupResult b_seminorm(const VectorField& f, const SignedDistanceField& sdf, const Mask& mask, const BoundarySet& set,
                      Exec exec) {
  return b_sup(set, exec, [&](const Vec& x, double r) { return b_integral(f, sdf, mask, x, r); });
}

BSupResult b_seminorm_scalar(const ScalarField& gfield, const Mask& mask, const BoundarySet& set, Exec exec) {
  const Grid& g = gfield.grid;
  return b_sup(set, exec, [&](const Vec& x, double r) {
    const BallIndex b = ball_index(g, x, r);
    double acc = 0.0;
    for_each_in_ball(g, b, [&](std::size_t i) {
      if (mask[i]) acc += std::fabs(gfield.v[i]);
    });
    return acc * g.cell_volume() / std::pow(r, g.ndim);
  });
}

SeminormContext make_context(const DomainSpec& spec, const Grid& grid, double mu, double nu,
                             const BallPolicySpec& policy) {
  SeminormContext ctx;
  ctx.spec = spec;
  ctx.mu = mu;
  ctx.nu = nu;
  ctx.region = region_from_spec(spec, grid);
  ctx.balls = make_ball_set(ctx.region, mu, policy);
  if (spec.has_boundary()) {
    ctx.sdf = signed_distance(spec, grid);
    ctx.bset = make_boundary_set(spec, grid, nu);
  }
  return ctx;
}

SeminormReport vbmo_norm(const VectorField& f, const SeminormContext& ctx, Exec exec) {
  SeminormReport r;
  r.mu = ctx.mu;
  r.nu = ctx.nu;
  const SupResult s = bmo_seminorm(f, ctx.region, ctx.balls, exec);
  r.bmo = s.value;
  r.bmo_ball = s.ball;
  if (ctx.spec.has_boundary() && !ctx.bset.points.empty() && !ctx.bset.radii.empty()) {
    const BSupResult b = b_seminorm(f, ctx.sdf, ctx.region.mask, ctx.bset, exec);
    r.b = b.value;
    r.b_point = b.point;
    r.b_radius = b.radius;
  }
  r.l2 = lp_norm(f, 2.0, &ctx.region.mask);
  r.vbmo = r.bmo + r.b;
  r.norm = r.vbmo + r.l2;
  if (std::isfinite(ctx.mu) || std::isfinite(ctx.nu))
    r.remark = "finite mu/nu: the norm is equivalent to mu = nu = infinity on vBMO intersected with L2";
  return r;
}

double bmol_norm(const ScalarField& u, double r, const SeminormContext& ctx) {
  return bmo_seminorm(u, ctx.region, ctx.balls).value + lp_norm(u, r, &ctx.region.mask);
}

double interpolation_constant(const ScalarField& u, double r, double q, const SeminormContext& ctx) {
  if (!(r >= 1.0 && q >= r && std::isfinite(q))) throw PreconditionError("interpolation needs 1 <= r <= q < inf");
  const double den = q * bmol_norm(u, r, ctx);
  if (!(den > 0.0)) throw UndefinedRatioError("zero BMOL norm");
  return lp_norm(u, q, &ctx.region.mask) / den;
}

double holder_norm(const ScalarField& phi, double gamma, const Mask& mask, int pairs, std::uint64_t seed) {
  const Grid& g = phi.grid;
  std::vector<std::size_t> nodes;
  double sup = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!mask[i]) continue;
    nodes.push_back(i);
    sup = std::max(sup, std::fabs(phi.v[i]));
  }
  double q = 0.0;
  auto visit = [&](std::size_t i, std::size_t j) {
    if (i == j) return;
    double d2 = 0.0;
    const Vec xi = g.node(i), xj = g.node(j);
    for (int a = 0; a < g.ndim; ++a) d2 += std::pow(axis_displacement(g, a, xi[a], xj[a]), 2);
    if (d2 > 0.0) q = std::max(q, std::fabs(phi.v[i] - phi.v[j]) / std::pow(d2, 0.5 * gamma));
  };
  for (std::size_t i : nodes) {
    const auto ijk = g.unravel(i);
    for (int a = 0; a < g.ndim; ++a) {
      if (ijk[a] + 1 >= g.shape[a]) continue;
      const std::size_t j = i + g.stride(a);
      if (mask[j]) visit(i, j);
    }
  }
  Rng rng(seed);
  if (!nodes.empty())
    for (int p = 0; p < pairs; ++p) visit(nodes[rng.index(nodes.size())], nodes[rng.index(nodes.size())]);
  return sup + q;
}

double multiplication_audit(const ScalarField& phi, const ScalarField& v, double r, double gamma,
                            const SeminormContext& ctx) {
  ScalarField prod(v.grid);
  for (std::size_t i = 0; i < prod.v.size(); ++i) prod.v[i] = phi.v[i] * v.v[i];
  const double den = holder_norm(phi, gamma, ctx.region.mask) * bmol_norm(v, r, ctx);
  if (!(den > 0.0)) throw UndefinedRatioError("zero denominator in the multiplication audit");
  return bmol_norm(prod, r, ctx) / den;
}

double w1n_embedding_audit(const ScalarField& g, const SeminormContext& ctx) {
  const VectorField grad = gradient(g, Scheme::central);
  const double den = lp_norm(grad, static_cast<double>(g.grid.ndim), &ctx.region.mask);
  if (!(den > 0.0)) throw UndefinedRatioError("constant field has no gradient");
  return bmo_seminorm(g, ctx.region, ctx.balls).value / den;
}

}  // namespace vbmo
