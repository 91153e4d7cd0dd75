#include <algorithm>

#include "vbmo/helmholtz.hpp"

namespace vbmo {

namespace {

struct Rule {
  std::vector<double> x, w;
};

// Gauss-Legendre nodes on [-1, 1] by Newton on P_n.
Rule gauss_legendre(int n) {
  Rule r;
  r.x.resize(static_cast<std::size_t>(n));
  r.w.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-16) {
        r.w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
        break;
      }
      r.w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    r.x[static_cast<std::size_t>(i)] = x;
  }
  return r;
}

const Rule& gl16() {
  static const Rule r = gauss_legendre(16);
  return r;
}

double bump_profile(double t) { return t < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - t * t)) : 0.0; }

// Normalising constant so that c R^-n b(|z - x0| / R) has unit mass.
double bump_mass(int n) {
  const Rule& r = gl16();
  double s = 0.0;
  const int panels = 64;
  for (int p = 0; p < panels; ++p) {
    const double a = static_cast<double>(p) / panels, b = static_cast<double>(p + 1) / panels;
    for (std::size_t k = 0; k < r.x.size(); ++k) {
      const double t = 0.5 * (a + b) + 0.5 * (b - a) * r.x[k];
      s += 0.5 * (b - a) * r.w[k] * bump_profile(t) * std::pow(t, n - 1);
    }
  }
  const double sphere = n == 2 ? 2.0 * kPi : 4.0 * kPi;
  return sphere * s;
}

}  // namespace

StarDomain star_ball(const Grid& g, const Vec& center, double radius, double core) {
  StarDomain d;
  d.grid = g;
  d.mask.assign(g.size(), 0);
  const int n = g.ndim;
  auto inside = [center, radius, n](const Vec& x) {
    double s = 0.0;
    for (int a = 0; a < n; ++a) s += (x[a] - center[a]) * (x[a] - center[a]);
    return s < radius * radius;
  };
  for (std::size_t i = 0; i < g.size(); ++i) d.mask[i] = inside(g.node(i)) ? 1 : 0;
  d.inside = inside;
  d.x0 = center;
  d.R = core;
  d.diameter = 2.0 * radius;
  return d;
}

bool star_like(const StarDomain& d, int rays, std::uint64_t seed) {
  const int n = d.grid.ndim;
  Rng rng(seed);
  const int steps = 800;
  const double step = 1.25 * d.diameter / steps;
  for (int r = 0; r < rays; ++r) {
    const Vec c = d.x0 + (0.999 * d.R) * random_in_ball(rng, n);
    const Vec e = random_direction(rng, n);
    bool prev = d.inside(c);
    if (!prev) return false;
    int transitions = 0;
    for (int k = 1; k <= steps; ++k) {
      const bool cur = d.inside(c + (k * step) * e);
      if (cur != prev) ++transitions;
      prev = cur;
    }
    if (transitions != 1) return false;
  }
  return true;
}

double bogovskii_shape_bound(int n, double delta, double R) {
  const double t = delta / R;
  return std::pow(t, n) * (1.0 + t);
}

BogovskiiResult bogovskii(const ScalarField& g, const StarDomain& d, const BogovskiiOptions& opt) {
  const Grid& grid = g.grid;
  if (!(grid == d.grid)) throw PreconditionError("data and domain grids differ");
  if (!(d.R > 0.0)) throw PreconditionError("core radius must be positive");
  require_finite(g);
  const int n = grid.ndim;
  const double vol = grid.cell_volume();
  std::vector<std::size_t> targets, sources;
  double integral = 0.0, l1 = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!d.mask[i]) continue;
    targets.push_back(i);
    if (g.v[i] != 0.0) sources.push_back(i);
    integral += g.v[i] * vol;
    l1 += std::fabs(g.v[i]) * vol;
  }
  if (std::fabs(integral) > opt.mean_tol * l1) throw PreconditionError("data must have zero mean on the domain");
  if (opt.check_star && !star_like(d, opt.star_rays)) throw PreconditionError("domain is not star-like w.r.t. the core");

  const Rule& rule = gl16();
  const double c_omega = 1.0 / (bump_mass(n) * std::pow(d.R, n));
  const double R2 = d.R * d.R;
  BogovskiiResult res;
  res.u = VectorField(grid);
  std::vector<Vec> ys(sources.size());
  std::vector<double> gs(sources.size());
  for (std::size_t s = 0; s < sources.size(); ++s) {
    ys[s] = grid.node(sources[s]);
    gs[s] = g.v[sources[s]] * vol;
  }
  const std::size_t nt = targets.size();
#pragma omp parallel for schedule(dynamic, 16) if (opt.exec == Exec::omp)
  for (std::size_t t = 0; t < nt; ++t) {
    const Vec x = grid.node(targets[t]);
    Vec acc{0, 0, 0};
    for (std::size_t s = 0; s < ys.size(); ++s) {
      const Vec dxy = x - ys[s];
      const double r = norm(dxy);
      if (r == 0.0) continue;
      const Vec e = (1.0 / r) * dxy;
      const Vec w = ys[s] - d.x0;
      const double ew = dot(e, w);
      const double disc = ew * ew - (dot(w, w) - R2);
      if (disc <= 0.0) continue;
      const double sq = std::sqrt(disc);
      const double lo = std::max(-ew - sq, r), hi = -ew + sq;
      if (lo >= hi) continue;
      double J = 0.0;
      for (std::size_t k = 0; k < rule.x.size(); ++k) {
        const double sk = 0.5 * (lo + hi) + 0.5 * (hi - lo) * rule.x[k];
        const Vec z = ys[s] + sk * e;
        const double tz = norm(z - d.x0) / d.R;
        J += rule.w[k] * bump_profile(tz) * std::pow(sk, n - 1);
      }
      J *= 0.5 * (hi - lo) * c_omega;
      const double coef = gs[s] * J / std::pow(r, n);
      acc = acc + coef * dxy;
    }
    for (int a = 0; a < n; ++a) res.u.c[static_cast<std::size_t>(a)][targets[t]] = acc[a];
  }

  // Audits: central-difference divergence, flux balance, W^{1,q} ratio.
  ScalarField div(grid);
  std::vector<ScalarField> grads;
  for (int a = 0; a < n; ++a) {
    ScalarField comp(grid);
    comp.v = res.u.c[static_cast<std::size_t>(a)];
    const ScalarField da = partial(comp, a, Scheme::central);
    for (std::size_t i = 0; i < grid.size(); ++i) div.v[i] += da.v[i];
    for (int b = 0; b < n; ++b) grads.push_back(partial(comp, b, Scheme::central));
  }
  // The residual is read where the whole central stencil lies in D; across
  // the edge u is cut to zero and the stencil sees that cut, not div u.
  ScalarField defect(grid);
  Mask core_nodes(grid.size(), 0);
  double div_int = 0.0;
  for (std::size_t i : targets) {
    div_int += div.v[i] * vol;
    const auto c = grid.unravel(i);
    bool full = true;
    for (int a = 0; a < n && full; ++a) {
      const auto ua = static_cast<std::size_t>(a);
      const std::size_t st = grid.stride(a);
      full = c[ua] > 0 && c[ua] + 1 < grid.shape[ua] && d.mask[i - st] && d.mask[i + st];
    }
    if (!full) continue;
    core_nodes[i] = 1;
    defect.v[i] = div.v[i] - g.v[i];
  }
  const double gl2 = lp_norm(g, 2.0, &core_nodes);
  res.div_residual = gl2 > 0.0 ? lp_norm(defect, 2.0, &core_nodes) / gl2 : 0.0;
  res.flux = div_int - integral;
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (!d.mask[i])
      for (int a = 0; a < n; ++a) res.trace_max = std::max(res.trace_max, std::fabs(res.u.c[static_cast<std::size_t>(a)][i]));
  VectorField G(grid, n * n);
  for (int k = 0; k < n * n; ++k) G.c[static_cast<std::size_t>(k)] = grads[static_cast<std::size_t>(k)].v;
  const double gq = lp_norm(g, opt.q, &d.mask);
  res.ratio = gq > 0.0 ? (lp_norm(res.u, opt.q, &d.mask) + lp_norm(G, opt.q, &d.mask)) / gq : 0.0;
  return res;
}

}  // namespace vbmo
