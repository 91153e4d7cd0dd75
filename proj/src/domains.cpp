#include "vbmo/domains.hpp"

#include <algorithm>

#include "vbmo/profiles.hpp"

namespace vbmo {

namespace {

double sqr(double x) { return x * x; }

double norm_m(const Vec& y, int m) {
  double s = 0.0;
  for (int i = 0; i < m; ++i) s += y[i] * y[i];
  return std::sqrt(s);
}

// Hessian of y -> F(|y - c|) given F'(s)/s and F''(s); u is the unit direction.
Mat radial_hessian(double fp_over_s, double fpp, const Vec& u, int m) {
  Mat H{};
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      H[i][j] = fpp * u[i] * u[j] + fp_over_s * ((i == j ? 1.0 : 0.0) - u[i] * u[j]);
  return H;
}

// b(t) = exp(1 - 1/(1 - t^2)) with b, b', b'' and b'(t)/t.
struct BumpJet {
  double b = 0.0, db = 0.0, d2b = 0.0, db_over_t = 0.0;
};

BumpJet bump_jet(double t) {
  BumpJet j;
  if (t >= 1.0) return j;
  const double q = 1.0 - t * t;
  if (1.0 / q > 700.0) return j;
  j.b = std::exp(1.0 - 1.0 / q);
  const double e1 = -2.0 * t / (q * q);
  const double e2 = -2.0 / (q * q) - 8.0 * t * t / (q * q * q);
  j.db = j.b * e1;
  j.d2b = j.b * (e1 * e1 + e2);
  j.db_over_t = j.b * (-2.0 / (q * q));
  return j;
}

}  // namespace

// ---- graphs ----------------------------------------------------------------

double RadialSumGraph::h(const Vec& y) const {
  double v = offset_;
  for (int i = 0; i < m_; ++i) v += slope_[i] * y[i];
  for (const auto& b : bumps_) {
    Vec d = y - b.center;
    v += b.amplitude * bump_jet(norm_m(d, m_) / b.width).b;
  }
  return v;
}

Vec RadialSumGraph::grad(const Vec& y) const {
  Vec g{0, 0, 0};
  for (int i = 0; i < m_; ++i) g[i] = slope_[i];
  for (const auto& b : bumps_) {
    const Vec d = y - b.center;
    const double s = norm_m(d, m_);
    const BumpJet j = bump_jet(s / b.width);
    // F'(s) u = a b'(t)/t / w^2 * (y - c)
    const double c = b.amplitude * j.db_over_t / (b.width * b.width);
    for (int i = 0; i < m_; ++i) g[i] += c * d[i];
  }
  return g;
}

Mat RadialSumGraph::hess(const Vec& y) const {
  Mat H{};
  for (const auto& b : bumps_) {
    const Vec d = y - b.center;
    const double s = norm_m(d, m_);
    const double t = s / b.width;
    if (t >= 1.0) continue;
    const BumpJet j = bump_jet(t);
    Vec u{0, 0, 0};
    if (s > 0.0) {
      for (int i = 0; i < m_; ++i) u[i] = d[i] / s;
    } else {
      u[0] = 1.0;
    }
    const double w2 = b.width * b.width;
    const Mat Hb = radial_hessian(b.amplitude * j.db_over_t / w2, b.amplitude * j.d2b / w2, u, m_);
    for (int i = 0; i < m_; ++i)
      for (int k = 0; k < m_; ++k) H[i][k] += Hb[i][k];
  }
  return H;
}

double RadialSumGraph::support() const {
  if (offset_ != 0.0 || norm_m(slope_, m_) != 0.0) return kInf;
  double r = 0.0;
  for (const auto& b : bumps_) r = std::max(r, norm_m(b.center, m_) + b.width);
  return r;
}

std::shared_ptr<RadialSumGraph> RadialSumGraph::normalized() const {
  auto g = std::make_shared<RadialSumGraph>(*this);
  const Vec zero{0, 0, 0};
  const double h0 = h(zero);
  const Vec g0 = grad(zero);
  g->offset_ -= h0;
  for (int i = 0; i < m_; ++i) g->slope_[i] -= g0[i];
  return g;
}

double SphereCapGraph::h(const Vec& y) const {
  const double s2 = sqr(norm_m(y, m_));
  if (s2 >= R_ * R_) throw OutsideChartError("point outside the sphere cap chart");
  return R_ - std::sqrt(R_ * R_ - s2);
}

Vec SphereCapGraph::grad(const Vec& y) const {
  const double s2 = sqr(norm_m(y, m_));
  if (s2 >= R_ * R_) throw OutsideChartError("point outside the sphere cap chart");
  const double S = std::sqrt(R_ * R_ - s2);
  Vec g{0, 0, 0};
  for (int i = 0; i < m_; ++i) g[i] = y[i] / S;
  return g;
}

Mat SphereCapGraph::hess(const Vec& y) const {
  const double s2 = sqr(norm_m(y, m_));
  if (s2 >= R_ * R_) throw OutsideChartError("point outside the sphere cap chart");
  const double S = std::sqrt(R_ * R_ - s2);
  Mat H{};
  for (int i = 0; i < m_; ++i)
    for (int j = 0; j < m_; ++j) H[i][j] = (i == j ? 1.0 / S : 0.0) + y[i] * y[j] / (S * S * S);
  return H;
}

namespace {

struct TaperJet {
  double v = 0.0;
  Vec g{0, 0, 0};
  Mat H{};
};

TaperJet taper(const Vec& y, double rho, int m) {
  TaperJet t;
  const double r = norm_m(y, m);
  const double s = r / rho;
  const Jet3 j = bump(Profile::theta, s);
  t.v = j.v;
  if (s <= plateau_radius(Profile::theta) || s >= support_radius(Profile::theta)) return t;
  Vec u{0, 0, 0};
  for (int i = 0; i < m; ++i) u[i] = y[i] / r;
  for (int i = 0; i < m; ++i) t.g[i] = j.d1 / rho * u[i];
  t.H = radial_hessian(j.d1 / (rho * r), j.d2 / (rho * rho), u, m);
  return t;
}

}  // namespace

double TaperedGraph::h(const Vec& y) const {
  const TaperJet t = taper(y, rho_, dim());
  return t.v == 0.0 ? 0.0 : t.v * base_->h(y);
}

Vec TaperedGraph::grad(const Vec& y) const {
  const int m = dim();
  const TaperJet t = taper(y, rho_, m);
  if (t.v == 0.0) return {0, 0, 0};
  const double hv = base_->h(y);
  const Vec gh = base_->grad(y);
  Vec g{0, 0, 0};
  for (int i = 0; i < m; ++i) g[i] = t.v * gh[i] + hv * t.g[i];
  return g;
}

Mat TaperedGraph::hess(const Vec& y) const {
  const int m = dim();
  const TaperJet t = taper(y, rho_, m);
  if (t.v == 0.0) return Mat{};
  const double hv = base_->h(y);
  const Vec gh = base_->grad(y);
  const Mat Hh = base_->hess(y);
  Mat H{};
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      H[i][j] = t.v * Hh[i][j] + t.g[i] * gh[j] + gh[i] * t.g[j] + hv * t.H[i][j];
  return H;
}

ImplicitChartGraph::Local ImplicitChartGraph::solve(const Vec& y) const {
  const int m = n_ - 1;
  double t = 0.0;
  for (int it = 0; it < 60; ++it) {
    Vec xl{0, 0, 0};
    for (int i = 0; i < m; ++i) xl[i] = y[i];
    xl[m] = t;
    const Vec p = z0_ + matvec(rot_, xl);
    const double G = p[m] - H_->h(p);
    const Vec gH = H_->grad(p);
    double Gt = rot_[m][m];
    for (int k = 0; k < m; ++k) Gt -= gH[k] * rot_[k][m];
    if (!(Gt > 1e-12)) throw OutsideChartError("chart normal degenerates");
    const double dt = G / Gt;
    t -= dt;
    if (std::fabs(dt) <= 1e-15 * (1.0 + std::fabs(t))) {
      xl[m] = t;
      return {t, z0_ + matvec(rot_, xl)};
    }
  }
  throw OutsideChartError("implicit chart evaluation did not converge");
}

double ImplicitChartGraph::h(const Vec& y) const { return solve(y).t; }

Vec ImplicitChartGraph::grad(const Vec& y) const {
  const int m = n_ - 1;
  const Local L = solve(y);
  const Vec gH = H_->grad(L.p);
  auto Gcol = [&](int a) {
    double v = rot_[m][a];
    for (int k = 0; k < m; ++k) v -= gH[k] * rot_[k][a];
    return v;
  };
  const double Gt = Gcol(m);
  Vec g{0, 0, 0};
  for (int i = 0; i < m; ++i) g[i] = -Gcol(i) / Gt;
  return g;
}

Mat ImplicitChartGraph::hess(const Vec& y) const {
  const int m = n_ - 1;
  const Local L = solve(y);
  const Vec gH = H_->grad(L.p);
  const Mat HH = H_->hess(L.p);
  auto G1 = [&](int a) {
    double v = rot_[m][a];
    for (int k = 0; k < m; ++k) v -= gH[k] * rot_[k][a];
    return v;
  };
  auto G2 = [&](int a, int b) {
    double v = 0.0;
    for (int k = 0; k < m; ++k)
      for (int l = 0; l < m; ++l) v -= HH[k][l] * rot_[k][a] * rot_[l][b];
    return v;
  };
  const double Gt = G1(m);
  Vec hg{0, 0, 0};
  for (int i = 0; i < m; ++i) hg[i] = -G1(i) / Gt;
  Mat H{};
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      H[i][j] = -(G2(i, j) + G2(i, m) * hg[j] + G2(j, m) * hg[i] + G2(m, m) * hg[i] * hg[j]) / Gt;
  return H;
}

// ---- domain specs ------------------------------------------------------------

GraphBounds graph_bounds(const GraphFn& h, double r, int per_axis) {
  const int m = h.dim();
  if (!std::isfinite(r)) throw PreconditionError("graph bounds need a finite radius");
  GraphBounds b;
  auto visit = [&](const Vec& y) {
    b.sup_h = std::max(b.sup_h, std::fabs(h.h(y)));
    b.sup_grad = std::max(b.sup_grad, norm_m(h.grad(y), m));
    b.sup_hess = std::max(b.sup_hess, operator_norm(h.hess(y), m));
  };
  if (r <= 0.0) {
    visit({0, 0, 0});
    return b;
  }
  if (per_axis <= 0) per_axis = m == 1 ? 801 : 121;
  for (int i = 0; i < per_axis; ++i) {
    const double a = -r + 2.0 * r * i / (per_axis - 1);
    if (m == 1) {
      visit({a, 0, 0});
      continue;
    }
    for (int j = 0; j < per_axis; ++j) {
      const double c = -r + 2.0 * r * j / (per_axis - 1);
      if (a * a + c * c <= r * r) visit({a, c, 0});
    }
  }
  return b;
}

double DomainSpec::diameter() const {
  if (kind == DomainKind::ball) return 2.0 * radius;
  double s = 0.0;
  for (int a = 0; a < ndim; ++a) s += sqr(box_hi[a] - box_lo[a]);
  return kind == DomainKind::torus ? 0.5 * std::sqrt(s) : std::sqrt(s);
}

bool DomainSpec::inside(const Vec& x) const {
  const int m = ndim - 1;
  switch (kind) {
    case DomainKind::torus: return true;
    case DomainKind::half_space: return x[m] > 0.0;
    case DomainKind::ball: return norm(x - center) < radius;
    case DomainKind::perturbed_half_space: return x[m] > graph->h(x);
    case DomainKind::graph:
      for (int a = 0; a < ndim; ++a)
        if (x[a] < box_lo[a] || x[a] > box_hi[a]) return false;
      return x[m] > graph->h(x);
  }
  return false;
}

std::string kind_name(DomainKind k) {
  switch (k) {
    case DomainKind::torus: return "torus";
    case DomainKind::half_space: return "half_space";
    case DomainKind::perturbed_half_space: return "perturbed_half_space";
    case DomainKind::ball: return "ball";
    case DomainKind::graph: return "graph";
  }
  return "unknown";
}

DomainSpec DomainSpec::torus(int ndim, double length) {
  DomainSpec s;
  s.kind = DomainKind::torus;
  s.ndim = ndim;
  s.box_lo = {0, 0, 0};
  s.box_hi = {length, length, ndim == 3 ? length : 0.0};
  s.band = 0.0;
  return s;
}

DomainSpec DomainSpec::half_space(int ndim, const Vec& lo, const Vec& hi) {
  DomainSpec s;
  s.kind = DomainKind::half_space;
  s.ndim = ndim;
  s.box_lo = lo;
  s.box_hi = hi;
  s.band = s.diameter();
  s.reach = kInf;
  return s;
}

DomainSpec DomainSpec::perturbed_half_space(int ndim, GraphPtr h, double R_h, const Vec& lo, const Vec& hi) {
  DomainSpec s;
  s.kind = DomainKind::perturbed_half_space;
  s.ndim = ndim;
  s.graph = std::move(h);
  s.support_radius = R_h;
  s.box_lo = lo;
  s.box_hi = hi;
  const GraphBounds b = graph_bounds(*s.graph, std::max(R_h, 0.0));
  s.K = b.sup_hess;
  s.band = std::min(s.diameter(), 0.5 / std::max(b.sup_hess, 1e-12));
  s.reach = s.band;
  return s;
}

DomainSpec DomainSpec::ball(int ndim, const Vec& center, double radius) {
  DomainSpec s;
  s.kind = DomainKind::ball;
  s.ndim = ndim;
  s.center = center;
  s.radius = radius;
  for (int a = 0; a < 3; ++a) {
    s.box_lo[a] = a < ndim ? center[a] - 1.25 * radius : 0.0;
    s.box_hi[a] = a < ndim ? center[a] + 1.25 * radius : 0.0;
  }
  s.alpha = 0.5 * radius;
  const GraphBounds b = graph_bounds(SphereCapGraph(ndim - 1, radius), s.alpha);
  s.K = std::max({b.sup_h, b.sup_grad, b.sup_hess});
  s.beta = 0.9 * std::min(s.alpha, 2.0 / (ndim * s.K));
  s.reach = radius;
  s.band = radius;
  return s;
}

DomainSpec DomainSpec::graph_domain(int ndim, GraphPtr H, double alpha, double beta, double K, const Vec& lo,
                                    const Vec& hi) {
  DomainSpec s;
  s.kind = DomainKind::graph;
  s.ndim = ndim;
  s.graph = std::move(H);
  s.alpha = alpha;
  s.beta = beta;
  s.K = K;
  s.box_lo = lo;
  s.box_hi = hi;
  s.band = std::min(beta, 0.5 / std::max(K, 1e-12));
  s.reach = s.band;
  return s;
}

Mask domain_mask(const DomainSpec& spec, const Grid& grid) {
  Mask m(grid.size(), 1);
  if (spec.kind == DomainKind::torus) return m;
  for (std::size_t i = 0; i < grid.size(); ++i) m[i] = spec.inside(grid.node(i)) ? 1 : 0;
  return m;
}

// ---- distance and projection -------------------------------------------------

Vec graph_projection(const GraphFn& g, int ndim, const Vec& x) {
  const int m = ndim - 1;
  Vec s{0, 0, 0};
  for (int i = 0; i < m; ++i) s[i] = x[i];
  const double W = std::fabs(x[m] - g.h(x));
  auto energy = [&](const Vec& y) {
    double e = 0.0;
    for (int i = 0; i < m; ++i) e += sqr(x[i] - y[i]);
    return 0.5 * (e + sqr(x[m] - g.h(y)));
  };
  if (W > 0.0) {
    // Any foot point lies within the vertical distance of x'.
    double best = energy(s);
    Vec arg = s;
    const int k = m == 1 ? 33 : 17;
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < (m == 1 ? 1 : k); ++j) {
        Vec y = s;
        y[0] = x[0] + W * (-1.0 + 2.0 * i / (k - 1));
        if (m == 2) y[1] = x[1] + W * (-1.0 + 2.0 * j / (k - 1));
        const double e = energy(y);
        if (e < best) {
          best = e;
          arg = y;
        }
      }
    }
    s = arg;
    // Stationarity residual; unlike the energy it does not lose digits to
    // cancellation once the step is far below the distance.
    auto residual = [&](const Vec& y) {
      const double r = x[m] - g.h(y);
      const Vec gr = g.grad(y);
      double f = 0.0;
      for (int i = 0; i < m; ++i) f += sqr(y[i] - x[i] - r * gr[i]);
      return f;
    };
    for (int it = 0; it < 50; ++it) {
      const double r = x[m] - g.h(s);
      const Vec gr = g.grad(s);
      const Mat H = g.hess(s);
      Vec F{0, 0, 0};
      Mat J{};
      for (int i = 0; i < m; ++i) {
        F[i] = s[i] - x[i] - r * gr[i];
        for (int j = 0; j < m; ++j) J[i][j] = (i == j ? 1.0 : 0.0) + gr[i] * gr[j] - r * H[i][j];
      }
      const double f0 = residual(s);
      if (f0 == 0.0) break;
      Vec step{0, 0, 0};
      bool newton = true;
      try {
        step = matvec(inverse(J, m), F);
      } catch (const PreconditionError&) {
        newton = false;
      }
      const double e0 = energy(s);
      if (!newton) step = F;
      double lam = 1.0;
      Vec trial = s;
      for (int ls = 0; ls < 30; ++ls) {
        for (int i = 0; i < m; ++i) trial[i] = s[i] - lam * step[i];
        if (energy(trial) <= e0 || residual(trial) < f0) break;
        lam *= 0.5;
      }
      double move = 0.0;
      for (int i = 0; i < m; ++i) move = std::max(move, std::fabs(trial[i] - s[i]));
      s = trial;
      if (move <= 1e-15 * (1.0 + norm_m(s, m))) break;
    }
  }
  Vec foot = s;
  foot[m] = g.h(s);
  return foot;
}

namespace {

Vec graph_normal(const GraphFn& g, const Vec& y, int ndim) {
  const int m = ndim - 1;
  const Vec gr = g.grad(y);
  Vec nu{0, 0, 0};
  double s = 1.0;
  for (int i = 0; i < m; ++i) {
    nu[i] = -gr[i];
    s += gr[i] * gr[i];
  }
  nu[m] = 1.0;
  return (1.0 / std::sqrt(s)) * nu;
}

DistanceSample raw_distance(const DomainSpec& spec, const Vec& x) {
  DistanceSample out;
  const int m = spec.ndim - 1;
  switch (spec.kind) {
    case DomainKind::torus:
      out.d = spec.diameter();
      return out;
    case DomainKind::half_space:
      out.d = x[m];
      out.grad = {0, 0, 0};
      out.grad[m] = 1.0;
      out.foot = x;
      out.foot[m] = 0.0;
      out.valid = true;
      return out;
    case DomainKind::ball: {
      const Vec r = x - spec.center;
      const double rn = norm(r);
      out.d = spec.radius - rn;
      if (rn == 0.0) return out;
      out.grad = (-1.0 / rn) * r;
      out.foot = spec.center + (spec.radius / rn) * r;
      out.valid = true;
      return out;
    }
    case DomainKind::perturbed_half_space:
    case DomainKind::graph: {
      out.foot = graph_projection(*spec.graph, spec.ndim, x);
      const double dist = norm(x - out.foot);
      out.d = x[m] > spec.graph->h(x) ? dist : -dist;
      out.grad = graph_normal(*spec.graph, out.foot, spec.ndim);
      out.valid = true;
      return out;
    }
  }
  return out;
}

}  // namespace

DistanceSample distance_at(const DomainSpec& spec, const Vec& x) {
  DistanceSample s = raw_distance(spec, x);
  if (s.valid && !(std::fabs(s.d) < spec.band)) s.valid = false;
  return s;
}

SignedDistanceField signed_distance(const DomainSpec& spec, const Grid& grid) {
  SignedDistanceField f;
  f.d = ScalarField(grid);
  f.grad = VectorField(grid);
  f.valid.assign(grid.size(), 0);
  f.band = spec.band;
  const std::size_t n = grid.size();
#pragma omp parallel for schedule(dynamic, 256) if (default_exec() == Exec::omp)
  for (std::size_t i = 0; i < n; ++i) {
    const DistanceSample s = distance_at(spec, grid.node(i));
    f.d.v[i] = s.d;
    for (int a = 0; a < grid.ndim; ++a) f.grad.c[a][i] = s.valid ? s.grad[a] : 0.0;
    f.valid[i] = s.valid ? 1 : 0;
  }
  return f;
}

Vec project_to_boundary(const DomainSpec& spec, const Vec& x) {
  if (!spec.has_boundary()) throw PreconditionError("domain has no boundary");
  const DistanceSample s = distance_at(spec, x);
  if (!s.valid) throw AmbiguityError("point outside the reach band; projection not unique");
  return s.foot;
}

std::vector<BoundaryPoint> boundary_samples(const DomainSpec& spec, int per_axis) {
  std::vector<BoundaryPoint> out;
  const int n = spec.ndim, m = n - 1;
  switch (spec.kind) {
    case DomainKind::torus: return out;
    case DomainKind::ball: {
      if (n == 2) {
        const int k = 4 * per_axis;
        for (int i = 0; i < k; ++i) {
          const double t = 2.0 * kPi * (i + 0.5) / k;
          const Vec u{std::cos(t), std::sin(t), 0};
          out.push_back({spec.center + spec.radius * u, -1.0 * u});
        }
      } else {
        const int k = per_axis * per_axis;
        const double ga = kPi * (3.0 - std::sqrt(5.0));
        for (int i = 0; i < k; ++i) {
          const double z = 1.0 - 2.0 * (i + 0.5) / k;
          const double r = std::sqrt(1.0 - z * z);
          const Vec u{r * std::cos(ga * i), r * std::sin(ga * i), z};
          out.push_back({spec.center + spec.radius * u, -1.0 * u});
        }
      }
      return out;
    }
    default: break;
  }
  const int k1 = per_axis, k2 = m == 2 ? per_axis : 1;
  for (int i = 0; i < k1; ++i) {
    for (int j = 0; j < k2; ++j) {
      Vec y{0, 0, 0};
      y[0] = spec.box_lo[0] + (spec.box_hi[0] - spec.box_lo[0]) * (i + 0.5) / k1;
      if (m == 2) y[1] = spec.box_lo[1] + (spec.box_hi[1] - spec.box_lo[1]) * (j + 0.5) / k2;
      BoundaryPoint b;
      b.x = y;
      if (spec.kind == DomainKind::half_space) {
        b.normal = {0, 0, 0};
        b.normal[m] = 1.0;
      } else {
        b.x[m] = spec.graph->h(y);
        b.normal = graph_normal(*spec.graph, y, n);
      }
      out.push_back(b);
    }
  }
  return out;
}

// ---- charts ------------------------------------------------------------------

namespace {

// Orthonormal frame whose last column is nu.
Mat frame_with_normal(const Vec& nu, int n) {
  Mat R{};
  std::vector<Vec> cols;
  for (int e = 0; e < n && static_cast<int>(cols.size()) < n - 1; ++e) {
    Vec v{0, 0, 0};
    v[e] = 1.0;
    v = v - dot(v, nu) * nu;
    for (const auto& c : cols) v = v - dot(v, c) * c;
    const double l = norm(v);
    if (l < 1e-8) continue;
    cols.push_back((1.0 / l) * v);
  }
  cols.push_back(nu);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < 3; ++i) R[i][j] = cols[j][i];
  if (n == 2) R[2][2] = 1.0;
  return R;
}

}  // namespace

Chart chart_at(const DomainSpec& spec, const Vec& z0in) {
  Chart c;
  c.ndim = spec.ndim;
  const int n = spec.ndim, m = n - 1;
  switch (spec.kind) {
    case DomainKind::torus: throw PreconditionError("torus has no boundary charts");
    case DomainKind::half_space:
      c.z0 = z0in;
      c.z0[m] = 0.0;
      c.rot = identity();
      c.graph = std::make_shared<FlatGraph>(m);
      return c;
    case DomainKind::ball: {
      const Vec r = z0in - spec.center;
      const double rn = norm(r);
      if (rn == 0.0) throw PreconditionError("chart centre at the ball centre");
      c.z0 = spec.center + (spec.radius / rn) * r;
      c.rot = frame_with_normal((-1.0 / rn) * r, n);
      c.graph = std::make_shared<SphereCapGraph>(m, spec.radius);
      return c;
    }
    case DomainKind::perturbed_half_space:
    case DomainKind::graph: {
      c.z0 = z0in;
      c.z0[m] = spec.graph->h(z0in);
      c.rot = frame_with_normal(graph_normal(*spec.graph, c.z0, n), n);
      c.graph = std::make_shared<ImplicitChartGraph>(n, spec.graph, c.z0, c.rot);
      return c;
    }
  }
  return c;
}

Vec normal_map_forward(const Chart& chart, const Vec& eta) {
  const int m = chart.ndim - 1;
  const Vec nu = graph_normal(*chart.graph, eta, chart.ndim);
  Vec x{0, 0, 0};
  for (int i = 0; i < m; ++i) x[i] = eta[i];
  x[m] = chart.graph->h(eta);
  return x + eta[m] * nu;
}

Mat normal_map_jacobian(const Chart& chart, const Vec& eta) {
  const int n = chart.ndim, m = n - 1;
  const Vec g = chart.graph->grad(eta);
  const Mat H = chart.graph->hess(eta);
  double s = 1.0;
  for (int i = 0; i < m; ++i) s += g[i] * g[i];
  const double len = std::sqrt(s);
  Vec nu{0, 0, 0};
  for (int i = 0; i < m; ++i) nu[i] = -g[i] / len;
  nu[m] = 1.0 / len;
  Mat J{};
  for (int j = 0; j < m; ++j) {
    Vec dG{0, 0, 0};
    for (int i = 0; i < m; ++i) dG[i] = -H[i][j];
    const Vec dnu = (1.0 / len) * (dG - dot(nu, dG) * nu);
    for (int i = 0; i < n; ++i) J[i][j] = (i == j ? 1.0 : 0.0) + (i == m ? g[j] : 0.0) + eta[m] * dnu[i];
  }
  for (int i = 0; i < n; ++i) J[i][m] = nu[i];
  if (n == 2) J[2][2] = 1.0;
  return J;
}

Vec normal_map_inverse(const Chart& chart, const Vec& x, const std::optional<Vec>& seed) {
  const int n = chart.ndim, m = n - 1;
  Vec eta{0, 0, 0};
  if (seed) {
    eta = *seed;
  } else {
    const Vec foot = graph_projection(*chart.graph, n, x);
    const double dist = norm(x - foot);
    for (int i = 0; i < m; ++i) eta[i] = foot[i];
    eta[m] = x[m] > chart.graph->h(x) ? dist : -dist;
  }
  for (int it = 0; it < 50; ++it) {
    const Vec r = normal_map_forward(chart, eta) - x;
    double rn = 0.0;
    for (int i = 0; i < n; ++i) rn = std::max(rn, std::fabs(r[i]));
    if (rn <= 1e-12 * (1.0 + norm(x))) return eta;
    const Vec step = matvec(inverse(normal_map_jacobian(chart, eta), n), r);
    for (int i = 0; i < n; ++i) eta[i] -= step[i];
    if (!std::isfinite(eta[0]) || !std::isfinite(eta[m])) break;
  }
  throw OutsideChartError("normal coordinate inversion did not converge");
}

namespace {

Mat fd_jacobian(const std::function<Vec(const Vec&)>& F, const Vec& p, double step, int n) {
  Mat J{};
  for (int j = 0; j < n; ++j) {
    Vec a = p, b = p;
    a[j] += step;
    b[j] -= step;
    const Vec fa = F(a), fb = F(b);
    for (int i = 0; i < n; ++i) J[i][j] = (fa[i] - fb[i]) / (2.0 * step);
  }
  if (n == 2) J[2][2] = 1.0;
  return J;
}

Mat minus_identity(Mat J, int n) {
  for (int i = 0; i < n; ++i) J[i][i] -= 1.0;
  if (n == 2) J[2][2] = 0.0;
  return J;
}

// Frobenius norm of the derivative of a matrix-valued map, by central differences.
double second_derivative_norm(const std::function<Mat(const Vec&)>& J, const Vec& p, double step, int n) {
  double s = 0.0;
  for (int k = 0; k < n; ++k) {
    Vec a = p, b = p;
    a[k] += step;
    b[k] -= step;
    const Mat Ja = J(a), Jb = J(b);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) s += sqr((Ja[i][j] - Jb[i][j]) / (2.0 * step));
  }
  return std::sqrt(s);
}

}  // namespace

ChartAudit check_chart_estimates(const Chart& chart, double rho, double eps, double K, int samples,
                                 std::uint64_t seed) {
  const int n = chart.ndim, m = n - 1;
  ChartAudit a;
  a.samples = samples;
  a.c2_cap = 4.0 * n * std::pow(1.0 + K, 3);
  Rng rng(seed);
  const double step = 1e-5 * rho;
  auto F = [&](const Vec& e) { return normal_map_forward(chart, e); };
  auto Jf = [&](const Vec& e) { return normal_map_jacobian(chart, e); };
  for (int s = 0; s < samples; ++s) {
    Vec eta = rho * random_in_ball(rng, m);
    eta[m] = rho * (0.05 + 0.9 * rng.uniform());
    const Vec x = F(eta);
    auto Finv = [&](const Vec& y) { return normal_map_inverse(chart, y, eta); };
    auto Jinv = [&](const Vec& y) { return inverse(Jf(normal_map_inverse(chart, y, eta)), n); };
    const Mat Jfd = fd_jacobian(F, eta, step, n);
    const Mat Jifd = fd_jacobian(Finv, x, step, n);
    a.forward_deviation = std::max(a.forward_deviation, operator_norm(minus_identity(Jfd, n), n));
    a.inverse_deviation = std::max(a.inverse_deviation, operator_norm(minus_identity(Jifd, n), n));
    const double c2f = norm(F(eta)) + operator_norm(Jfd, n) + second_derivative_norm(Jf, eta, step, n);
    const double c2i = norm(eta) + operator_norm(Jifd, n) + second_derivative_norm(Jinv, x, step, n);
    a.forward_c2 = std::max(a.forward_c2, c2f);
    a.inverse_c2 = std::max(a.inverse_c2, c2i);
  }
  a.below_eps = a.forward_deviation < eps && a.inverse_deviation < eps;
  return a;
}

double calibrate_chart_radius(const Chart& chart, double eps, double K, double cap) {
  double lo = 0.0, hi = cap;
  auto ok = [&](double r) {
    try {
      return check_chart_estimates(chart, r, eps, K, 48).below_eps;
    } catch (const Error&) {
      return false;
    }
  };
  if (ok(hi)) return hi;
  for (int it = 0; it < 30; ++it) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? lo : hi) = mid;
  }
  return lo;
}

// ---- reach ---------------------------------------------------------------------

namespace {

// Largest rho with B_{2 rho}(0) inside {|x'| < alpha, h - beta < x_n < h + beta}.
double chart_box_radius(const Chart& chart, double alpha, double beta, double cap) {
  const int m = chart.ndim - 1;
  auto fits = [&](double rho) {
    const double R = 2.0 * rho;
    if (!(R < alpha)) return false;
    const int k = m == 1 ? 65 : 17;
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < (m == 1 ? 1 : k); ++j) {
        Vec y{0, 0, 0};
        y[0] = R * (-1.0 + 2.0 * i / (k - 1));
        if (m == 2) y[1] = R * (-1.0 + 2.0 * j / (k - 1));
        const double r2 = y[0] * y[0] + y[1] * y[1];
        if (r2 > R * R) continue;
        const double top = std::sqrt(R * R - r2);
        double hv;
        try {
          hv = chart.graph->h(y);
        } catch (const OutsideChartError&) {
          return false;
        }
        if (!(top < hv + beta) || !(-top > hv - beta)) return false;
      }
    }
    return true;
  };
  double lo = 0.0, hi = cap;
  if (fits(hi)) return hi;
  for (int it = 0; it < 40; ++it) {
    const double mid = 0.5 * (lo + hi);
    (fits(mid) ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace

ReachReport estimate_reach(const DomainSpec& spec, int density) {
  if (!spec.has_boundary()) throw PreconditionError("reach needs a domain with boundary");
  ReachReport rep;
  const int n = spec.ndim;
  const auto samples = boundary_samples(spec, density);
  rep.cap = spec.kind == DomainKind::ball ? 2.0 * spec.radius : spec.diameter();
  if (spec.kind == DomainKind::half_space) {
    rep.estimated = rep.cap;
  } else {
    auto single_valued = [&](double rho) {
      for (const auto& b : samples) {
        for (double sgn : {1.0, -1.0}) {
          const DistanceSample s = raw_distance(spec, b.x + (sgn * rho) * b.normal);
          if (std::fabs(std::fabs(s.d) - rho) > 1e-6) return false;
        }
      }
      return true;
    };
    double lo = 0.0, hi = rep.cap;
    if (single_valued(hi)) {
      lo = hi;
    } else {
      for (int it = 0; it < 40; ++it) {
        const double mid = 0.5 * (lo + hi);
        (single_valued(mid) ? lo : hi) = mid;
      }
    }
    rep.estimated = lo;
  }
  // Chart-wise lower bounds.
  rep.rho0 = kInf;
  const std::size_t stride = std::max<std::size_t>(1, samples.size() / 16);
  for (std::size_t i = 0; i < samples.size(); i += stride) {
    const Chart c = chart_at(spec, samples[i].x);
    const double cap = std::min(rep.cap, std::isfinite(spec.alpha) ? spec.alpha : rep.cap);
    const double r0 = chart_box_radius(c, spec.alpha, spec.beta, cap);
    rep.rho0 = std::min(rep.rho0, r0);
    const double kb = spec.K > 0.0 ? 1.0 / (8.0 * n * spec.K) : kInf;
    rep.chart_bounds.push_back(std::min(kb, r0));
  }
  const double kb = spec.K > 0.0 ? 1.0 / (8.0 * n * spec.K) : kInf;
  rep.curvature_bound = std::min(kb, rep.rho0);
  rep.beta_bound_applies = std::isfinite(spec.beta) && (spec.K == 0.0 || spec.beta < 2.0 / (n * spec.K));
  rep.beta_bound = rep.beta_bound_applies ? spec.beta / 4.0 : 0.0;
  const double tol = 1e-9 * rep.cap;
  rep.flagged = rep.curvature_bound > rep.estimated + tol || rep.beta_bound > rep.estimated + tol;
  return rep;
}

// ---- local audits --------------------------------------------------------------

namespace {

void require_radius(const std::vector<std::pair<std::string, double>>& bounds, double rho) {
  for (const auto& [name, v] : bounds)
    if (!(rho < v)) throw PreconditionError("rho = " + std::to_string(rho) + " violates rho < " + name + " = " +
                                            std::to_string(v));
}

double reach_of(const DomainSpec& spec) { return std::isfinite(spec.reach) ? spec.reach : spec.band; }

}  // namespace

StarAudit check_star_like(const DomainSpec& spec, const Vec& z0, double rho, int rays, std::uint64_t seed) {
  const int n = spec.ndim, m = n - 1;
  require_radius({{"(32nK)^-1", spec.K > 0 ? 1.0 / (32.0 * n * spec.K) : kInf},
                  {"alpha", spec.alpha},
                  {"beta", spec.beta},
                  {"R_*", reach_of(spec)}},
                 rho);
  const Chart chart = chart_at(spec, z0);
  StarAudit a;
  a.rays = rays;
  Vec x0l{0, 0, 0};
  x0l[m] = 0.5 * rho;
  a.x0 = chart.to_global(x0l);
  auto inside = [&](const Vec& xl) { return norm(xl) < rho && spec.inside(chart.to_global(xl)); };
  Rng rng(seed);
  const int steps = 1000;  // step rho / 400 up to 2.5 rho
  for (int r = 0; r < rays; ++r) {
    const Vec c = x0l + (0.25 * rho * 0.999) * random_in_ball(rng, n);
    const Vec e = random_direction(rng, n);
    bool prev = inside(c);
    if (!prev) continue;
    int transitions = 0;
    for (int k = 1; k <= steps; ++k) {
      const bool cur = inside(c + (rho * k / 400.0) * e);
      if (cur != prev) ++transitions;
      prev = cur;
    }
    if (transitions == 1) ++a.single_crossings;
  }
  a.pass = a.single_crossings == rays;
  return a;
}

LipschitzAudit sample_lipschitz_constant(const DomainSpec& spec, const Vec& z0, double rho, int samples,
                                         std::uint64_t seed) {
  const int n = spec.ndim, m = n - 1;
  require_radius({{"(96nK+4)^-1", 1.0 / (96.0 * n * spec.K + 4.0)},
                  {"alpha", spec.alpha},
                  {"beta", spec.beta},
                  {"R_*", reach_of(spec)}},
                 rho);
  const Chart chart = chart_at(spec, z0);
  const GraphFn& h = *chart.graph;
  LipschitzAudit a;
  a.min_normal_component = kInf;
  Rng rng(seed);
  std::vector<Vec> dirs;
  if (m == 1) {
    dirs = {Vec{1, 0, 0}, Vec{-1, 0, 0}};
  } else {
    for (int k = 0; k < 8; ++k) dirs.push_back({std::cos(2 * kPi * k / 8), std::sin(2 * kPi * k / 8), 0});
  }
  const double rho2 = rho * rho;
  for (const Vec& e : dirs) {
    // Seam point: |(s e, h(s e))| = rho.
    double lo = 0.0, hi = rho;
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double hv = h.h(mid * e);
      (mid * mid + hv * hv < rho2 ? lo : hi) = mid;
    }
    Vec w0 = lo * e;
    w0[m] = h.h(w0);
    const Vec nuO = graph_normal(h, w0, n);
    const Vec nuB = (-1.0 / rho) * w0;
    Vec eI = nuO + nuB;
    eI = (1.0 / norm(eI)) * eI;
    a.min_normal_component = std::min(a.min_normal_component, eI[m]);
    ++a.seam_points;
    std::vector<Vec> gamma{w0}, sphere{w0};
    for (int s = 0; s < samples; ++s) {
      Vec y = w0 + rho2 * random_in_ball(rng, m);
      y[m] = h.h(y);
      if (norm(y - w0) < rho2 && norm(y) < rho) gamma.push_back(y);
      Vec u = (1.0 / rho) * w0 + rho * random_in_ball(rng, n);
      const Vec p = (rho / norm(u)) * u;
      if (norm(p - w0) < rho2 && p[m] > h.h(p)) sphere.push_back(p);
    }
    auto ratio = [&](const Vec& p, const Vec& q) {
      const Vec d = p - q;
      const double hn = dot(d, eI);
      const double tn = norm(d - hn * eI);
      return tn > 1e-14 ? std::fabs(hn) / tn : 0.0;
    };
    for (std::size_t i = 0; i < gamma.size(); ++i)
      for (std::size_t j = i + 1; j < gamma.size(); ++j) a.gamma_ratio = std::max(a.gamma_ratio, ratio(gamma[i], gamma[j]));
    for (std::size_t i = 0; i < sphere.size(); ++i)
      for (std::size_t j = i + 1; j < sphere.size(); ++j)
        a.sphere_ratio = std::max(a.sphere_ratio, ratio(sphere[i], sphere[j]));
    double mixed = 0.0;
    for (const auto& p : gamma)
      for (const auto& q : sphere) mixed = std::max(mixed, ratio(p, q));
    a.constant = std::max({a.constant, a.gamma_ratio, a.sphere_ratio, mixed});
  }
  a.gamma_ok = a.gamma_ratio <= 13.0 * n;
  a.sphere_ok = a.sphere_ratio <= 600.0 * std::pow(n, 1.5);
  a.normal_ok = a.min_normal_component > 0.4;
  return a;
}

SmallnessAudit check_smallness(const GraphFn& h, double R_h, double C_star) {
  const int n = h.dim() + 1;
  const GraphBounds b = graph_bounds(h, R_h);
  SmallnessAudit s;
  s.c1_norm = b.sup_h + b.sup_grad;
  s.hess_sup = b.sup_hess;
  const double H = b.sup_hess, R = R_h;
  s.C_s = 1.0 + s.c1_norm;
  s.C_1 = 1.0 + R * H;
  s.C_star1 = std::pow(s.C_1, 3) * (1.0 + std::pow(R, 0.25)) * (std::sqrt(R) * H + std::pow(R, 2.5) * H * H * H);
  s.C_star2 = (R + std::pow(R, 1.0 / (2.0 * n))) * H + (std::pow(R, n - 1) + 1.0) * s.c1_norm;
  s.first_lhs = std::pow(R, (2.0 * n - 1.0) / (2.0 * n));
  s.second_lhs = std::pow(s.C_s, 1.5 * n + 8.0) * s.C_1 * (s.C_star1 + s.C_star2 + std::pow(R, 0.5 * n));
  s.first_ok = s.first_lhs < 0.5;
  s.second_ok = s.second_lhs < 1.0 / (2.0 * C_star);
  return s;
}

double theta_ck_norm(int k) {
  double sup[4] = {0, 0, 0, 0};
  const int N = 8001;
  for (int i = 0; i < N; ++i) {
    const Jet3 j = bump(Profile::theta, 2.0 * i / (N - 1));
    sup[0] = std::max(sup[0], std::fabs(j.v));
    sup[1] = std::max(sup[1], std::fabs(j.d1));
    sup[2] = std::max(sup[2], std::fabs(j.d2));
    sup[3] = std::max(sup[3], std::fabs(j.d3));
  }
  double s = 0.0;
  for (int i = 0; i <= std::min(k, 3); ++i) s += sup[i];
  return s;
}

LocalizedChart localize_chart(const DomainSpec& spec, const Vec& z0, double rho) {
  const int n = spec.ndim, m = n - 1;
  require_radius({{"beta/4", spec.beta / 4.0}, {"R_*/2", reach_of(spec) / 2.0}, {"c0", spec.constants.c0}}, rho);
  LocalizedChart L;
  L.chart = chart_at(spec, z0);
  const double Cn = spec.constants.C_n > 0.0 ? spec.constants.C_n : 4.0 * n;
  L.theta_c1 = theta_ck_norm(1);
  L.theta_c2 = theta_ck_norm(2);
  L.theta_c3 = theta_ck_norm(3);
  const double K = spec.K;
  L.lambda = Cn * (L.theta_c3 + 1.0) * K / rho;
  L.reach_bound = L.lambda > 0.0 ? 1.0 / (2.0 * n * L.lambda) : kInf;
  GraphPtr hstar;
  if (dynamic_cast<const FlatGraph*>(L.chart.graph.get()))
    hstar = std::make_shared<FlatGraph>(m);
  else
    hstar = std::make_shared<TaperedGraph>(L.chart.graph, rho);
  Vec lo{0, 0, 0}, hi{0, 0, 0};
  for (int a = 0; a < n; ++a) {
    lo[a] = -4.0 * rho;
    hi[a] = 4.0 * rho;
  }
  L.half_space = DomainSpec::perturbed_half_space(n, hstar, 2.0 * rho, lo, hi);
  L.half_space.K = L.lambda;
  L.half_space.constants = spec.constants;
  const GraphBounds b = graph_bounds(*hstar, 2.0 * rho);
  L.grad_sup = b.sup_grad;
  L.hess_sup = b.sup_hess;
  L.grad_bound = Cn * (1.0 + L.theta_c1) * rho * K;
  L.hess_bound = Cn * (1.0 + L.theta_c2) * K;
  return L;
}

double chart_K(const Chart& chart, double alpha) {
  const GraphBounds b = graph_bounds(*chart.graph, alpha, chart.ndim == 2 ? 201 : 41);
  return std::max({b.sup_h, b.sup_grad, b.sup_hess});
}

}  // namespace vbmo
