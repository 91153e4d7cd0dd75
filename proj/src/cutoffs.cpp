#include "vbmo/cutoffs.hpp"

#include <algorithm>

namespace vbmo {

namespace {

Mat radial_hess(double fp_over_r, double fpp, const Vec& u, int n) {
  Mat H{};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) H[i][j] = fpp * u[i] * u[j] + fp_over_r * ((i == j ? 1.0 : 0.0) - u[i] * u[j]);
  return H;
}

double mat_norm(const Mat& H, int n) { return operator_norm(H, n); }

}  // namespace

InteriorCutoff::InteriorCutoff(int ndim, const Vec& x, double eps) : n_(ndim), x_(x), eps_(eps) {
  if (!(eps > 0.0)) throw PreconditionError("cutoff radius must be positive");
}

double InteriorCutoff::value(const Vec& y) const { return bump(Profile::phi, norm(y - x_) / eps_).v; }

CutoffValue InteriorCutoff::eval(const Vec& y) const {
  CutoffValue out;
  const Vec d = y - x_;
  const double r = norm(d);
  const Jet3 j = bump(Profile::phi, r / eps_);
  out.v = j.v;
  if (j.d1 == 0.0 && j.d2 == 0.0) return out;
  const Vec u = (1.0 / r) * d;
  out.grad = (j.d1 / eps_) * u;
  out.hess = radial_hess(j.d1 / (eps_ * r), j.d2 / (eps_ * eps_), u, n_);
  return out;
}

BoundaryCutoff::BoundaryCutoff(const Chart& chart, double eps) : chart_(chart), eps_(eps) {
  if (!(eps > 0.0)) throw PreconditionError("cutoff radius must be positive");
}

bool BoundaryCutoff::far(const Vec& xl) const { return norm(xl) > 8.0 * eps_; }

Vec BoundaryCutoff::coordinates(const Vec& x) const {
  const Vec xl = chart_.to_local(x);
  const int m = chart_.ndim - 1;
  Vec seed = xl;
  seed[m] = xl[m] - chart_.graph->h(xl);
  return normal_map_inverse(chart_, xl, seed);
}

namespace {

// Phi(eta) = psi(|eta_n|/eps) psi(|eta'|/eps) and its eta-gradient.
double phi_eta(const Vec& eta, double eps, int n, Vec* grad) {
  const int m = n - 1;
  const Jet3 A = bump(Profile::psi, eta[m] / eps);
  double r = 0.0;
  for (int i = 0; i < m; ++i) r += eta[i] * eta[i];
  r = std::sqrt(r);
  const Jet3 B = bump(Profile::psi, r / eps);
  if (grad) {
    *grad = {0, 0, 0};
    (*grad)[m] = A.d1 / eps * B.v;
    if (r > 0.0 && B.d1 != 0.0)
      for (int i = 0; i < m; ++i) (*grad)[i] = A.v * B.d1 / eps * eta[i] / r;
  }
  return A.v * B.v;
}

}  // namespace

double BoundaryCutoff::value(const Vec& x) const {
  const Vec xl = chart_.to_local(x);
  if (far(xl)) return 0.0;
  return phi_eta(coordinates(x), eps_, chart_.ndim, nullptr);
}

Vec BoundaryCutoff::grad_local(const Vec& xl) const {
  const int n = chart_.ndim, m = n - 1;
  if (far(xl)) return {0, 0, 0};
  Vec seed = xl;
  seed[m] = xl[m] - chart_.graph->h(xl);
  const Vec eta = normal_map_inverse(chart_, xl, seed);
  Vec g{0, 0, 0};
  phi_eta(eta, eps_, n, &g);
  const Mat Jinv = inverse(normal_map_jacobian(chart_, eta), n);
  return matTvec(Jinv, g);
}

CutoffValue BoundaryCutoff::eval_local(const Vec& xl, bool with_hessian) const {
  const int n = chart_.ndim, m = n - 1;
  CutoffValue out;
  if (far(xl)) return out;
  Vec seed = xl;
  seed[m] = xl[m] - chart_.graph->h(xl);
  const Vec eta = normal_map_inverse(chart_, xl, seed);
  Vec g{0, 0, 0};
  out.v = phi_eta(eta, eps_, n, &g);
  out.grad = matTvec(inverse(normal_map_jacobian(chart_, eta), n), g);
  if (with_hessian) {
    const double step = 1e-5 * eps_;
    for (int k = 0; k < n; ++k) {
      Vec a = xl, b = xl;
      a[k] += step;
      b[k] -= step;
      const Vec ga = grad_local(a), gb = grad_local(b);
      for (int i = 0; i < n; ++i) out.hess[i][k] = (ga[i] - gb[i]) / (2.0 * step);
    }
    for (int i = 0; i < n; ++i)
      for (int k = i + 1; k < n; ++k) out.hess[i][k] = out.hess[k][i] = 0.5 * (out.hess[i][k] + out.hess[k][i]);
  }
  return out;
}

CutoffValue BoundaryCutoff::eval(const Vec& x, bool with_hessian) const {
  CutoffValue l = eval_local(chart_.to_local(x), with_hessian);
  CutoffValue out;
  out.v = l.v;
  out.grad = chart_.dir_to_global(l.grad);
  if (with_hessian) out.hess = matmul(chart_.rot, matmul(l.hess, transpose(chart_.rot)));
  return out;
}

ScalarField sample_cutoff(const InteriorCutoff& c, const Grid& g) {
  ScalarField u(g);
  for (std::size_t i = 0; i < g.size(); ++i) u.v[i] = c.value(g.node(i));
  return u;
}

ScalarField sample_cutoff(const BoundaryCutoff& c, const Grid& g) {
  ScalarField u(g);
  const std::size_t n = g.size();
#pragma omp parallel for schedule(dynamic, 128) if (default_exec() == Exec::omp)
  for (std::size_t i = 0; i < n; ++i) u.v[i] = c.value(g.node(i));
  return u;
}

CutoffAudit audit_interior_cutoff(const InteriorCutoff& c, int samples, std::uint64_t seed) {
  CutoffAudit a;
  a.samples = samples;
  a.min_value = kInf;
  a.max_value = -kInf;
  a.plateau_ok = a.support_ok = true;
  Rng rng(seed);
  const int n = c.ndim();
  for (int s = 0; s < samples; ++s) {
    Vec p{0, 0, 0};
    for (int i = 0; i < n; ++i) p[i] = rng.uniform(-2.0, 2.0);
    const double r = norm(p);
    const CutoffValue v = c.eval(c.center() + c.eps() * p);
    a.min_value = std::min(a.min_value, v.v);
    a.max_value = std::max(a.max_value, v.v);
    if (r <= 1.0 && v.v != 1.0) a.plateau_ok = false;
    if (r >= 1.5 && v.v != 0.0) a.support_ok = false;
    a.eps2_hessian = std::max(a.eps2_hessian, c.eps() * c.eps() * mat_norm(v.hess, n));
  }
  return a;
}

CutoffAudit audit_boundary_cutoff(const BoundaryCutoff& c, const DomainSpec& spec, int samples, std::uint64_t seed) {
  CutoffAudit a;
  a.samples = samples;
  a.min_value = kInf;
  a.max_value = -kInf;
  a.plateau_ok = a.support_ok = true;
  Rng rng(seed);
  const Chart& ch = c.chart();
  const int n = ch.ndim, m = n - 1;
  const double eps = c.eps();
  for (int s = 0; s < samples; ++s) {
    Vec p{0, 0, 0};
    for (int i = 0; i < n; ++i) p[i] = rng.uniform(-5.0, 5.0);
    const Vec x = ch.to_global(eps * p);
    const Vec eta = c.coordinates(x);
    double r = 0.0;
    for (int i = 0; i < m; ++i) r += eta[i] * eta[i];
    r = std::sqrt(r);
    const CutoffValue v = c.eval(x, true);
    a.min_value = std::min(a.min_value, v.v);
    a.max_value = std::max(a.max_value, v.v);
    if (std::fabs(eta[m]) <= 3.0 * eps && r <= 3.0 * eps && v.v != 1.0) a.plateau_ok = false;
    if ((std::fabs(eta[m]) >= 4.0 * eps || r >= 4.0 * eps) && v.v != 0.0) a.support_ok = false;
    a.eps2_hessian = std::max(a.eps2_hessian, eps * eps * mat_norm(v.hess, n));
    if (std::fabs(eta[m]) < 3.0 * eps) {
      const DistanceSample d = distance_at(spec, x);
      if (d.valid) a.max_normal_derivative = std::max(a.max_normal_derivative, std::fabs(dot(d.grad, v.grad)));
    }
  }
  return a;
}

double interior_plateau_measure(const InteriorCutoff& c, const Grid& g) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (c.value(g.node(i)) == 1.0) ++count;
  return static_cast<double>(count) * g.cell_volume();
}

}  // namespace vbmo
