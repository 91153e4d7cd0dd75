#include <algorithm>
#include <deque>

#include "fft.hpp"
#include "multigrid.hpp"
#include "vbmo/helmholtz.hpp"

namespace vbmo {

using detail::cplx;

namespace {

struct SpectralSplit {
  VectorField f0, gp;
  ScalarField p;
  double div_rel = 0.0;
};

// Riesz split of a fully periodic field; the zero mode and Nyquist-only modes
// stay in f0.
SpectralSplit spectral_split(const VectorField& f) {
  const Grid& g = f.grid;
  const int n = g.ndim;
  if (!g.fully_periodic()) throw ConfigError("whole-space projection needs a fully periodic grid");
  if (f.ncomp() != n) throw ConfigError("field needs ndim components");
  require_finite(f);
  detail::RealFft fft(g);
  const std::size_t nc = fft.complex_size();
  std::vector<std::vector<cplx>> F(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) F[static_cast<std::size_t>(a)] = fft.forward(f.c[static_cast<std::size_t>(a)]);

  double fmax = 0.0;
  for (std::size_t q = 0; q < nc; ++q) {
    double s = 0.0;
    for (int a = 0; a < n; ++a) s += std::norm(F[static_cast<std::size_t>(a)][q]);
    fmax = std::max(fmax, std::sqrt(s));
  }
  std::vector<std::vector<cplx>> P(static_cast<std::size_t>(n), std::vector<cplx>(nc, cplx(0.0, 0.0)));
  std::vector<cplx> ph(nc, cplx(0.0, 0.0));
  bool any = false;
  const std::size_t last = static_cast<std::size_t>(n - 1);
  const std::size_t nlast = g.shape[last];
  double num = 0.0, den = 0.0;
  for (std::size_t q = 0; q < nc; ++q) {
    const auto m = fft.unravel(q);
    // Hermitian weight of the half spectrum.
    const double w = (m[last] == 0 || (nlast % 2 == 0 && m[last] == nlast / 2)) ? 1.0 : 2.0;
    Vec xi{0, 0, 0};
    double k2 = 0.0;
    for (int a = 0; a < n; ++a) {
      xi[a] = fft.wavenumber(a, m[a], true);
      k2 += xi[a] * xi[a];
    }
    cplx s(0.0, 0.0);
    double f2 = 0.0;
    for (int a = 0; a < n; ++a) {
      s += xi[a] * F[static_cast<std::size_t>(a)][q];
      f2 += std::norm(F[static_cast<std::size_t>(a)][q]);
    }
    den += w * k2 * f2;
    if (k2 == 0.0) continue;
    if (std::abs(s) <= kSolenoidalThreshold * std::sqrt(k2) * fmax) {
      num += w * std::norm(s);
      continue;
    }
    any = true;
    for (int a = 0; a < n; ++a) P[static_cast<std::size_t>(a)][q] = (xi[a] / k2) * s;
    ph[q] = cplx(0.0, -1.0) * s / k2;
  }
  SpectralSplit out;
  out.div_rel = den > 0.0 ? std::sqrt(num / den) : 0.0;
  out.f0 = VectorField(g);
  out.gp = VectorField(g);
  out.p = ScalarField(g);
  if (!any) {
    out.f0 = f;
    return out;
  }
  for (int a = 0; a < n; ++a) {
    const auto ua = static_cast<std::size_t>(a);
    std::vector<cplx> r(nc);
    for (std::size_t q = 0; q < nc; ++q) r[q] = F[ua][q] - P[ua][q];
    out.f0.c[ua] = fft.inverse(r);
    out.gp.c[ua] = fft.inverse(P[ua]);
  }
  out.p.v = fft.inverse(ph);
  return out;
}

Diagnostics collocated_diagnostics(const VectorField& f, const VectorField& f0, const VectorField& gp) {
  Diagnostics d;
  const double ff = inner(f, f);
  d.orthogonality = ff > 0.0 ? std::fabs(inner(f0, gp)) / ff : 0.0;
  double fm = 0.0, em = 0.0;
  for (int a = 0; a < f.ncomp(); ++a) {
    const auto ua = static_cast<std::size_t>(a);
    for (std::size_t i = 0; i < f.c[ua].size(); ++i) {
      fm = std::max(fm, std::fabs(f.c[ua][i]));
      em = std::max(em, std::fabs(f0.c[ua][i] + gp.c[ua][i] - f.c[ua][i]));
    }
  }
  d.reconstruction_error = fm > 0.0 ? em / fm : em;
  return d;
}

}  // namespace

DecompositionResult project_whole_space(const VectorField& f) {
  SpectralSplit s = spectral_split(f);
  DecompositionResult r;
  r.method = "spectral";
  r.diag = collocated_diagnostics(f, s.f0, s.gp);
  r.diag.div_residual = s.div_rel;
  r.f0 = std::move(s.f0);
  r.grad_p = std::move(s.gp);
  r.p = std::move(s.p);
  return r;
}

namespace {

Grid doubled_grid(const Grid& g, int ax) {
  Grid d = g;
  const auto ua = static_cast<std::size_t>(ax);
  d.shape[ua] = 2 * g.shape[ua];
  d.origin[ax] = g.origin[ax] - static_cast<double>(g.shape[ua]) * g.spacing[ax];
  d.periodic[ua] = true;
  return d;
}

void check_slab(const Grid& g, int ax) {
  if (ax < 0 || ax >= g.ndim) throw ConfigError("normal axis out of range");
  if (g.periodic[static_cast<std::size_t>(ax)])
    throw ConfigError("half-space slab: the normal axis must not be periodic");
  for (int a = 0; a < g.ndim; ++a)
    if (a != ax && !g.periodic[static_cast<std::size_t>(a)])
      throw ConfigError("half-space slab: tangential axes must be periodic");
}

}  // namespace

VectorField reflect_to_doubled(const VectorField& f, int ax) {
  const Grid& g = f.grid;
  check_slab(g, ax);
  const Grid d = doubled_grid(g, ax);
  const std::size_t N = g.shape[static_cast<std::size_t>(ax)];
  VectorField F(d, f.ncomp());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const std::size_t j = g.unravel(i)[static_cast<std::size_t>(ax)];
    auto ijk = g.unravel(i);
    ijk[static_cast<std::size_t>(ax)] = N + j;
    const std::size_t hi = d.index(ijk[0], ijk[1], ijk[2]);
    ijk[static_cast<std::size_t>(ax)] = N - 1 - j;
    const std::size_t lo = d.index(ijk[0], ijk[1], ijk[2]);
    for (int a = 0; a < f.ncomp(); ++a) {
      const auto ua = static_cast<std::size_t>(a);
      F.c[ua][hi] = f.c[ua][i];
      F.c[ua][lo] = a == ax ? -f.c[ua][i] : f.c[ua][i];
    }
  }
  return F;
}

VectorField symmetrize_doubled(const VectorField& F, int ax, bool even_scalar) {
  const Grid& d = F.grid;
  const std::size_t M = d.shape[static_cast<std::size_t>(ax)];
  VectorField G(d, F.ncomp());
  for (std::size_t i = 0; i < d.size(); ++i) {
    auto ijk = d.unravel(i);
    ijk[static_cast<std::size_t>(ax)] = M - 1 - ijk[static_cast<std::size_t>(ax)];
    const std::size_t mir = d.index(ijk[0], ijk[1], ijk[2]);
    for (int a = 0; a < F.ncomp(); ++a) {
      const auto ua = static_cast<std::size_t>(a);
      const double s = (a == ax && !even_scalar) ? -1.0 : 1.0;
      G.c[ua][i] = 0.5 * (F.c[ua][i] + s * F.c[ua][mir]);
    }
  }
  return G;
}

VectorField restrict_from_doubled(const VectorField& F, int ax, std::size_t n_normal) {
  Grid g = F.grid;
  const auto ua = static_cast<std::size_t>(ax);
  g.shape[ua] = n_normal;
  g.origin[ax] = F.grid.origin[ax] + static_cast<double>(n_normal) * g.spacing[ax];
  g.periodic[ua] = false;
  VectorField f(g, F.ncomp());
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto ijk = g.unravel(i);
    ijk[ua] += n_normal;
    const std::size_t src = F.grid.index(ijk[0], ijk[1], ijk[2]);
    for (int a = 0; a < F.ncomp(); ++a) f.c[static_cast<std::size_t>(a)][i] = F.c[static_cast<std::size_t>(a)][src];
  }
  return f;
}

DecompositionResult project_half_space(const VectorField& f, int normal_axis) {
  const Grid& g = f.grid;
  const int ax = normal_axis < 0 ? g.ndim - 1 : normal_axis;
  check_slab(g, ax);
  const std::size_t N = g.shape[static_cast<std::size_t>(ax)];
  const VectorField F = reflect_to_doubled(f, ax);
  SpectralSplit s = spectral_split(F);
  VectorField pv(s.p.grid, 1);
  pv.c[0] = s.p.v;
  DecompositionResult r;
  r.method = "reflect";
  r.f0 = restrict_from_doubled(symmetrize_doubled(s.f0, ax), ax, N);
  r.grad_p = restrict_from_doubled(symmetrize_doubled(s.gp, ax), ax, N);
  const VectorField pr = restrict_from_doubled(symmetrize_doubled(pv, ax, true), ax, N);
  r.p = ScalarField(g);
  r.p.v = pr.c[0];
  r.f0.grid = g;
  r.grad_p.grid = g;
  r.diag = collocated_diagnostics(f, r.f0, r.grad_p);
  r.diag.div_residual = s.div_rel;
  // Normal component on the node row half a cell above the boundary face.
  double tr = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g.unravel(i)[static_cast<std::size_t>(ax)] == 0)
      tr = std::max(tr, std::fabs(r.f0.c[static_cast<std::size_t>(ax)][i]));
  r.diag.normal_trace = tr;
  return r;
}

// ---- staggered calculus ----

namespace {

// Neighbour of node i one step along axis (dir = +1 or -1), or -1.
long neighbour(const Grid& g, std::size_t i, int axis, int dir) {
  const auto ua = static_cast<std::size_t>(axis);
  const std::size_t c = g.unravel(i)[ua];
  const std::size_t N = g.shape[ua], st = g.stride(axis);
  if (dir > 0) {
    if (c + 1 < N) return static_cast<long>(i + st);
    return g.periodic[ua] && N > 1 ? static_cast<long>(i - (N - 1) * st) : -1;
  }
  if (c > 0) return static_cast<long>(i - st);
  return g.periodic[ua] && N > 1 ? static_cast<long>(i + (N - 1) * st) : -1;
}

}  // namespace

FaceKind face_kind(const Grid& g, const Mask& mask, std::size_t i, int axis) {
  const long j = neighbour(g, i, axis, +1);
  if (j < 0) return FaceKind::none;
  const bool a = mask[i] != 0, b = mask[static_cast<std::size_t>(j)] != 0;
  if (a && b) return FaceKind::interior;
  if (a != b) return FaceKind::boundary;
  return FaceKind::none;
}

ScalarField face_divergence(const VectorField& F, const Mask& mask, bool interior_only) {
  const Grid& g = F.grid;
  ScalarField out(g);
  const std::size_t N = g.size();
  auto live = [&](FaceKind k) { return k == FaceKind::interior || (k == FaceKind::boundary && !interior_only); };
#pragma omp parallel for schedule(static) if (default_exec() == Exec::omp)
  for (std::size_t i = 0; i < N; ++i) {
    if (!mask[i]) continue;
    double s = 0.0;
    for (int a = 0; a < g.ndim; ++a) {
      const auto ua = static_cast<std::size_t>(a);
      const double ih = 1.0 / g.spacing[a];
      if (live(face_kind(g, mask, i, a))) s += F.c[ua][i] * ih;
      const long j = neighbour(g, i, a, -1);
      if (j >= 0 && live(face_kind(g, mask, static_cast<std::size_t>(j), a))) s -= F.c[ua][static_cast<std::size_t>(j)] * ih;
    }
    out.v[i] = s;
  }
  return out;
}

VectorField face_gradient(const ScalarField& p, const Mask& mask) {
  const Grid& g = p.grid;
  VectorField G(g);
  const std::size_t N = g.size();
#pragma omp parallel for schedule(static) if (default_exec() == Exec::omp)
  for (std::size_t i = 0; i < N; ++i) {
    for (int a = 0; a < g.ndim; ++a) {
      if (face_kind(g, mask, i, a) != FaceKind::interior) continue;
      const auto j = static_cast<std::size_t>(neighbour(g, i, a, +1));
      G.c[static_cast<std::size_t>(a)][i] = (p.v[j] - p.v[i]) / g.spacing[a];
    }
  }
  return G;
}

double face_inner(const VectorField& x, const VectorField& y, const Mask& mask) {
  const Grid& g = x.grid;
  const std::size_t N = g.size();
  std::vector<double> buf(N, 0.0);
#pragma omp parallel for schedule(static) if (default_exec() == Exec::omp)
  for (std::size_t i = 0; i < N; ++i) {
    double s = 0.0;
    for (int a = 0; a < g.ndim; ++a)
      if (face_kind(g, mask, i, a) != FaceKind::none)
        s += x.c[static_cast<std::size_t>(a)][i] * y.c[static_cast<std::size_t>(a)][i];
    buf[i] = s;
  }
  return tree_sum(buf) * g.cell_volume();
}

double face_max(const VectorField& x, const Mask& mask) {
  const Grid& g = x.grid;
  double m = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    for (int a = 0; a < g.ndim; ++a)
      if (face_kind(g, mask, i, a) != FaceKind::none) m = std::max(m, std::fabs(x.c[static_cast<std::size_t>(a)][i]));
  return m;
}

VectorField faces_to_nodes(const VectorField& F, const Mask& mask) {
  const Grid& g = F.grid;
  VectorField out(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!mask[i]) continue;
    for (int a = 0; a < g.ndim; ++a) {
      const auto ua = static_cast<std::size_t>(a);
      double s = 0.0;
      int k = 0;
      if (face_kind(g, mask, i, a) != FaceKind::none) {
        s += F.c[ua][i];
        ++k;
      }
      const long j = neighbour(g, i, a, -1);
      if (j >= 0 && face_kind(g, mask, static_cast<std::size_t>(j), a) != FaceKind::none) {
        s += F.c[ua][static_cast<std::size_t>(j)];
        ++k;
      }
      out.c[ua][i] = k > 0 ? s / k : 0.0;
    }
  }
  return out;
}

double face_curl_max(const VectorField& F, const Mask& mask) {
  const Grid& g = F.grid;
  double m = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!mask[i]) continue;
    for (int a = 0; a < g.ndim; ++a)
      for (int b = a + 1; b < g.ndim; ++b) {
        const long ia = neighbour(g, i, a, +1), ib = neighbour(g, i, b, +1);
        if (ia < 0 || ib < 0) continue;
        const long iab = neighbour(g, static_cast<std::size_t>(ia), b, +1);
        if (iab < 0) continue;
        if (!mask[static_cast<std::size_t>(ia)] || !mask[static_cast<std::size_t>(ib)] ||
            !mask[static_cast<std::size_t>(iab)])
          continue;
        const auto ua = static_cast<std::size_t>(a), ub = static_cast<std::size_t>(b);
        const double c = (F.c[ub][static_cast<std::size_t>(ia)] - F.c[ub][i]) / g.spacing[a] -
                         (F.c[ua][static_cast<std::size_t>(ib)] - F.c[ua][i]) / g.spacing[b];
        m = std::max(m, std::fabs(c));
      }
  }
  return m;
}

// ---- masked Neumann solve ----

MaskedLaplacian::MaskedLaplacian(const Grid& g, const Mask& mask) : deg_(2 * g.ndim) {
  std::vector<long> compact(g.size(), -1);
  for (std::size_t i = 0; i < g.size(); ++i)
    if (mask[i]) {
      compact[i] = static_cast<long>(nodes_.size());
      nodes_.push_back(i);
    }
  const std::size_t n = nodes_.size(), d = static_cast<std::size_t>(deg_);
  nbr_.assign(n * d, -1);
  w_.assign(n * d, 0.0);
  diag_.assign(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = nodes_[k];
    for (int a = 0; a < g.ndim; ++a)
      for (int s = 0; s < 2; ++s) {
        const long j = neighbour(g, i, a, s == 0 ? +1 : -1);
        if (j < 0 || !mask[static_cast<std::size_t>(j)]) continue;
        const std::size_t slot = k * d + static_cast<std::size_t>(2 * a + s);
        nbr_[slot] = compact[static_cast<std::size_t>(j)];
        w_[slot] = 1.0 / (g.spacing[a] * g.spacing[a]);
        diag_[k] += w_[slot];
      }
  }
}

void MaskedLaplacian::apply(const double* x, double* y, Exec exec) const {
  const std::size_t n = nodes_.size(), d = static_cast<std::size_t>(deg_);
#pragma omp parallel for schedule(static) if (exec == Exec::omp)
  for (std::size_t k = 0; k < n; ++k) {
    double s = 0.0;
    for (std::size_t t = 0; t < d; ++t) {
      const long j = nbr_[k * d + t];
      if (j >= 0) s += w_[k * d + t] * (x[k] - x[static_cast<std::size_t>(j)]);
    }
    y[k] = s;
  }
}

namespace {

// Connected components of the masked nodes through interior faces.
std::vector<int> components(const Grid& g, const std::vector<std::size_t>& nodes, const Mask& mask, int& count) {
  std::vector<long> compact(g.size(), -1);
  for (std::size_t k = 0; k < nodes.size(); ++k) compact[nodes[k]] = static_cast<long>(k);
  std::vector<int> label(nodes.size(), -1);
  count = 0;
  for (std::size_t s = 0; s < nodes.size(); ++s) {
    if (label[s] >= 0) continue;
    std::deque<std::size_t> q{s};
    label[s] = count;
    while (!q.empty()) {
      const std::size_t k = q.front();
      q.pop_front();
      for (int a = 0; a < g.ndim; ++a)
        for (int dir : {1, -1}) {
          const long j = neighbour(g, nodes[k], a, dir);
          if (j < 0 || !mask[static_cast<std::size_t>(j)]) continue;
          const auto c = static_cast<std::size_t>(compact[static_cast<std::size_t>(j)]);
          if (label[c] < 0) {
            label[c] = count;
            q.push_back(c);
          }
        }
    }
    ++count;
  }
  return label;
}

void remove_component_means(std::vector<double>& x, const std::vector<int>& label, int count) {
  std::vector<double> sum(static_cast<std::size_t>(count), 0.0);
  std::vector<long> cnt(static_cast<std::size_t>(count), 0);
  for (std::size_t k = 0; k < x.size(); ++k) {
    sum[static_cast<std::size_t>(label[k])] += x[k];
    ++cnt[static_cast<std::size_t>(label[k])];
  }
  for (std::size_t k = 0; k < x.size(); ++k) {
    const auto c = static_cast<std::size_t>(label[k]);
    x[k] -= sum[c] / static_cast<double>(cnt[c]);
  }
}

double dot(const std::vector<double>& a, const std::vector<double>& b, std::vector<double>& buf, Exec exec) {
  const std::size_t n = a.size();
#pragma omp parallel for schedule(static) if (exec == Exec::omp)
  for (std::size_t k = 0; k < n; ++k) buf[k] = a[k] * b[k];
  return tree_sum(buf.data(), n, exec);
}

}  // namespace

std::pair<ScalarField, NeumannSolveReport> solve_neumann(const Grid& grid, const Mask& mask, const ScalarField& g_rhs,
                                                         const VectorField& g_bdry, const NeumannOptions& opt) {
  if (mask.size() != grid.size() || g_rhs.v.size() != grid.size()) throw ConfigError("Neumann data size mismatch");
  require_finite(g_rhs);
  require_finite(g_bdry);
  const MaskedLaplacian A(grid, mask);
  const std::size_t n = A.size();
  NeumannSolveReport rep;
  ScalarField p(grid);
  if (n == 0) return {p, rep};

  // Boundary fluxes are known: move them to the right-hand side.
  VectorField bonly(grid);
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (int a = 0; a < grid.ndim; ++a)
      if (face_kind(grid, mask, i, a) == FaceKind::boundary)
        bonly.c[static_cast<std::size_t>(a)][i] = g_bdry.c[static_cast<std::size_t>(a)][i];
  const ScalarField bdiv = face_divergence(bonly, mask, false);

  const Exec ex = opt.exec;
  std::vector<double> b(n), buf(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = A.nodes()[k];
    b[k] = -(g_rhs.v[i] - bdiv.v[i]);
    buf[k] = -b[k];
  }
  rep.defect = tree_sum(buf.data(), n, ex) * grid.cell_volume();
  int ncomp = 0;
  const auto label = components(grid, A.nodes(), mask, ncomp);
  remove_component_means(b, label, ncomp);

  std::vector<double> x(n, 0.0), r = b, z(n), d(n), Ad(n);
  const auto& diag = A.diagonal();
  std::optional<AggregationMultigrid> mg;
  if (opt.precond == Preconditioner::multigrid) mg.emplace(grid, mask);
  auto precondition = [&]() {
    if (mg) {
      mg->apply(r.data(), z.data(), ex);
      remove_component_means(z, label, ncomp);
      return;
    }
#pragma omp parallel for schedule(static) if (ex == Exec::omp)
    for (std::size_t k = 0; k < n; ++k) z[k] = diag[k] > 0.0 ? r[k] / diag[k] : 0.0;
  };
  const double bnorm = std::sqrt(dot(b, b, buf, ex));
  if (bnorm == 0.0) {
    rep.converged = true;
    return {p, rep};
  }
  precondition();
  d = z;
  double rz = dot(r, z, buf, ex);
  double rn = bnorm;
  int it = 0;
  for (; it < opt.max_iter; ++it) {
    A.apply(d.data(), Ad.data(), ex);
    const double dAd = dot(d, Ad, buf, ex);
    if (!(dAd > 0.0)) break;
    const double alpha = rz / dAd;
#pragma omp parallel for schedule(static) if (ex == Exec::omp)
    for (std::size_t k = 0; k < n; ++k) {
      x[k] += alpha * d[k];
      r[k] -= alpha * Ad[k];
    }
    remove_component_means(r, label, ncomp);
    rn = std::sqrt(dot(r, r, buf, ex));
    if (rn <= opt.tol * bnorm) {
      ++it;
      rep.converged = true;
      break;
    }
    precondition();
    const double rz_new = dot(r, z, buf, ex);
    const double beta = rz_new / rz;
    rz = rz_new;
#pragma omp parallel for schedule(static) if (ex == Exec::omp)
    for (std::size_t k = 0; k < n; ++k) d[k] = z[k] + beta * d[k];
  }
  remove_component_means(x, label, ncomp);
  rep.iterations = it;
  rep.residual = rn / bnorm;
  for (std::size_t k = 0; k < n; ++k) p.v[A.nodes()[k]] = x[k];
  return {p, rep};
}

std::pair<ScalarField, NeumannSolveReport> solve_neumann(const DomainSpec& spec, const Grid& grid,
                                                         const ScalarField& g_rhs, const VectorField& g_bdry,
                                                         const NeumannOptions& opt) {
  return solve_neumann(grid, domain_mask(spec, grid), g_rhs, g_bdry, opt);
}

DecompositionResult project_domain(const VectorField& f, const Mask& mask, const NeumannOptions& opt) {
  const Grid& g = f.grid;
  if (f.ncomp() != g.ndim) throw ConfigError("field needs ndim components");
  const ScalarField div = face_divergence(f, mask, false);
  auto [p, rep] = solve_neumann(g, mask, div, f, opt);
  DecompositionResult r;
  r.method = "neumann";
  r.solve = rep;
  const VectorField Gp = face_gradient(p, mask);
  r.f0 = VectorField(g);
  r.grad_p = VectorField(g);
  for (std::size_t i = 0; i < g.size(); ++i)
    for (int a = 0; a < g.ndim; ++a) {
      const auto ua = static_cast<std::size_t>(a);
      switch (face_kind(g, mask, i, a)) {
        case FaceKind::interior:
          r.grad_p.c[ua][i] = Gp.c[ua][i];
          r.f0.c[ua][i] = f.c[ua][i] - Gp.c[ua][i];
          break;
        case FaceKind::boundary:
          r.grad_p.c[ua][i] = f.c[ua][i];
          break;
        case FaceKind::none:
          break;
      }
    }
  r.p = std::move(p);
  const double ff = face_inner(f, f, mask);
  r.diag.orthogonality = ff > 0.0 ? std::fabs(face_inner(r.f0, r.grad_p, mask)) / ff : 0.0;
  double em = 0.0, bm = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    for (int a = 0; a < g.ndim; ++a) {
      const auto ua = static_cast<std::size_t>(a);
      const FaceKind k = face_kind(g, mask, i, a);
      if (k == FaceKind::none) continue;
      em = std::max(em, std::fabs(r.f0.c[ua][i] + r.grad_p.c[ua][i] - f.c[ua][i]));
      if (k == FaceKind::boundary) bm = std::max(bm, std::fabs(r.f0.c[ua][i]));
    }
  const double fm = face_max(f, mask);
  r.diag.reconstruction_error = fm > 0.0 ? em / fm : em;
  r.diag.normal_trace = fm > 0.0 ? bm / fm : bm;
  const double d0 = lp_norm(face_divergence(r.f0, mask, false), 2.0, &mask);
  const double df = lp_norm(div, 2.0, &mask);
  r.diag.div_residual = df > 0.0 ? d0 / df : d0;
  return r;
}

DecompositionResult project_domain(const VectorField& f, const DomainSpec& spec, const NeumannOptions& opt) {
  return project_domain(f, domain_mask(spec, f.grid), opt);
}

// ---- classification ----

std::string class_name(FieldClass c) {
  switch (c) {
    case FieldClass::solenoidal: return "solenoidal";
    case FieldClass::gradient: return "gradient";
    case FieldClass::mixed: return "mixed";
  }
  return "mixed";
}

Classification characterize_subspaces(const VectorField& v, const DomainSpec& spec, double tol, std::uint64_t seed) {
  const Grid& g = v.grid;
  const Mask mask = domain_mask(spec, g);
  Classification c;
  const double scale = std::sqrt(face_inner(v, v, mask));
  const double vmax = face_max(v, mask);
  if (scale == 0.0) {
    c.kind = FieldClass::solenoidal;
    c.agrees = true;
    c.potential_finite = true;
    return c;
  }
  // Divergence relative to the same stencil applied to |v|.
  VectorField av = v;
  for (auto& comp : av.c)
    for (auto& x : comp) x = std::fabs(x);
  const ScalarField dv = face_divergence(v, mask, true);
  ScalarField dabs(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!mask[i]) continue;
    double s = 0.0;
    for (int a = 0; a < g.ndim; ++a) {
      const auto ua = static_cast<std::size_t>(a);
      if (face_kind(g, mask, i, a) == FaceKind::interior) s += av.c[ua][i] / g.spacing[a];
      const long j = neighbour(g, i, a, -1);
      if (j >= 0 && face_kind(g, mask, static_cast<std::size_t>(j), a) == FaceKind::interior)
        s += av.c[ua][static_cast<std::size_t>(j)] / g.spacing[a];
    }
    dabs.v[i] = s;
  }
  const double dnorm = lp_norm(dabs, 2.0, &mask);
  c.div_rel = dnorm > 0.0 ? lp_norm(dv, 2.0, &mask) / dnorm : 0.0;
  double bm = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    for (int a = 0; a < g.ndim; ++a)
      if (face_kind(g, mask, i, a) == FaceKind::boundary)
        bm = std::max(bm, std::fabs(v.c[static_cast<std::size_t>(a)][i]));
  c.trace_rel = bm / vmax;
  c.curl_rel = face_curl_max(v, mask) * g.max_spacing() / vmax;

  if (c.div_rel <= tol && c.trace_rel <= tol) c.kind = FieldClass::solenoidal;
  else if (c.curl_rel <= tol) c.kind = FieldClass::gradient;
  else c.kind = FieldClass::mixed;

  NeumannOptions opt;
  opt.tol = 1e-12;
  const DecompositionResult dec = project_domain(v, mask, opt);
  c.f0_rel = std::sqrt(face_inner(dec.f0, dec.f0, mask)) / scale;
  c.gp_rel = std::sqrt(face_inner(dec.grad_p, dec.grad_p, mask)) / scale;
  constexpr double kAgree = 1e-6;
  switch (c.kind) {
    case FieldClass::solenoidal: c.agrees = c.gp_rel <= kAgree; break;
    case FieldClass::gradient: c.agrees = c.f0_rel <= kAgree; break;
    case FieldClass::mixed: c.agrees = c.f0_rel > kAgree && c.gp_rel > kAgree; break;
  }

  // Local integrability of the potential on random sub-boxes.
  c.potential_finite = true;
  const int n = g.ndim;
  Rng rng(seed);
  for (double r : {2.0, 2.0 * n}) {
    double worst = 0.0;
    for (int b = 0; b < 8; ++b) {
      Vec lo{0, 0, 0}, hi{0, 0, 0};
      for (int a = 0; a < n; ++a) {
        const double L = g.length(a), x0 = g.origin[a] - 0.5 * g.spacing[a];
        lo[a] = x0 + rng.uniform(0.0, 0.75) * L;
        hi[a] = lo[a] + 0.25 * L;
      }
      Mask sub = mask;
      for (std::size_t i = 0; i < g.size(); ++i) {
        const Vec x = g.node(i);
        for (int a = 0; a < n; ++a)
          if (x[a] < lo[a] || x[a] > hi[a]) sub[i] = 0;
      }
      const double val = lp_norm(dec.p, r, &sub);
      if (!std::isfinite(val)) c.potential_finite = false;
      worst = std::max(worst, val);
    }
    c.potential_lr.push_back(worst);
  }
  return c;
}

}  // namespace vbmo
