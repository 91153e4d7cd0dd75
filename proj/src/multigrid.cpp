#include "multigrid.hpp"

#include <algorithm>

namespace vbmo {

namespace {

// Half the Galerkin product of piecewise-constant aggregation equals the
// rediscretized operator on a uniform grid; without it the coarse correction
// is too weak by that factor in every dimension.
constexpr double kCoarseScale = 0.5;
constexpr double kOmega = 0.8;
constexpr int kSweeps = 2;
constexpr std::size_t kCoarsest = 128;

std::size_t flat_of(const std::array<std::size_t, 3>& shape, const std::array<std::size_t, 3>& c) {
  return (c[0] * shape[1] + c[1]) * shape[2] + c[2];
}

std::array<std::size_t, 3> coords_of(const std::array<std::size_t, 3>& shape, std::size_t idx) {
  return {idx / (shape[1] * shape[2]), (idx / shape[2]) % shape[1], idx % shape[2]};
}

}  // namespace

AggregationMultigrid::AggregationMultigrid(const Grid& g, const Mask& mask) : ndim_(g.ndim) {
  const int deg = 2 * g.ndim;
  Level fine;
  fine.deg = deg;
  fine.shape = g.shape;
  fine.periodic = g.periodic;
  std::vector<long> compact(g.size(), -1);
  for (std::size_t i = 0; i < g.size(); ++i)
    if (mask[i]) {
      compact[i] = static_cast<long>(fine.flat.size());
      fine.flat.push_back(i);
    }
  fine.n = fine.flat.size();
  const auto d = static_cast<std::size_t>(deg);
  fine.nbr.assign(fine.n * d, -1);
  fine.w.assign(fine.n * d, 0.0);
  fine.diag.assign(fine.n, 0.0);
  for (std::size_t k = 0; k < fine.n; ++k) {
    const auto c = g.unravel(fine.flat[k]);
    for (int a = 0; a < g.ndim; ++a) {
      const auto ua = static_cast<std::size_t>(a);
      const std::size_t N = g.shape[ua];
      for (int s = 0; s < 2; ++s) {
        auto cn = c;
        if (s == 0) {
          if (c[ua] + 1 < N) cn[ua] = c[ua] + 1;
          else if (g.periodic[ua] && N > 1) cn[ua] = 0;
          else continue;
        } else {
          if (c[ua] > 0) cn[ua] = c[ua] - 1;
          else if (g.periodic[ua] && N > 1) cn[ua] = N - 1;
          else continue;
        }
        const long j = compact[flat_of(g.shape, cn)];
        if (j < 0) continue;
        const std::size_t slot = k * d + static_cast<std::size_t>(2 * a + s);
        fine.nbr[slot] = j;
        fine.w[slot] = 1.0 / (g.spacing[a] * g.spacing[a]);
        fine.diag[k] += fine.w[slot];
      }
    }
  }
  levels_.push_back(std::move(fine));

  while (levels_.back().n > kCoarsest && levels_.size() < 16) {
    Level& F = levels_.back();
    Level C;
    C.deg = deg;
    C.periodic = F.periodic;
    for (std::size_t a = 0; a < 3; ++a) C.shape[a] = (F.shape[a] + 1) / 2;
    if (C.shape == F.shape) break;
    std::vector<long> cidx(C.shape[0] * C.shape[1] * C.shape[2], -1);
    std::vector<std::size_t> agg(F.n);
    for (std::size_t k = 0; k < F.n; ++k) {
      auto c = coords_of(F.shape, F.flat[k]);
      for (auto& x : c) x /= 2;
      agg[k] = flat_of(C.shape, c);
      cidx[agg[k]] = 0;
    }
    for (std::size_t q = 0; q < cidx.size(); ++q)
      if (cidx[q] == 0) {
        cidx[q] = static_cast<long>(C.flat.size());
        C.flat.push_back(q);
      }
    C.n = C.flat.size();
    F.parent.resize(F.n);
    std::vector<std::size_t> count(C.n + 1, 0);
    for (std::size_t k = 0; k < F.n; ++k) {
      F.parent[k] = cidx[agg[k]];
      ++count[static_cast<std::size_t>(F.parent[k]) + 1];
    }
    for (std::size_t q = 0; q < C.n; ++q) count[q + 1] += count[q];
    C.child_start = count;
    C.children.resize(F.n);
    std::vector<std::size_t> fill(count.begin(), count.end() - 1);
    for (std::size_t k = 0; k < F.n; ++k) C.children[fill[static_cast<std::size_t>(F.parent[k])]++] = k;

    C.nbr.assign(C.n * d, -1);
    C.w.assign(C.n * d, 0.0);
    C.diag.assign(C.n, 0.0);
    for (std::size_t q = 0; q < C.n; ++q)
      for (std::size_t t = C.child_start[q]; t < C.child_start[q + 1]; ++t) {
        const std::size_t k = C.children[t];
        for (std::size_t slot = 0; slot < d; ++slot) {
          const long j = F.nbr[k * d + slot];
          if (j < 0) continue;
          const long J = F.parent[static_cast<std::size_t>(j)];
          if (J == static_cast<long>(q)) continue;
          C.nbr[q * d + slot] = J;
          C.w[q * d + slot] += kCoarseScale * F.w[k * d + slot];
        }
      }
    for (std::size_t q = 0; q < C.n; ++q)
      for (std::size_t slot = 0; slot < d; ++slot) C.diag[q] += C.w[q * d + slot];
    levels_.push_back(std::move(C));
  }
  for (auto& L : levels_) L.flat.clear();
}

void AggregationMultigrid::apply_operator(const Level& L, const double* x, double* y, Exec exec) const {
  const auto d = static_cast<std::size_t>(L.deg);
  const std::size_t n = L.n;
#pragma omp parallel for schedule(static) if (exec == Exec::omp)
  for (std::size_t k = 0; k < n; ++k) {
    double s = 0.0;
    for (std::size_t t = 0; t < d; ++t) {
      const long j = L.nbr[k * d + t];
      if (j >= 0) s += L.w[k * d + t] * (x[k] - x[static_cast<std::size_t>(j)]);
    }
    y[k] = s;
  }
}

// One damped Jacobi sweep; the same sweep before and after the coarse
// correction keeps the cycle symmetric.
void AggregationMultigrid::smooth(const Level& L, const double* b, double* x, double* tmp, Exec exec) const {
  apply_operator(L, x, tmp, exec);
  const std::size_t n = L.n;
#pragma omp parallel for schedule(static) if (exec == Exec::omp)
  for (std::size_t k = 0; k < n; ++k)
    if (L.diag[k] > 0.0) x[k] += kOmega * (b[k] - tmp[k]) / L.diag[k];
}

void AggregationMultigrid::vcycle(std::size_t l, const double* b, double* x, Exec exec) const {
  const Level& L = levels_[l];
  const std::size_t n = L.n;
  std::vector<double> tmp(n);
  std::fill(x, x + n, 0.0);
  if (l + 1 == levels_.size()) {
    std::size_t extent = 1;
    for (auto s : L.shape) extent = std::max(extent, s);
    const int sweeps = static_cast<int>(2 * extent * extent + 20);
    for (int s = 0; s < sweeps; ++s) smooth(L, b, x, tmp.data(), exec);
    return;
  }
  for (int s = 0; s < kSweeps; ++s) smooth(L, b, x, tmp.data(), exec);
  apply_operator(L, x, tmp.data(), exec);
  const Level& C = levels_[l + 1];
  std::vector<double> bc(C.n), xc(C.n);
#pragma omp parallel for schedule(static) if (exec == Exec::omp)
  for (std::size_t q = 0; q < C.n; ++q) {
    double s = 0.0;
    for (std::size_t t = C.child_start[q]; t < C.child_start[q + 1]; ++t) {
      const std::size_t k = C.children[t];
      s += b[k] - tmp[k];
    }
    bc[q] = s;
  }
  vcycle(l + 1, bc.data(), xc.data(), exec);
#pragma omp parallel for schedule(static) if (exec == Exec::omp)
  for (std::size_t k = 0; k < n; ++k) x[k] += xc[static_cast<std::size_t>(L.parent[k])];
  for (int s = 0; s < kSweeps; ++s) smooth(L, b, x, tmp.data(), exec);
}

void AggregationMultigrid::apply(const double* r, double* z, Exec exec) const {
  if (levels_.empty()) return;
  vcycle(0, r, z, exec);
}

}  // namespace vbmo
