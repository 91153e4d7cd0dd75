#include "vbmo/whitney.hpp"

#include <algorithm>
#include <cstring>
#include <deque>
#include <map>

namespace vbmo {

std::size_t CellSet::size() const {
  std::size_t s = 1;
  for (int a = 0; a < ndim; ++a) s *= static_cast<std::size_t>(n());
  return s;
}

std::size_t CellSet::index(const std::array<long, 3>& c) const {
  std::size_t i = 0;
  for (int a = 0; a < ndim; ++a) i = i * static_cast<std::size_t>(n()) + static_cast<std::size_t>(c[a]);
  return i;
}

std::array<long, 3> CellSet::unravel(std::size_t i) const {
  std::array<long, 3> c{0, 0, 0};
  const auto N = static_cast<std::size_t>(n());
  for (int a = ndim - 1; a >= 0; --a) {
    c[a] = static_cast<long>(i % N);
    i /= N;
  }
  return c;
}

Grid CellSet::grid() const {
  Vec hi = lo;
  for (int a = 0; a < ndim; ++a) hi[a] = lo[a] + length;
  return Grid::box(ndim, static_cast<std::size_t>(n()), lo, hi);
}

std::size_t CellSet::count() const {
  return static_cast<std::size_t>(std::count_if(cells.begin(), cells.end(), [](std::uint8_t c) { return c != 0; }));
}

CellSet cell_set(int ndim, int depth, const Vec& lo, double length, const std::function<bool(const Vec&)>& inside,
                 bool box_is_complement) {
  if (ndim < 2 || ndim > 3 || depth < 1 || depth > 12) throw ConfigError("cell set needs n in {2,3} and depth 1..12");
  CellSet s;
  s.ndim = ndim;
  s.depth = depth;
  s.lo = lo;
  s.length = length;
  s.box_is_complement = box_is_complement;
  s.cells.assign(s.size(), 0);
  const Grid g = s.grid();
  for (std::size_t i = 0; i < s.size(); ++i) s.cells[i] = inside(g.node(i)) ? 1 : 0;
  return s;
}

CellSet cell_set(const DomainSpec& spec, int depth, const Vec& lo, double length) {
  return cell_set(spec.ndim, depth, lo, length, [&](const Vec& x) { return spec.inside(x); });
}

CellSet complement_in_box(const CellSet& d) {
  CellSet c = d;
  for (auto& v : c.cells) v = v ? 0 : 1;
  c.box_is_complement = false;
  return c;
}

namespace shapes {

CellSet cube(int ndim, int depth) {
  return cell_set(ndim, depth, {0, 0, 0}, 1.0, [ndim](const Vec& x) {
    for (int a = 0; a < ndim; ++a)
      if (x[a] <= 0.25 || x[a] >= 0.75) return false;
    return true;
  });
}

CellSet ball(int ndim, int depth) {
  return cell_set(ndim, depth, {0, 0, 0}, 1.0, [ndim](const Vec& x) {
    double s = 0.0;
    for (int a = 0; a < ndim; ++a) s += (x[a] - 0.5) * (x[a] - 0.5);
    return s < 0.16;
  });
}

CellSet l_shape(int depth) {
  return cell_set(2, depth, {0, 0, 0}, 1.0, [](const Vec& x) {
    const bool sq = x[0] > 0.1 && x[0] < 0.9 && x[1] > 0.1 && x[1] < 0.9;
    return sq && !(x[0] >= 0.5 && x[1] >= 0.5);
  });
}

CellSet annulus(int depth) {
  return cell_set(2, depth, {0, 0, 0}, 1.0, [](const Vec& x) {
    const double r2 = (x[0] - 0.5) * (x[0] - 0.5) + (x[1] - 0.5) * (x[1] - 0.5);
    return r2 > 0.04 && r2 < 0.2025;
  });
}

CellSet corridor_pair(int depth, double width) {
  return cell_set(2, depth, {0, 0, 0}, 1.0, [width](const Vec& x) {
    const bool left = x[0] > 0.1 && x[0] < 0.4 && x[1] > 0.3 && x[1] < 0.7;
    const bool right = x[0] > 0.6 && x[0] < 0.9 && x[1] > 0.3 && x[1] < 0.7;
    const bool corridor = x[0] >= 0.4 && x[0] <= 0.6 && std::fabs(x[1] - 0.5) < 0.5 * width;
    return left || right || corridor;
  });
}

}  // namespace shapes

bool cube_less(const WhitneyCube& a, const WhitneyCube& b) {
  if (a.level != b.level) return a.level < b.level;
  return a.coords < b.coords;
}

namespace {

constexpr long kFar = std::numeric_limits<long>::max() / 4;

// Corner lattice of (N+1)^n points, row-major.
struct Corners {
  int ndim;
  long L;
  std::size_t size() const {
    std::size_t s = 1;
    for (int a = 0; a < ndim; ++a) s *= static_cast<std::size_t>(L);
    return s;
  }
  std::size_t stride(int axis) const {
    std::size_t s = 1;
    for (int a = ndim - 1; a > axis; --a) s *= static_cast<std::size_t>(L);
    return s;
  }
  std::size_t index(const std::array<long, 3>& c) const {
    std::size_t i = 0;
    for (int a = 0; a < ndim; ++a) i = i * static_cast<std::size_t>(L) + static_cast<std::size_t>(c[a]);
    return i;
  }
};

}  // namespace

std::vector<long> complement_edt(const CellSet& set) {
  const long N = set.n();
  Corners cn{set.ndim, N + 1};
  std::vector<long> f(cn.size(), kFar);
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (set.cells[i]) continue;
    const auto c = set.unravel(i);
    // All 2^n corners of a complement cell.
    for (int m = 0; m < (1 << set.ndim); ++m) {
      std::array<long, 3> p{0, 0, 0};
      for (int a = 0; a < set.ndim; ++a) p[a] = c[a] + ((m >> a) & 1);
      f[cn.index(p)] = 0;
    }
  }
  if (set.box_is_complement) {
    for (std::size_t i = 0; i < cn.size(); ++i) {
      std::size_t r = i;
      for (int a = set.ndim - 1; a >= 0; --a) {
        const long x = static_cast<long>(r % static_cast<std::size_t>(cn.L));
        r /= static_cast<std::size_t>(cn.L);
        if (x == 0 || x == N) f[i] = 0;
      }
    }
  }
  // Separable exact squared transform: quadratic per line, fine at these sizes.
  for (int axis = 0; axis < set.ndim; ++axis) {
    const std::size_t st = cn.stride(axis);
    const std::size_t L = static_cast<std::size_t>(cn.L);
    const std::size_t lines = cn.size() / L;
#pragma omp parallel for schedule(static) if (default_exec() == Exec::omp)
    for (std::size_t line = 0; line < lines; ++line) {
      const std::size_t outer = line / st, inner = line % st;
      const std::size_t base = outer * st * L + inner;
      std::vector<long> in(L), out(L, kFar);
      for (std::size_t t = 0; t < L; ++t) in[t] = f[base + t * st];
      for (std::size_t p = 0; p < L; ++p) {
        long best = kFar;
        for (std::size_t q = 0; q < L; ++q) {
          if (in[q] >= kFar) continue;
          const long d = static_cast<long>(p) - static_cast<long>(q);
          best = std::min(best, in[q] + d * d);
        }
        out[p] = best;
      }
      for (std::size_t t = 0; t < L; ++t) f[base + t * st] = out[t];
    }
  }
  return f;
}

namespace {

// Minimum of the corner transform over each closed dyadic cube of a level.
std::vector<long> level_minimum(const CellSet& set, const std::vector<long>& edt, int level) {
  const long N = set.n();
  const long s = N >> level;
  const long c = 1L << level;
  std::vector<long> cur = edt;
  std::array<long, 3> dims{1, 1, 1};
  for (int a = 0; a < set.ndim; ++a) dims[a] = N + 1;
  for (int axis = 0; axis < set.ndim; ++axis) {
    std::array<long, 3> nd = dims;
    nd[axis] = c;
    std::vector<long> next(static_cast<std::size_t>(nd[0] * nd[1] * nd[2]), kFar);
    for (long i = 0; i < nd[0]; ++i)
      for (long j = 0; j < nd[1]; ++j)
        for (long k = 0; k < nd[2]; ++k) {
          std::array<long, 3> o{i, j, k};
          long best = kFar;
          for (long t = 0; t <= s; ++t) {
            std::array<long, 3> src = o;
            src[axis] = o[axis] * s + t;
            best = std::min(best, cur[static_cast<std::size_t>((src[0] * dims[1] + src[1]) * dims[2] + src[2])]);
          }
          next[static_cast<std::size_t>((i * nd[1] + j) * nd[2] + k)] = best;
        }
    cur.swap(next);
    dims = nd;
  }
  return cur;
}

std::size_t level_index(int ndim, long c, const std::array<long, 3>& q) {
  std::size_t i = 0;
  for (int a = 0; a < 3; ++a) i = i * static_cast<std::size_t>(a < ndim ? c : 1) + static_cast<std::size_t>(q[a]);
  return i;
}

}  // namespace

WhitneyDecomposition whitney_decompose(const CellSet& set) {
  if (set.cells.size() != set.size()) throw ConfigError("cell set size mismatch");
  if (set.count() == 0) throw PreconditionError("empty open set");
  if (set.count() == set.size() && !set.box_is_complement)
    throw PreconditionError("open set has no complement; the trivial cover is refused");
  const int n = set.ndim;
  const long N = set.n();
  const auto edt = complement_edt(set);
  std::vector<std::vector<long>> pyr(static_cast<std::size_t>(set.depth + 1));
  for (int l = 0; l <= set.depth; ++l) pyr[static_cast<std::size_t>(l)] = level_minimum(set, edt, l);

  WhitneyDecomposition w;
  w.set = set;
  struct Item {
    int level;
    std::array<long, 3> q;
  };
  std::vector<Item> stack{{0, {0, 0, 0}}};
  while (!stack.empty()) {
    const Item it = stack.back();
    stack.pop_back();
    const long s = N >> it.level;
    const long m = pyr[static_cast<std::size_t>(it.level)][level_index(n, 1L << it.level, it.q)];
    const long lo = n * s * s, hi = 16 * n * s * s;
    if (m >= lo && m <= hi) {
      WhitneyCube cube;
      cube.level = it.level;
      cube.coords = it.q;
      cube.side = set.length * std::ldexp(1.0, -it.level);
      cube.dist2 = m;
      cube.distance = std::sqrt(static_cast<double>(m)) * set.cell();
      w.cubes.push_back(cube);
      continue;
    }
    if (it.level == set.depth) {
      if (set.cells[set.index(it.q)]) w.collar.push_back(set.index(it.q));
      continue;
    }
    for (int c = (1 << n) - 1; c >= 0; --c) {
      Item ch{it.level + 1, {0, 0, 0}};
      for (int a = 0; a < n; ++a) ch.q[a] = 2 * it.q[a] + ((c >> (n - 1 - a)) & 1);
      stack.push_back(ch);
    }
  }
  std::sort(w.cubes.begin(), w.cubes.end(), cube_less);
  std::sort(w.collar.begin(), w.collar.end());

  w.owner.assign(set.size(), -1);
  for (std::size_t id = 0; id < w.cubes.size(); ++id) {
    const auto& q = w.cubes[id];
    const long s = N >> q.level;
    std::array<long, 3> lo{0, 0, 0}, hi{1, 1, 1};
    for (int a = 0; a < n; ++a) {
      lo[a] = q.coords[a] * s;
      hi[a] = lo[a] + s;
    }
    for (long i = lo[0]; i < hi[0]; ++i)
      for (long j = lo[1]; j < hi[1]; ++j)
        for (long k = lo[2]; k < hi[2]; ++k) {
          const std::size_t idx = set.index({i, j, k});
          if (w.owner[idx] < 0) w.owner[idx] = static_cast<int>(id);
          else w.owner[idx] = -2;  // overlap; reported by check_whitney
        }
  }

  w.adjacency.assign(w.cubes.size(), {});
#pragma omp parallel for schedule(dynamic, 16) if (default_exec() == Exec::omp)
  for (std::size_t id = 0; id < w.cubes.size(); ++id) {
    const auto& q = w.cubes[id];
    const long s = N >> q.level;
    std::array<long, 3> lo{0, 0, 0}, hi{0, 0, 0};
    for (int a = 0; a < n; ++a) {
      lo[a] = std::max(0L, q.coords[a] * s - 1);
      hi[a] = std::min(N - 1, q.coords[a] * s + s);
    }
    std::vector<int> nb;
    for (long i = lo[0]; i <= hi[0]; ++i)
      for (long j = lo[1]; j <= hi[1]; ++j)
        for (long k = lo[2]; k <= hi[2]; ++k) {
          const std::array<long, 3> c{i, j, k};
          bool shell = false;
          for (int a = 0; a < n; ++a)
            if (c[a] < q.coords[a] * s || c[a] >= q.coords[a] * s + s) shell = true;
          if (!shell) continue;
          const int o = w.owner[set.index(c)];
          if (o >= 0) nb.push_back(o);
        }
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    w.adjacency[id] = std::move(nb);
  }
  return w;
}

WhitneyCheck check_whitney(const WhitneyDecomposition& w) {
  WhitneyCheck r;
  const CellSet& set = w.set;
  const int n = set.ndim;
  const long N = set.n();
  const auto edt = complement_edt(set);
  Corners cn{n, N + 1};
  for (const auto& q : w.cubes) {
    const long s = N >> q.level;
    std::array<long, 3> lo{0, 0, 0}, hi{0, 0, 0};
    for (int a = 0; a < n; ++a) {
      lo[a] = q.coords[a] * s;
      hi[a] = lo[a] + s;
    }
    long m = kFar;
    for (long i = lo[0]; i <= hi[0]; ++i)
      for (long j = lo[1]; j <= hi[1]; ++j)
        for (long k = lo[2]; k <= hi[2]; ++k) m = std::min(m, edt[cn.index({i, j, k})]);
    if (m < n * s * s || m > 16 * n * s * s) r.separation_ok = false;
    const double ratio = std::sqrt(static_cast<double>(m)) / static_cast<double>(s);
    r.min_ratio = std::min(r.min_ratio, ratio);
    r.max_ratio = std::max(r.max_ratio, ratio);
  }
  for (std::size_t i = 0; i < w.owner.size(); ++i)
    if (w.owner[i] == -2) r.disjoint_ok = false;
  for (std::size_t id = 0; id < w.adjacency.size(); ++id)
    for (int o : w.adjacency[id]) {
      const int jump = std::abs(w.cubes[id].level - w.cubes[static_cast<std::size_t>(o)].level);
      r.max_level_jump = std::max(r.max_level_jump, jump);
      if (jump > 2) r.neighbor_ok = false;
    }
  return r;
}

std::vector<int> chain_distances_from(const WhitneyDecomposition& w, int j) {
  std::vector<int> dist(w.cubes.size(), kNoChain);
  std::deque<int> queue{j};
  dist[static_cast<std::size_t>(j)] = 0;
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    for (int v : w.adjacency[static_cast<std::size_t>(u)]) {
      if (dist[static_cast<std::size_t>(v)] != kNoChain) continue;
      dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1;
      queue.push_back(v);
    }
  }
  return dist;
}

int chain_distance(const WhitneyDecomposition& w, int j, int k) {
  const int n = static_cast<int>(w.cubes.size());
  if (j < 0 || k < 0 || j >= n || k >= n) throw PreconditionError("cube index out of range");
  if (j == k) return 0;
  return chain_distances_from(w, j)[static_cast<std::size_t>(k)];
}

namespace {

// Squared gap between closed cubes in units of the finest cell.
long gap2_cells(const WhitneyCube& a, const WhitneyCube& b, int ndim, int depth) {
  const long sa = 1L << (depth - a.level), sb = 1L << (depth - b.level);
  long g2 = 0;
  for (int ax = 0; ax < ndim; ++ax) {
    const long alo = a.coords[ax] * sa, ahi = alo + sa;
    const long blo = b.coords[ax] * sb, bhi = blo + sb;
    const long g = std::max({0L, blo - ahi, alo - bhi});
    g2 += g * g;
  }
  return g2;
}

}  // namespace

double cube_gap(const WhitneyCube& a, const WhitneyCube& b) {
  const double sa = a.side, sb = b.side;
  double g2 = 0.0;
  for (int ax = 0; ax < 3; ++ax) {
    const double alo = static_cast<double>(a.coords[ax]) * sa, blo = static_cast<double>(b.coords[ax]) * sb;
    const double g = std::max({0.0, blo - (alo + sa), alo - (blo + sb)});
    g2 += g * g;
  }
  return std::sqrt(g2);
}

double log_distance(const WhitneyCube& a, const WhitneyCube& b) {
  return std::fabs(std::log(a.side / b.side)) + std::log(cube_gap(a, b) / (a.side + b.side) + 1.0);
}

KStarEstimate estimate_kstar(const WhitneyDecomposition& w, int sample_pairs, std::uint64_t seed) {
  KStarEstimate est;
  const std::size_t nc = w.cubes.size();
  if (nc == 0) throw PreconditionError("empty decomposition");
  Rng rng(seed);
  std::vector<std::pair<int, int>> pairs;
  for (int p = 0; p < sample_pairs; ++p)
    pairs.emplace_back(static_cast<int>(rng.index(nc)), static_cast<int>(rng.index(nc)));
  std::stable_sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  const double floor = std::log(2.0);
  int src = -1;
  std::vector<int> dist;
  for (const auto& [j, k] : pairs) {
    if (j != src) {
      dist = chain_distances_from(w, j);
      src = j;
    }
    const int d1 = dist[static_cast<std::size_t>(k)];
    if (d1 == kNoChain) {
      est.connected = false;
      continue;
    }
    ++est.pairs;
    const double d2 = log_distance(w.cubes[static_cast<std::size_t>(j)], w.cubes[static_cast<std::size_t>(k)]);
    const double ratio = d1 / std::max(d2, floor);
    if (ratio > est.kstar) {
      est.kstar = ratio;
      est.j = j;
      est.k = k;
      est.d1 = d1;
      est.d2 = d2;
    }
  }
  return est;
}

namespace {

// Nearest W cube no smaller than a cube of the given level at the given cell
// box; ties by level then coordinates (W is sorted that way).
int nearest_cube(const WhitneyDecomposition& w, const WhitneyCube& probe) {
  const int n = w.set.ndim, depth = w.set.depth;
  int best = -1;
  long best_g = kFar;
  for (std::size_t id = 0; id < w.cubes.size(); ++id) {
    const auto& q = w.cubes[id];
    if (q.level > probe.level) break;
    const long g = gap2_cells(q, probe, n, depth);
    if (g < best_g) {
      best_g = g;
      best = static_cast<int>(id);
    }
  }
  // No cube is as large as the probe: fall back to the largest cube.
  return best < 0 ? 0 : best;
}

}  // namespace

JonesPlan jones_plan(const WhitneyDecomposition& w, const WhitneyDecomposition& wc, double delta, double kstar,
                     double kstar_cap) {
  if (!(delta > 0.0)) throw PreconditionError("delta must be positive");
  if (w.cubes.empty()) throw PreconditionError("empty decomposition of D");
  if (w.set.depth != wc.set.depth || w.set.ndim != wc.set.ndim) throw PreconditionError("decomposition mismatch");
  const int n = w.set.ndim;
  JonesPlan p;
  p.delta = delta;
  p.kstar = kstar;
  const double target = delta / (5.0 * std::sqrt(static_cast<double>(n)));
  int k = static_cast<int>(std::floor(-std::log2(target))) - 1;
  while (!(std::ldexp(1.0, -k) < target)) ++k;
  p.k_delta = k;
  p.big_side = std::ldexp(1.0, -k);
  p.count.assign(w.cubes.size(), 0);
  p.match.assign(wc.cubes.size(), -1);
#pragma omp parallel for schedule(dynamic, 16) if (default_exec() == Exec::omp)
  for (std::size_t i = 0; i < wc.cubes.size(); ++i) {
    if (wc.cubes[i].side > p.big_side) continue;
    p.match[i] = nearest_cube(w, wc.cubes[i]);
  }
  for (int m : p.match)
    if (m >= 0) ++p.count[static_cast<std::size_t>(m)];
  p.max_count = p.count.empty() ? 0 : *std::max_element(p.count.begin(), p.count.end());
  p.collar_cells = wc.collar;
  p.collar_match.assign(wc.collar.size(), -1);
  for (std::size_t i = 0; i < wc.collar.size(); ++i) {
    WhitneyCube probe;
    probe.level = wc.set.depth;
    probe.coords = wc.set.unravel(wc.collar[i]);
    probe.side = wc.set.cell();
    if (probe.side <= p.big_side) p.collar_match[i] = nearest_cube(w, probe);
  }
  p.count_bound = (std::pow(2.0, n) + 1.0) * std::pow(67.0, n) * std::pow(kstar, 2.0 * n);
  if (kstar > kstar_cap) p.warning = "estimated K* above the configured cap; the extension bound degrades";
  if (p.big_side < w.set.cell()) p.warning = "delta below the raster resolution; no exterior cube is matched";
  return p;
}

ExtensionResult jones_extend(const ScalarField& g, double r, const WhitneyDecomposition& w,
                             const WhitneyDecomposition& wc, const JonesPlan& plan) {
  const CellSet& D = w.set;
  if (g.v.size() != D.size()) throw PreconditionError("field does not live on the cell grid of D");
  if (!(r >= 1.0)) throw PreconditionError("exponent r must be >= 1");
  const Grid grid = D.grid();
  const std::size_t nc = w.cubes.size(), N = D.size();

  std::vector<double> sum(nc, 0.0);
  std::vector<long> cnt(nc, 0);
  for (std::size_t i = 0; i < N; ++i) {
    const int o = w.owner[i];
    if (o < 0) continue;
    sum[static_cast<std::size_t>(o)] += g.v[i];
    ++cnt[static_cast<std::size_t>(o)];
  }
  ExtensionResult res;
  res.plan = plan;
  res.delta = plan.delta;
  res.h_star = ScalarField(grid, 0.0);
  for (std::size_t i = 0; i < N; ++i) {
    const int o = w.owner[i];
    if (o >= 0 && w.cubes[static_cast<std::size_t>(o)].side > plan.big_side)
      res.h_star.v[i] = sum[static_cast<std::size_t>(o)] / static_cast<double>(cnt[static_cast<std::size_t>(o)]);
  }
  // Averages of g* = g - h* per W cube.
  std::vector<double> gs(nc, 0.0);
  for (std::size_t i = 0; i < N; ++i) {
    const int o = w.owner[i];
    if (o >= 0) gs[static_cast<std::size_t>(o)] += g.v[i] - res.h_star.v[i];
  }
  for (std::size_t id = 0; id < nc; ++id) gs[id] /= static_cast<double>(cnt[id]);

  res.ext = ScalarField(grid, 0.0);
  for (std::size_t i = 0; i < N; ++i) {
    if (D.cells[i]) {
      res.ext.v[i] = g.v[i];
      continue;
    }
    const int o = wc.owner[i];
    if (o >= 0) {
      const int m = plan.match[static_cast<std::size_t>(o)];
      if (m >= 0) res.ext.v[i] = gs[static_cast<std::size_t>(m)];
    }
  }
  for (std::size_t c = 0; c < plan.collar_cells.size(); ++c) {
    const int m = plan.collar_match[c];
    if (m >= 0) res.ext.v[plan.collar_cells[c]] = gs[static_cast<std::size_t>(m)];
  }

  res.restriction_exact = true;
  for (std::size_t i = 0; i < N; ++i)
    if (D.cells[i] && std::memcmp(&res.ext.v[i], &g.v[i], sizeof(double)) != 0) res.restriction_exact = false;

  // Every nonzero exterior cell lies within delta of D (cell-exact bound).
  const auto edt = complement_edt(complement_in_box(D));
  Corners cn{D.ndim, D.n() + 1};
  const double c = D.cell();
  res.support_ok = true;
  for (std::size_t i = 0; i < N; ++i) {
    if (D.cells[i] || res.ext.v[i] == 0.0) continue;
    const auto q = D.unravel(i);
    long m = kFar;
    for (int k = 0; k < (1 << D.ndim); ++k) {
      std::array<long, 3> p{0, 0, 0};
      for (int a = 0; a < D.ndim; ++a) p[a] = q[a] + ((k >> a) & 1);
      m = std::min(m, edt[cn.index(p)]);
    }
    if (std::sqrt(static_cast<double>(m)) * c + c * std::sqrt(static_cast<double>(D.ndim)) > plan.delta)
      res.support_ok = false;
  }

  for (double v : res.h_star.v) res.h_star_sup = std::max(res.h_star_sup, std::fabs(v));
  const double glr = lp_norm(g, r, &D.cells);
  const double den = std::pow(plan.delta, -D.ndim / r) * glr;
  res.h_star_ratio = den > 0.0 ? res.h_star_sup / den : 0.0;
  return res;
}

ExtensionResult jones_extend(const ScalarField& g, double r, double delta, const WhitneyDecomposition& w,
                             const WhitneyDecomposition& wc, int kstar_pairs) {
  const KStarEstimate k = estimate_kstar(w, kstar_pairs);
  return jones_extend(g, r, w, wc, jones_plan(w, wc, delta, k.kstar));
}

}  // namespace vbmo
