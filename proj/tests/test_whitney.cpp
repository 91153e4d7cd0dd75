#include <doctest.h>

#include "vbmo/whitney.hpp"

using namespace vbmo;

namespace {
std::vector<CellSet> test_sets(int depth) {
  return {shapes::cube(2, depth), shapes::ball(2, depth), shapes::l_shape(depth), shapes::annulus(depth),
          shapes::corridor_pair(depth, 0.1)};
}
}  // namespace

TEST_CASE("corner distance transform matches brute force") {
  const CellSet s = shapes::annulus(4);
  const auto edt = complement_edt(s);
  const long N = s.n(), L = N + 1;
  std::vector<std::array<long, 2>> sources;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.cells[i]) continue;
    const auto c = s.unravel(i);
    for (int m = 0; m < 4; ++m) sources.push_back({c[0] + (m & 1), c[1] + ((m >> 1) & 1)});
  }
  for (long x = 0; x <= N; ++x)
    for (long y = 0; y <= N; ++y)
      if (x == 0 || y == 0 || x == N || y == N) sources.push_back({x, y});
  for (long x = 0; x <= N; ++x)
    for (long y = 0; y <= N; ++y) {
      long best = std::numeric_limits<long>::max();
      for (const auto& q : sources) best = std::min(best, (x - q[0]) * (x - q[0]) + (y - q[1]) * (y - q[1]));
      CHECK(edt[static_cast<std::size_t>(x * L + y)] == best);
    }
}

TEST_CASE("Whitney conditions hold on every test set") {
  for (const CellSet& s : test_sets(6)) {
    const auto w = whitney_decompose(s);
    const WhitneyCheck c = check_whitney(w);
    CHECK(c.separation_ok);
    CHECK(c.neighbor_ok);
    CHECK(c.disjoint_ok);
    CHECK(c.min_ratio >= std::sqrt(2.0) - 1e-12);
    CHECK(c.max_ratio <= 4.0 * std::sqrt(2.0) + 1e-12);
  }
}

TEST_CASE("cubes and collar tile the set exactly") {
  for (const CellSet& s : test_sets(5)) {
    const auto w = whitney_decompose(s);
    std::size_t covered = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (!s.cells[i]) {
        CHECK(w.owner[i] == -1);
        continue;
      }
      if (w.owner[i] >= 0) ++covered;
    }
    CHECK(covered + w.collar.size() == s.count());
  }
}

TEST_CASE("three-dimensional cube decomposes cleanly") {
  const auto w = whitney_decompose(shapes::cube(3, 4));
  const WhitneyCheck c = check_whitney(w);
  CHECK(c.separation_ok);
  CHECK(c.neighbor_ok);
  CHECK(c.disjoint_ok);
}

TEST_CASE("chain distance is a metric on the touching graph") {
  const auto w = whitney_decompose(shapes::l_shape(5));
  const int n = static_cast<int>(w.cubes.size());
  Rng rng(2);
  for (int t = 0; t < 20; ++t) {
    const int a = static_cast<int>(rng.index(static_cast<std::size_t>(n)));
    const int b = static_cast<int>(rng.index(static_cast<std::size_t>(n)));
    const int c = static_cast<int>(rng.index(static_cast<std::size_t>(n)));
    CHECK(chain_distance(w, a, a) == 0);
    CHECK(chain_distance(w, a, b) == chain_distance(w, b, a));
    CHECK(chain_distance(w, a, c) <= chain_distance(w, a, b) + chain_distance(w, b, c));
    for (int nb : w.adjacency[static_cast<std::size_t>(a)]) CHECK(chain_distance(w, a, nb) == 1);
  }
}

TEST_CASE("log distance is symmetric and vanishes on the diagonal") {
  const auto w = whitney_decompose(shapes::ball(2, 5));
  CHECK(log_distance(w.cubes[0], w.cubes[0]) == 0.0);
  CHECK(log_distance(w.cubes[1], w.cubes[7]) == log_distance(w.cubes[7], w.cubes[1]));
}

TEST_CASE("chain constant estimate is seeded and finite") {
  const auto w = whitney_decompose(shapes::corridor_pair(6, 0.1));
  const KStarEstimate a = estimate_kstar(w, 300, 5), b = estimate_kstar(w, 300, 5);
  CHECK(a.kstar == b.kstar);
  CHECK(a.connected);
  CHECK(std::isfinite(a.kstar));
  CHECK(a.kstar >= 1.0);
  CHECK(a.d1 == chain_distance(w, a.j, a.k));
}

TEST_CASE("Jones extension restricts exactly and respects its reach") {
  const CellSet s = shapes::ball(2, 6);
  const auto w = whitney_decompose(s);
  const auto wc = whitney_decompose(complement_in_box(s));
  const Grid g = s.grid();
  const ScalarField u = sample(g, [](const Vec& x) { return std::sin(7 * x[0]) + x[1] * x[1]; });
  const ExtensionResult e = jones_extend(u, 2.0, 40.0 * std::sqrt(2.0) * s.cell(), w, wc);
  CHECK(e.restriction_exact);
  CHECK(e.support_ok);
  CHECK(e.plan.max_count >= 1);
  CHECK(e.plan.warning.empty());
  CHECK(e.plan.max_count <= e.plan.count_bound);
  for (std::size_t i = 0; i < g.size(); ++i)
    if (s.cells[i]) CHECK(e.ext.v[i] == u.v[i]);
}

TEST_CASE("a reach below the raster resolution is flagged") {
  const CellSet s = shapes::ball(2, 6);
  const JonesPlan p = jones_plan(whitney_decompose(s), whitney_decompose(complement_in_box(s)), 0.1, 2.0);
  CHECK(p.max_count == 0);
  CHECK_FALSE(p.warning.empty());
}

TEST_CASE("a set without complement is refused") {
  CellSet s = shapes::cube(2, 3);
  s.cells.assign(s.size(), 1);
  s.box_is_complement = false;
  CHECK_THROWS_AS(whitney_decompose(s), PreconditionError);
}
