// Acceptance run: one pass/fail line per criterion; exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

#include "vbmo/harness.hpp"
#include "vbmo/helmholtz.hpp"
#include "vbmo/whitney.hpp"

using namespace vbmo;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[1024];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

Vec unit_box_hi(int n) {
  Vec hi{0, 0, 0};
  for (int a = 0; a < n; ++a) hi[a] = 1.0;
  return hi;
}

// ---- 1 ----------------------------------------------------------------------

Verdict whole_space_projector() {
  std::string detail;
  bool ok = true;
  for (int n : {2, 3}) {
    const Grid g = Grid::torus(n, 64);
    double div = 0, orth = 0, rec = 0, excess = -kInf, t = 0;
    for (int k = 0; k < 100; ++k) {
      VectorField f(g);
      for (int a = 0; a < n; ++a)
        f.c[static_cast<std::size_t>(a)] = synth_field(g, 2.0, 1000u * static_cast<unsigned>(n) + 7u * k + a).v;
      const auto t0 = Clock::now();
      const DecompositionResult r = project_whole_space(f);
      t += seconds_since(t0);
      const double nf = lp_norm(f, 2.0);
      div = std::max(div, r.diag.div_residual);
      orth = std::max(orth, std::fabs(r.diag.orthogonality));
      rec = std::max(rec, r.diag.reconstruction_error);
      excess = std::max({excess, lp_norm(r.f0, 2.0) - nf, lp_norm(r.grad_p, 2.0) - nf});
    }
    const bool pass = div <= 1e-10 && orth <= 1e-10 && rec <= 1e-12 && excess <= 1e-12 && t < 10.0;
    ok = ok && pass;
    detail += fmt("n=%d: div %.2e, <f0,grad p>/|f|^2 %.2e, reconstruction %.2e, norm excess %.2e, %.2f s; ", n, div, orth,
                  rec, excess, t);
  }
  return {ok, detail};
}

// ---- 2 ----------------------------------------------------------------------

Verdict half_space_trace() {
  std::string detail;
  bool ok = true;
  for (int n : {2, 3}) {
    const int N0 = n == 2 ? 64 : 32;
    double worst = kInf;
    for (int k = 0; k < 20; ++k) {
      const auto fn = corpus_function(n, {0, 0, 0}, unit_box_hi(n), 300u + 13u * k);
      double tr[2];
      for (int s = 0; s < 2; ++s) {
        Grid g = Grid::box(n, static_cast<std::size_t>(N0 << s), {0, 0, 0}, unit_box_hi(n));
        for (int a = 0; a + 1 < n; ++a) g.periodic[static_cast<std::size_t>(a)] = true;
        tr[s] = project_half_space(sample(g, fn)).diag.normal_trace;
      }
      worst = std::min(worst, tr[0] / tr[1]);
    }
    ok = ok && worst >= 1.8;
    detail += fmt("n=%d (%d -> %d): smallest trace ratio %.3f; ", n, N0, 2 * N0, worst);
  }
  return {ok, detail + "bound 1.8"};
}

// ---- 3 ----------------------------------------------------------------------

// Integer gap between closed cell boxes [lo, hi] per axis.
long box_gap2(const std::array<long, 3>& alo, const std::array<long, 3>& ahi, const std::array<long, 3>& blo,
              const std::array<long, 3>& bhi, int n) {
  long s = 0;
  for (int a = 0; a < n; ++a) {
    const long d = std::max({0L, blo[a] - ahi[a], alo[a] - bhi[a]});
    s += d * d;
  }
  return s;
}

// Brute-force Whitney conditions in cell units, independent of the library checks.
bool whitney_oracle(const WhitneyDecomposition& w, std::string& why) {
  const CellSet& s = w.set;
  const int n = s.ndim;
  const long N = s.n();
  std::vector<std::array<long, 3>> comp;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (!s.cells[i]) comp.push_back(s.unravel(i));
  const std::size_t nc = w.cubes.size();
  std::vector<std::array<long, 3>> lo(nc), hi(nc);
  std::vector<long> side(nc);
  for (std::size_t q = 0; q < nc; ++q) {
    side[q] = N >> w.cubes[q].level;
    for (int a = 0; a < 3; ++a) {
      lo[q][a] = a < n ? w.cubes[q].coords[a] * side[q] : 0;
      hi[q][a] = a < n ? lo[q][a] + side[q] : 0;
    }
  }
  for (std::size_t q = 0; q < nc; ++q) {
    long d2 = std::numeric_limits<long>::max();
    for (const auto& c : comp) {
      std::array<long, 3> chi = c;
      for (int a = 0; a < n; ++a) chi[a] += 1;
      d2 = std::min(d2, box_gap2(lo[q], hi[q], c, chi, n));
    }
    if (s.box_is_complement)
      for (int a = 0; a < n; ++a) d2 = std::min({d2, lo[q][a] * lo[q][a], (N - hi[q][a]) * (N - hi[q][a])});
    const long l2 = side[q] * side[q];
    if (d2 < n * l2 || d2 > 16 * n * l2) {
      why = fmt("cube %zu: squared distance %ld outside [%ld, %ld]", q, d2, n * l2, 16 * n * l2);
      return false;
    }
  }
  for (std::size_t p = 0; p < nc; ++p)
    for (std::size_t q = p + 1; q < nc; ++q) {
      if (box_gap2(lo[p], hi[p], lo[q], hi[q], n) != 0) continue;
      bool overlap = true;
      for (int a = 0; a < n; ++a) overlap = overlap && lo[p][a] < hi[q][a] && lo[q][a] < hi[p][a];
      if (overlap) {
        why = fmt("cubes %zu and %zu overlap", p, q);
        return false;
      }
      if (4 * side[p] < side[q] || 4 * side[q] < side[p]) {
        why = fmt("touching cubes %zu and %zu with sides %ld and %ld", p, q, side[p], side[q]);
        return false;
      }
    }
  return true;
}

Verdict whitney_conditions() {
  struct Named {
    std::string name;
    CellSet set;
  };
  const std::vector<Named> sets{{"cube", shapes::cube(2, 7)},       {"ball", shapes::ball(2, 7)},
                                {"L-shape", shapes::l_shape(7)},    {"annulus", shapes::annulus(7)},
                                {"corridor pair", shapes::corridor_pair(7, 0.1)}, {"cube 3d", shapes::cube(3, 5)},
                                {"ball 3d", shapes::ball(3, 5)}};
  bool ok = true;
  std::string detail;
  for (const auto& [name, set] : sets) {
    const auto w = whitney_decompose(set);
    const WhitneyCheck c = check_whitney(w);
    std::string why;
    const bool oracle = whitney_oracle(w, why);
    const bool pass = c.separation_ok && c.neighbor_ok && c.disjoint_ok && oracle;
    ok = ok && pass;
    detail += fmt("%s %zu cubes%s; ", name.c_str(), w.cubes.size(), pass ? "" : (" FAIL " + why).c_str());
  }
  return {ok, detail};
}

// ---- 4 ----------------------------------------------------------------------

SeminormContext mask_context(const Grid& g, const Mask& m) {
  SeminormContext ctx;
  ctx.region = region_from_mask(g, m);
  ctx.balls = make_ball_set(ctx.region, kInf, BallPolicySpec{});
  return ctx;
}

Verdict jones_extension() {
  const CellSet set = shapes::l_shape(6);
  const auto w = whitney_decompose(set);
  const auto wc = whitney_decompose(complement_in_box(set));
  const Grid g = set.grid();
  const double delta = 40.0 * std::sqrt(2.0) * set.cell();
  const KStarEstimate ks = estimate_kstar(w, 400);
  const JonesPlan plan = jones_plan(w, wc, delta, ks.kstar);
  const SeminormContext inside = mask_context(g, set.cells);
  const SeminormContext whole = mask_context(g, Mask(g.size(), 1));

  // Closed cells within delta of a closed cell of D, by brute force.
  const double dcell = delta / set.cell();
  std::vector<std::array<long, 3>> dcells;
  for (std::size_t i = 0; i < set.size(); ++i)
    if (set.cells[i]) dcells.push_back(set.unravel(i));
  Mask near(set.size(), 0);
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto c = set.unravel(i);
    for (const auto& d : dcells) {
      const long gx = std::max(0L, std::labs(c[0] - d[0]) - 1), gy = std::max(0L, std::labs(c[1] - d[1]) - 1);
      if (static_cast<double>(gx * gx + gy * gy) <= dcell * dcell) {
        near[i] = 1;
        break;
      }
    }
  }

  bool restriction = true, support = true;
  std::vector<double> ratios;
  for (int k = 0; k < 30; ++k) {
    const auto fn = corpus_function(2, set.lo, unit_box_hi(2), 500u + 7919u * k);
    const ScalarField u = sample(g, [&](const Vec& x) { return fn(x)[0]; });
    const ExtensionResult e = jones_extend(u, 2.0, w, wc, plan);
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (set.cells[i] && std::memcmp(&e.ext.v[i], &u.v[i], sizeof(double)) != 0) restriction = false;
      if (!near[i] && e.ext.v[i] != 0.0) support = false;
    }
    restriction = restriction && e.restriction_exact;
    support = support && e.support_ok;
    ratios.push_back(bmol_norm(e.ext, 2.0, whole) / bmol_norm(u, 2.0, inside));
  }
  const double mx = *std::max_element(ratios.begin(), ratios.end());
  const double spread = mx / median(ratios);
  const bool count_ok = plan.max_count >= 1 && plan.max_count <= plan.count_bound;
  return {restriction && support && spread < 5.0 && count_ok,
          fmt("restriction %s, support %s, ratio max %.3f median %.3f spread %.3f (bound 5), matches per cube %d <= %.3g "
              "(K* %.3f)",
              restriction ? "bitwise" : "BROKEN", support ? "within D_delta" : "OUTSIDE", mx, median(ratios), spread,
              plan.max_count, plan.count_bound, plan.kstar)};
}

// ---- 5 ----------------------------------------------------------------------

Verdict random_charts() {
  int violations = 0, charts = 0;
  double min_normal = kInf, max_gamma = 0, max_sphere = 0, min_reach_margin = kInf;
  std::string first;
  for (int k = 0; k < 50; ++k) {
    const int n = 2 + k % 2, m = n - 1;
    Rng rng(4000u + static_cast<unsigned>(k));
    std::vector<Bump> bumps;
    const int nb = 1 + static_cast<int>(rng.index(3));
    for (int b = 0; b < nb; ++b) {
      Vec c = 0.15 * random_in_ball(rng, m);
      const double amp = (rng.uniform() < 0.5 ? -1.0 : 1.0) * rng.uniform(0.01, 0.05);
      bumps.push_back(Bump{c, amp, rng.uniform(0.3, 0.5)});
    }
    auto H = std::make_shared<RadialSumGraph>(m, bumps);
    const GraphBounds gb = graph_bounds(*H, 0.5);
    const double K = std::max({gb.sup_h, gb.sup_grad, gb.sup_hess});
    Vec lo{0, 0, 0}, hi{0, 0, 0};
    for (int a = 0; a < n; ++a) lo[a] = a == m ? -0.3 : -0.5, hi[a] = a == m ? 0.7 : 0.5;
    const DomainSpec spec = DomainSpec::graph_domain(n, H, 0.5, 0.9 * std::min(0.5, 2.0 / (n * K)), K, lo, hi);
    Vec z0 = 0.25 * random_in_ball(rng, m);
    z0[m] = H->h(z0);
    const double base = std::min({spec.alpha, spec.beta, spec.reach, 0.25 * spec.diameter()});
    const double rho_lip = 0.9 * std::min(base, 1.0 / (96.0 * n * K + 4.0));
    const double rho_star = 0.9 * std::min(base, 1.0 / (32.0 * n * K));
    ++charts;
    auto fail = [&](const std::string& what) {
      if (violations++ == 0) first = fmt("chart %d: %s", k, what.c_str());
    };
    try {
      const LipschitzAudit a = sample_lipschitz_constant(spec, z0, rho_lip, 200, 17u + k);
      min_normal = std::min(min_normal, a.min_normal_component);
      max_gamma = std::max(max_gamma, a.gamma_ratio);
      max_sphere = std::max(max_sphere, a.sphere_ratio);
      if (!(a.min_normal_component > 0.4)) fail("normal component");
      if (!(a.gamma_ratio <= 13.0 * n)) fail("graph Lipschitz ratio");
      if (!(a.sphere_ratio <= 600.0 * std::pow(n, 1.5))) fail("sphere Lipschitz ratio");
      if (!check_star_like(spec, z0, rho_star, 64, 23u + k).pass) fail("star-likeness");
      const ReachReport r = estimate_reach(spec);
      if (r.beta_bound_applies) {
        min_reach_margin = std::min(min_reach_margin, r.estimated - r.beta_bound);
        if (!(r.estimated >= r.beta_bound)) fail("reach below beta/4");
      }
    } catch (const std::exception& e) {
      fail(e.what());
    }
  }
  return {violations == 0,
          fmt("%d charts, %d violations; min normal component %.3f (> 0.4), max graph ratio %.3f (<= 13n), max sphere "
              "ratio %.3f (<= 600 n^1.5), min reach margin over beta/4 %.3g%s%s",
              charts, violations, min_normal, max_gamma, max_sphere, min_reach_margin, first.empty() ? "" : "; first: ",
              first.c_str())};
}

// ---- 6 ----------------------------------------------------------------------

Verdict bogovskii_solver() {
  const double radius = 0.4, delta = 2 * radius;
  bool ok = true;
  double min_rate = kInf, max_trace = 0.0;
  int monotone = 0;
  for (int k = 0; k < 10; ++k) {
    Rng rng(6000u + static_cast<unsigned>(k));
    const Vec c{rng.uniform(-0.05, 0.05), rng.uniform(-0.05, 0.05), 0};
    const Vec dir = random_direction(rng, 2);
    const double support = rng.uniform(0.25, 0.32), cubic = rng.uniform(-2.0, 2.0);
    // Odd about c, hence mean zero on a grid symmetric about c.
    auto data = [=](const Vec& x) {
      const Vec v = x - c;
      const double t = dot(v, v) / (support * support), s = dot(v, dir);
      return t < 1.0 ? (s + cubic * s * s * s) * std::exp(1.0 - 1.0 / (1.0 - t)) : 0.0;
    };
    std::vector<double> ratios;
    for (double R : {delta / 8, delta / 4, delta / 2}) {
      double res[2];
      for (int s = 0; s < 2; ++s) {
        const std::size_t N = 64u << s;
        const Grid g = Grid::box(2, N, c - Vec{0.5, 0.5, 0}, c + Vec{0.5, 0.5, 0});
        const StarDomain d = star_ball(g, c, radius, R);
        const BogovskiiResult b = bogovskii(sample(g, data), d);
        res[s] = b.div_residual;
        max_trace = std::max(max_trace, b.trace_max);
        if (s == 1) ratios.push_back(b.ratio);
      }
      min_rate = std::min(min_rate, res[0] / res[1]);
    }
    if (ratios[0] > ratios[1] && ratios[1] > ratios[2]) ++monotone;
  }
  ok = min_rate >= 1.8 && max_trace == 0.0 && monotone == 10;
  return {ok, fmt("smallest residual ratio 64 -> 128 %.3f (bound 1.8), max trace %.3g, constant decreasing in R in %d/10 "
                  "cases",
                  min_rate, max_trace, monotone)};
}

// ---- 7 ----------------------------------------------------------------------

Verdict cutoff_families() {
  bool ok = true;
  double max_spread = 0.0, max_normal = 0.0;
  std::string detail;
  for (const char* kind : {"half_space", "ball", "bump"})
    for (int n : {2, 3}) {
      SuiteConfig cfg;
      cfg.domain_kind = kind;
      cfg.ndim = n;
      const DomainSpec spec = make_domain(cfg);
      const double eps = suite_epsilon(cfg, spec);
      Vec x0 = 0.5 * (spec.box_lo + spec.box_hi);
      if (spec.kind == DomainKind::ball) x0 = spec.center;
      std::vector<double> h;
      for (double e : {eps, eps / 2, eps / 4}) {
        const CutoffAudit a = audit_interior_cutoff(InteriorCutoff(n, x0, e), 2000);
        ok = ok && a.plateau_ok && a.support_ok;
        h.push_back(a.eps2_hessian);
      }
      for (double v : h) max_spread = std::max(max_spread, std::fabs(v / h[0] - 1.0));
      for (const BoundaryPoint& bp : boundary_samples(spec, n == 2 ? 6 : 3)) {
        std::vector<double> hb;
        for (double e : {eps, eps / 2, eps / 4}) {
          const CutoffAudit a = audit_boundary_cutoff(BoundaryCutoff(chart_at(spec, bp.x), e), spec, 400);
          ok = ok && a.plateau_ok && a.support_ok;
          max_normal = std::max(max_normal, a.max_normal_derivative);
          hb.push_back(a.eps2_hessian);
        }
        for (double v : hb) max_spread = std::max(max_spread, std::fabs(v / hb[0] - 1.0));
      }
    }
  const bool pass = ok && max_spread <= 0.01 && max_normal < 1e-6;
  return {pass, fmt("plateau/support %s on half space, ball and bump graph (n = 2, 3); eps^2 Hessian spread %.3g (bound "
                    "0.01); max normal derivative in the 3 eps band %.3g (bound 1e-6)",
                    ok ? "exact" : "VIOLATED", max_spread, max_normal)};
}

// ---- 8 ----------------------------------------------------------------------

Verdict seminorm_oracle() {
  int fields = 0, mismatches = 0;
  double lo = kInf, hi = 0.0;
  for (const char* kind : {"half_space", "ball", "bump"}) {
    SuiteConfig cfg;
    cfg.domain_kind = kind;
    const DomainSpec spec = make_domain(cfg);
    const Grid g = domain_grid(spec, 32);
    const Region R = region_from_spec(spec, g);
    BallPolicySpec ex;
    ex.kind = BallPolicy::exhaustive;
    const BallSet exhaustive = make_ball_set(R, 0.25, ex), lattice = make_ball_set(R, 0.25, BallPolicySpec{});
    for (int k = 0; k < 10; ++k) {
      const VectorField u = sample(g, corpus_function(2, spec.box_lo, spec.box_hi, 800u + 7919u * k));
      const double a = bmo_seminorm(u, R, exhaustive).value;
      const double b = brute_force_bmo(u, R, 0.25);
      const double l = bmo_seminorm(u, R, lattice).value;
      ++fields;
      if (a != b) ++mismatches;
      lo = std::min(lo, l / b);
      hi = std::max(hi, l / b);
    }
  }
  return {mismatches == 0 && lo >= 0.9 && hi <= 1.0,
          fmt("%d fields on 32^2 grids: %d exhaustive/oracle mismatches, lattice ratio in [%.4f, %.4f] (bound [0.9, 1])",
              fields, mismatches, lo, hi)};
}

// ---- 9 ----------------------------------------------------------------------

Verdict interpolation() {
  const DomainSpec spec = DomainSpec::ball(2, {0, 0, 0}, 0.4);
  const Grid g = Grid::box(2, 64, {-0.5, -0.5, 0}, {0.5, 0.5, 0});
  const SeminormContext ctx = make_context(spec, g, kInf, kInf);
  std::vector<double> all;
  double worst_growth = 0.0;
  for (int k = 0; k < 30; ++k) {
    const auto fn = corpus_function(2, spec.box_lo, spec.box_hi, 900u + 7919u * k);
    const ScalarField u = sample(g, [&](const Vec& x) { return fn(x)[0]; });
    double c2 = 0.0;
    for (double q : {2.0, 4.0, 8.0, 16.0}) {
      const double c = interpolation_constant(u, 2.0, q, ctx);
      if (q == 2.0) c2 = c;
      worst_growth = std::max(worst_growth, c / c2);
      all.push_back(c);
    }
  }
  const double spread = *std::max_element(all.begin(), all.end()) / median(all);
  return {spread < 3.0 && worst_growth <= 2.0,
          fmt("max/median %.3f (bound 3), largest C(q)/C(2) %.3f (bound 2) over q in {2,4,8,16}, 30 fields", spread,
              worst_growth)};
}

// ---- 10 ---------------------------------------------------------------------

Verdict stability_constant() {
  bool ok = true;
  std::string detail;
  for (const char* kind : {"ball", "bump"}) {
    SuiteConfig cfg;
    cfg.domain_kind = kind;
    cfg.ndim = 3;
    const DomainSpec spec = make_domain(cfg);
    const auto t0 = Clock::now();
    TheoremOptions opt;
    opt.reference_grid = domain_grid(spec, 48);
    double c[2] = {0, 0};
    SplitReport split{};
    std::string label;
    for (int s = 0; s < 2; ++s) {
      const Grid g = domain_grid(spec, 48u << s);
      const TheoremReport r = verify_main_theorem(theorem_corpus(g, spec.box_lo, spec.box_hi, 20, 11), spec, opt);
      c[s] = r.max_c;
      label = r.label;
      for (const auto& f : r.fields) {
        split.interior_bmo = std::max({split.interior_bmo, f.f0.interior_bmo, f.gp.interior_bmo});
        split.boundary_bmo = std::max({split.boundary_bmo, f.f0.boundary_bmo, f.gp.boundary_bmo});
        split.b_eps = std::max({split.b_eps, f.f0.b_eps, f.gp.b_eps});
      }
    }
    const double t = seconds_since(t0);
    const double change = std::fabs(c[1] - c[0]) / c[0];
    const bool pass = std::isfinite(c[0]) && std::isfinite(c[1]) && change < 0.25 && t < 300.0 &&
                      split.interior_bmo > 0.0 && split.boundary_bmo > 0.0;
    ok = ok && pass;
    detail += fmt("%s: C %.4f -> %.4f (change %.1f%%, bound 25%%), interior split %.3f, boundary split %.3f, b %.3f, "
                  "%.0f s [%s]; ",
                  kind, c[0], c[1], 100 * change, split.interior_bmo, split.boundary_bmo, split.b_eps, t, label.c_str());
  }
  return {ok, detail};
}

// ---- 11 ---------------------------------------------------------------------

Verdict localization_identities() {
  const Vec lo{0, -0.25, 0}, hi{1, 0.75, 0};
  DomainSpec spec = DomainSpec::half_space(2, lo, hi);
  spec.constants.c0 = 0.5;
  const double eps_b = 0.95 * epsilon_cap(spec), eps_i = 0.05;
  double worst_rel = 0.0, min_rate_i = kInf, min_rate_b = kInf, max_b = 0.0;
  for (int k = 0; k < 10; ++k) {
    Rng rng(7000u + static_cast<unsigned>(k));
    const Vec x{rng.uniform(0.2, 0.8), rng.uniform(0.2, 0.5), 0};
    const Vec z{rng.uniform(0.1, 0.9), 0, 0};
    const auto fn = corpus_function(2, lo, hi, 7100u + 7919u * k);
    double ci[2], cb[2];
    for (int s = 0; s < 2; ++s) {
      Grid g = Grid::box(2, 128u << s, lo, hi);
      g.periodic[0] = true;
      const VectorField f = sample_on_faces(g, fn);
      const DecompositionResult dec = project_domain(f, spec);
      const IdentityRecord ri = localized_interior_identity(f, dec, spec, x, eps_i);
      const IdentityRecord rb = localized_boundary_identity(f, dec, spec, z, eps_b);
      worst_rel = std::max({worst_rel, ri.relative, rb.relative});
      max_b = std::max(max_b, rb.b_term);
      ci[s] = ri.consistency;
      cb[s] = rb.consistency;
    }
    min_rate_i = std::min(min_rate_i, ci[0] / ci[1]);
    min_rate_b = std::min(min_rate_b, cb[0] / cb[1]);
  }
  return {worst_rel <= 1e-8 && min_rate_i >= 1.8 && min_rate_b >= 1.8,
          fmt("10 interior and 10 boundary configurations: max residual / |f| %.3g (bound 1e-8), quadrature gap ratio "
              "128 -> 256 interior %.3f, boundary %.3f (bound 1.8), max b-term %.3g",
              worst_rel, min_rate_i, min_rate_b, max_b)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Verdict()> run;
  };
  const std::vector<Criterion> criteria{
      {"whole-space projector on the 64^n torus", whole_space_projector},
      {"half-space reflection trace decays at first order", half_space_trace},
      {"Whitney separation and neighbour conditions", whitney_conditions},
      {"Jones extension restriction, support and counting bound", jones_extension},
      {"boundary geometry on random compliant charts", random_charts},
      {"divergence solver convergence, trace and core-radius monotonicity", bogovskii_solver},
      {"cut-off plateau, support, scaling and normal flatness", cutoff_families},
      {"ball-sweep estimator against the exhaustive oracle", seminorm_oracle},
      {"L^q interpolation constant across exponents", interpolation},
      {"empirical stability constant under refinement", stability_constant},
      {"localization identities at quadrature scale", localization_identities},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = Clock::now();
    Verdict v;
    try {
      v = criteria[i].run();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    if (!v.pass) ++failed;
    std::printf("[%s] %2zu %s: %s (%.1f s)\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].name, v.detail.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
