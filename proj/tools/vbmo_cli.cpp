// Command-line front end: single computations and the audit suite.
#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "vbmo/cutoffs.hpp"
#include "vbmo/harness.hpp"
#include "vbmo/helmholtz.hpp"
#include "vbmo/whitney.hpp"

extern char** environ;

using namespace vbmo;

namespace {

struct Globals {
  std::string config;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 0;
  std::string out_dir = "vbmo-out";
};

SuiteConfig load(const Globals& g) {
  ConfigMap map;
  if (!g.config.empty()) map = load_config(g.config);
  apply_env_overrides(map, environ);
  SuiteConfig cfg = suite_config_from(map);
  cfg.config_path = g.config;
  if (g.seed_set) cfg.seed = g.seed;
  return cfg;
}

void write_file(const std::filesystem::path& dir, const std::string& name, const std::string& body) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / name);
  if (!out) throw FormatError("cannot write " + (dir / name).string());
  out << body;
}

CellSet named_set(const std::string& name, int depth, const SuiteConfig& cfg) {
  if (name == "cube") return shapes::cube(cfg.ndim, depth);
  if (name == "ball") return shapes::ball(cfg.ndim, depth);
  if (name == "l_shape") return shapes::l_shape(depth);
  if (name == "annulus") return shapes::annulus(depth);
  if (name == "corridor") return shapes::corridor_pair(depth, 0.1);
  if (name == "domain") {
    const DomainSpec spec = make_domain(cfg);
    double len = 0.0;
    for (int a = 0; a < spec.ndim; ++a) len = std::max(len, spec.box_hi[a] - spec.box_lo[a]);
    return cell_set(spec, depth, spec.box_lo, len);
  }
  throw ConfigError("unknown set '" + name + "' (cube, ball, l_shape, annulus, corridor, domain)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vbmo: Helmholtz decompositions and BMO-type seminorm audits"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "JSON config file (sections: domain, grid, epsilon, corpus, constants, suite)");
  app.add_option_function<std::uint64_t>(
      "--seed", [&](const std::uint64_t& s) { g.seed = s, g.seed_set = true; }, "corpus seed override");
  app.add_option("--threads", g.threads, "OpenMP threads (0 keeps the runtime default)");
  app.add_option("--out-dir", g.out_dir, "directory for emitted reports");

  int grid_n = 64;
  std::string method = "auto";
  auto* decompose = app.add_subcommand("decompose", "Helmholtz-decompose a corpus field on the configured domain");
  decompose->add_option("--n", grid_n, "grid cells per axis")->check(CLI::Range(16, 1024));
  decompose->add_option("--method", method, "auto, whole, half or masked")
      ->check(CLI::IsMember({"auto", "whole", "half", "masked"}));

  auto* seminorm = app.add_subcommand("seminorm", "vBMO norm of a corpus field on the configured domain");
  seminorm->add_option("--n", grid_n, "grid cells per axis")->check(CLI::Range(16, 1024));

  std::string set_name = "ball";
  int depth = 6, pairs = 400;
  double delta = 0.0;
  auto* whitney = app.add_subcommand("whitney", "Whitney decomposition checks and chain constant");
  whitney->add_option("--set", set_name, "cube, ball, l_shape, annulus, corridor or domain");
  whitney->add_option("--depth", depth, "raster depth (2^depth cells per axis)")->check(CLI::Range(2, 10));
  whitney->add_option("--pairs", pairs, "sampled cube pairs for the chain constant");

  auto* extend = app.add_subcommand("extend", "Jones extension of a corpus function off a cell set");
  extend->add_option("--set", set_name, "cube, ball, l_shape, annulus, corridor or domain");
  extend->add_option("--depth", depth, "raster depth")->check(CLI::Range(2, 10));
  extend->add_option("--delta", delta, "extension reach (default: 40 sqrt(n) cells)")->check(CLI::PositiveNumber);

  auto* geometry = app.add_subcommand("geometry-audit", "chart, reach and cut-off audits on the configured domain");
  bool timing = false;
  auto* verify = app.add_subcommand("verify", "run the audit suite and emit text and CSV reports");
  verify->add_flag("--timing", timing, "record per-check runtimes (reports are then not bitwise reproducible)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (g.threads > 0) set_num_threads(g.threads);
    SuiteConfig cfg = load(g);
    const std::filesystem::path out(g.out_dir);

    if (*decompose) {
      const DomainSpec spec = make_domain(cfg);
      const Grid grid = domain_grid(spec, static_cast<std::size_t>(grid_n));
      DecompositionResult r;
      if (method == "whole") {
        const Grid t = Grid::torus(cfg.ndim, static_cast<std::size_t>(grid_n));
        r = project_whole_space(sample(t, corpus_function(cfg.ndim, {0, 0, 0}, {1, 1, 1}, cfg.seed)));
      } else if (method == "half") {
        if (spec.kind != DomainKind::half_space) throw ConfigError("--method half needs domain.kind = half_space");
        // Slab whose boundary face lies half a cell below the first node row.
        Vec lo = spec.box_lo;
        lo[cfg.ndim - 1] = 0.0;
        Grid slab = Grid::box(cfg.ndim, static_cast<std::size_t>(grid_n), lo, spec.box_hi);
        for (int a = 0; a + 1 < cfg.ndim; ++a) slab.periodic[static_cast<std::size_t>(a)] = true;
        r = project_half_space(sample(slab, corpus_function(cfg.ndim, lo, spec.box_hi, cfg.seed)));
      } else {
        r = project_domain(theorem_corpus(grid, spec.box_lo, spec.box_hi, 1, cfg.seed).front(), spec);
      }
      char buf[512];
      std::snprintf(buf, sizeof buf,
                    "method,div_residual,normal_trace,orthogonality,reconstruction_error,iterations\n%s,%.17g,%.17g,%.17g,%.17g,%d\n",
                    r.method.c_str(), r.diag.div_residual, r.diag.normal_trace, r.diag.orthogonality,
                    r.diag.reconstruction_error, r.solve.iterations);
      write_file(out, "decompose.csv", buf);
      std::printf("%s: div residual %.3e, normal trace %.3e, orthogonality %.3e, reconstruction %.3e, %d iterations\n",
                  r.method.c_str(), r.diag.div_residual, r.diag.normal_trace, r.diag.orthogonality,
                  r.diag.reconstruction_error, r.solve.iterations);
      return 0;
    }
    if (*seminorm) {
      const DomainSpec spec = make_domain(cfg);
      const Grid grid = domain_grid(spec, static_cast<std::size_t>(grid_n));
      const SeminormContext ctx = make_context(spec, grid, kInf, kInf);
      const VectorField f = sample(grid, corpus_function(cfg.ndim, spec.box_lo, spec.box_hi, cfg.seed));
      const SeminormReport s = vbmo_norm(f, ctx);
      std::printf("bmo %.6g  b %.6g  L2 %.6g  vbmo %.6g  norm %.6g  (%zu balls)\n", s.bmo, s.b, s.l2, s.vbmo, s.norm,
                  ctx.balls.balls.size());
      if (!s.remark.empty()) std::printf("%s\n", s.remark.c_str());
      return 0;
    }
    if (*whitney) {
      const auto w = whitney_decompose(named_set(set_name, depth, cfg));
      const WhitneyCheck c = check_whitney(w);
      const KStarEstimate k = estimate_kstar(w, pairs, cfg.seed);
      std::printf("%zu cubes, %zu collar cells; separation %s, neighbours %s, disjoint %s; ratio [%.4f, %.4f]\n",
                  w.cubes.size(), w.collar.size(), c.separation_ok ? "ok" : "FAIL", c.neighbor_ok ? "ok" : "FAIL",
                  c.disjoint_ok ? "ok" : "FAIL", c.min_ratio, c.max_ratio);
      std::printf("chain constant K* ~ %.4f over %d pairs%s\n", k.kstar, k.pairs, k.connected ? "" : " (disconnected)");
      return c.separation_ok && c.neighbor_ok && c.disjoint_ok ? 0 : 1;
    }
    if (*extend) {
      const CellSet set = named_set(set_name, depth, cfg);
      const auto w = whitney_decompose(set);
      const auto wc = whitney_decompose(complement_in_box(set));
      const Grid grid = set.grid();
      Vec hi = set.lo;
      for (int a = 0; a < set.ndim; ++a) hi[a] += set.length;
      const auto fn = corpus_function(set.ndim, set.lo, hi, cfg.seed);
      if (delta == 0.0) delta = 40.0 * std::sqrt(static_cast<double>(set.ndim)) * set.cell();
      const ExtensionResult e = jones_extend(sample(grid, [&](const Vec& x) { return fn(x)[0]; }), 2.0, delta, w, wc);
      std::printf("restriction %s, support %s, max matches %d (bound %.3g), K* %.4f, ||h*|| ratio %.4g\n",
                  e.restriction_exact ? "exact" : "NOT exact", e.support_ok ? "within reach" : "OUTSIDE reach",
                  e.plan.max_count, e.plan.count_bound, e.plan.kstar, e.h_star_ratio);
      if (!e.plan.warning.empty()) std::printf("%s\n", e.plan.warning.c_str());
      return e.restriction_exact && e.support_ok ? 0 : 1;
    }
    if (*geometry || *verify) {
      if (*geometry) {
        cfg.select = SuiteSelection{false, true, true, false, false, false};
      } else {
        cfg.timing = cfg.timing || timing;
      }
      validate(cfg);
      const SuiteReport rep = run_suite(cfg);
      std::cout << format_report(rep, ReportFormat::text);
      const auto txt = emit_report(rep, ReportFormat::text, out);
      const auto csv = emit_report(rep, ReportFormat::csv, out);
      std::printf("reports: %s, %s\n", txt.string().c_str(), csv.string().c_str());
      return rep.exit_code();
    }
  } catch (const vbmo::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
