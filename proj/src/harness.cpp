#include "vbmo/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>
#include <set>
#include <sstream>

#include <json.hpp>

#include "vbmo/cutoffs.hpp"
#include "vbmo/helmholtz.hpp"
#include "vbmo/whitney.hpp"

namespace vbmo {

// ---- configuration ----

namespace {

std::string scalar_text(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_array()) {
    std::string out;
    for (const auto& e : v) {
      if (!out.empty()) out += ",";
      out += scalar_text(e);
    }
    return out;
  }
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
    return buf;
  }
  throw ConfigError("unsupported config value: " + v.dump());
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  const std::string s = lower(v);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError(key + ": expected a boolean, got '" + v + "'");
}

}  // namespace

ConfigMap parse_config(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object of sections");
  ConfigMap out;
  for (const auto& [section, body] : j.items()) {
    if (!body.is_object()) throw ConfigError("config section '" + section + "' must be an object");
    for (const auto& [key, value] : body.items()) out[lower(section) + "." + lower(key)] = scalar_text(value);
  }
  return out;
}

ConfigMap load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void apply_env_overrides(ConfigMap& cfg, char** envp) {
  static const std::string prefix = "VBMO_";
  for (char** e = envp; e && *e; ++e) {
    const std::string entry(*e);
    if (entry.rfind(prefix, 0) != 0) continue;
    const auto eq = entry.find('=');
    if (eq == std::string::npos) continue;
    const std::string name = entry.substr(prefix.size(), eq - prefix.size());
    const auto us = name.find('_');
    if (us == std::string::npos || us == 0 || us + 1 == name.size()) continue;
    cfg[lower(name.substr(0, us)) + "." + lower(name.substr(us + 1))] = entry.substr(eq + 1);
  }
}

SuiteConfig suite_config_from(const ConfigMap& cfg) {
  SuiteConfig c;
  static const std::set<std::string> known = {
      "domain.kind",        "domain.ndim",        "domain.radius",   "domain.bump_amplitude", "domain.bump_width",
      "grid.sizes",         "epsilon.policy",     "epsilon.value",   "corpus.seed",           "corpus.size",
      "constants.c_star",   "constants.m0",       "constants.c0",    "constants.c_chart",     "suite.fields",
      "suite.domains",      "suite.cutoffs",      "suite.seminorms", "suite.whitney",         "suite.helmholtz",
      "suite.timing",       "suite.config_path"};
  for (const auto& [k, v] : cfg) {
    if (!known.count(k)) throw ConfigError("unknown config key '" + k + "'");
    if (k == "domain.kind") c.domain_kind = lower(v);
    else if (k == "domain.ndim") c.ndim = static_cast<int>(to_double(k, v));
    else if (k == "domain.radius") c.radius = to_double(k, v);
    else if (k == "domain.bump_amplitude") c.bump_amplitude = to_double(k, v);
    else if (k == "domain.bump_width") c.bump_width = to_double(k, v);
    else if (k == "grid.sizes") {
      c.grids.clear();
      std::stringstream ss(v);
      std::string item;
      while (std::getline(ss, item, ',')) c.grids.push_back(static_cast<int>(to_double(k, item)));
    } else if (k == "epsilon.policy") c.eps_policy = lower(v);
    else if (k == "epsilon.value") c.eps_value = to_double(k, v);
    else if (k == "corpus.seed") c.seed = static_cast<std::uint64_t>(to_double(k, v));
    else if (k == "corpus.size") c.corpus_size = static_cast<int>(to_double(k, v));
    else if (k == "constants.c_star") c.constants.C_star = to_double(k, v);
    else if (k == "constants.m0") c.constants.M0 = to_double(k, v);
    else if (k == "constants.c0") c.constants.c0 = to_double(k, v);
    else if (k == "constants.c_chart") c.constants.c_half = to_double(k, v);
    else if (k == "suite.fields") c.select.fields = to_bool(k, v);
    else if (k == "suite.domains") c.select.domains = to_bool(k, v);
    else if (k == "suite.cutoffs") c.select.cutoffs = to_bool(k, v);
    else if (k == "suite.seminorms") c.select.seminorms = to_bool(k, v);
    else if (k == "suite.whitney") c.select.whitney = to_bool(k, v);
    else if (k == "suite.helmholtz") c.select.helmholtz = to_bool(k, v);
    else if (k == "suite.timing") c.timing = to_bool(k, v);
    else if (k == "suite.config_path") c.config_path = v;
  }
  return c;
}

DomainSpec make_domain(const SuiteConfig& cfg) {
  const int n = cfg.ndim;
  if (n != 2 && n != 3) throw ConfigError("domain.ndim must be 2 or 3");
  DomainSpec s;
  if (cfg.domain_kind == "half_space") {
    Vec lo{0, 0, 0}, hi{0, 0, 0};
    for (int a = 0; a < n; ++a) {
      lo[a] = a == n - 1 ? -0.25 : 0.0;
      hi[a] = a == n - 1 ? 0.75 : 1.0;
    }
    s = DomainSpec::half_space(n, lo, hi);
  } else if (cfg.domain_kind == "ball") {
    s = DomainSpec::ball(n, {0, 0, 0}, cfg.radius);
  } else if (cfg.domain_kind == "bump") {
    auto H = std::make_shared<RadialSumGraph>(n - 1, std::vector<Bump>{Bump{{0, 0, 0}, cfg.bump_amplitude, cfg.bump_width}});
    const GraphBounds b = graph_bounds(*H, 0.5);
    const double K = std::max({b.sup_h, b.sup_grad, b.sup_hess});
    Vec lo{0, 0, 0}, hi{0, 0, 0};
    for (int a = 0; a < n; ++a) {
      lo[a] = a == n - 1 ? -0.3 : -0.5;
      hi[a] = a == n - 1 ? 0.7 : 0.5;
    }
    s = DomainSpec::graph_domain(n, H, 0.5, 0.9 * std::min(0.5, 2.0 / (n * K)), K, lo, hi);
  } else {
    throw ConfigError("domain.kind must be half_space, ball or bump");
  }
  s.constants = cfg.constants;
  return s;
}

Grid domain_grid(const DomainSpec& spec, std::size_t n) {
  Grid g = Grid::box(spec.ndim, n, spec.box_lo, spec.box_hi);
  if (spec.kind == DomainKind::half_space)
    for (int a = 0; a + 1 < spec.ndim; ++a) g.periodic[static_cast<std::size_t>(a)] = true;
  return g;
}

double suite_epsilon(const SuiteConfig& cfg, const DomainSpec& spec) {
  const double cap = epsilon_cap(spec);
  if (cfg.eps_policy == "cap_fraction") {
    if (!(cfg.eps_value > 0.0 && cfg.eps_value < 1.0)) throw ConfigError("epsilon.value must lie in (0, 1) for cap_fraction");
    return cfg.eps_value * cap;
  }
  if (cfg.eps_policy == "fixed") return cfg.eps_value;
  throw ConfigError("epsilon.policy must be cap_fraction or fixed");
}

void validate(const SuiteConfig& cfg) {
  if (cfg.grids.empty()) throw ConfigError("grid.sizes is empty");
  for (int n : cfg.grids)
    if (n < 16) throw ConfigError("grid sizes must be at least 16 per axis");
  if (cfg.corpus_size < 1) throw ConfigError("corpus.size must be positive");
  const DomainSpec spec = make_domain(cfg);
  const double eps = suite_epsilon(cfg, spec);
  if (!(eps > 0.0 && eps < epsilon_cap(spec)))
    throw ConfigError("epsilon exceeds the localization cap " + std::to_string(epsilon_cap(spec)) + " of the domain");
}

bool SuiteReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckRecord& c) { return c.pass || !c.hard; });
}

// ---- suite ----

namespace {

struct Outcome {
  double value = 0.0, bound = 0.0;
  bool pass = false;
  std::string note;
};

struct Item {
  std::string module, check;
  std::function<Outcome()> run;
  bool hard = true;
};

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

// Boundary sample points spread evenly over the sample list.
std::vector<Vec> boundary_points(const DomainSpec& spec, int count) {
  const auto s = boundary_samples(spec, spec.ndim == 2 ? 64 : 12);
  std::vector<Vec> out;
  if (s.empty()) return out;
  const std::size_t step = std::max<std::size_t>(1, s.size() / static_cast<std::size_t>(count));
  for (std::size_t i = 0; i < s.size() && out.size() < static_cast<std::size_t>(count); i += step) out.push_back(s[i].x);
  return out;
}

// 0.9 min{alpha, beta, reach, diam/4, 1/(k n K + k0)}; k0 keeps flat pieces finite.
double geometry_radius(const DomainSpec& spec, double k_factor, double k0) {
  const int n = spec.ndim;
  double r = std::min({spec.alpha, spec.beta, spec.reach, 0.25 * spec.diameter()});
  if (spec.K > 0.0 || k0 > 0.0) r = std::min(r, 1.0 / (k_factor * n * spec.K + k0));
  return 0.9 * r;
}

// A node of the grid deep inside the domain (largest signed distance).
Vec deep_point(const DomainSpec& spec, const Grid& g) {
  double best = -kInf;
  Vec x{0, 0, 0};
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Vec y = g.node(i);
    if (!spec.inside(y)) continue;
    const DistanceSample d = distance_at(spec, y);
    const double v = d.valid ? d.d : spec.band;
    // Prefer the point nearest the box centre among the deepest ones.
    Vec c = 0.5 * (spec.box_lo + spec.box_hi);
    const double score = v - 1e-6 * norm(y - c);
    if (score > best) {
      best = score;
      x = y;
    }
  }
  return x;
}

// Below two cells across the eps-ball the localized identity is not sampled.
std::optional<Outcome> unresolved(double eps, const Grid& g) {
  const double h = g.spacing[0];
  if (eps >= 2.0 * h) return std::nullopt;
  return Outcome{eps, 2.0 * h, false, fmt("eps %.3g below two cells (%.3g); raise epsilon or refine the grid", eps, 2.0 * h)};
}

std::vector<Item> build_items(const SuiteConfig& cfg) {
  std::vector<Item> items;
  const DomainSpec spec = make_domain(cfg);
  const int n = cfg.ndim;
  const double eps = suite_epsilon(cfg, spec);
  const std::uint64_t seed = cfg.seed;
  const int coarse = cfg.grids.front(), fine = cfg.grids.back();

  if (cfg.select.fields) {
    items.push_back({"fields", "whole-space projector orthogonality and reconstruction", [=] {
                       const Grid g = Grid::torus(n, static_cast<std::size_t>(coarse));
                       double worst = 0.0, bound_ok = 0.0;
                       for (int k = 0; k < cfg.corpus_size; ++k) {
                         VectorField f(g);
                         for (int a = 0; a < n; ++a)
                           f.c[static_cast<std::size_t>(a)] = synth_field(g, 2.0, seed + 101u * k + a).v;
                         const DecompositionResult r = project_whole_space(f);
                         worst = std::max({worst, r.diag.orthogonality, r.diag.reconstruction_error});
                         const double nf = lp_norm(f, 2.0);
                         bound_ok = std::max({bound_ok, lp_norm(r.f0, 2.0) / nf - 1.0, lp_norm(r.grad_p, 2.0) / nf - 1.0});
                       }
                       return Outcome{worst, 1e-10, worst <= 1e-10 && bound_ok <= 1e-12,
                                      fmt("max excess of component norms over the input %.3g", bound_ok)};
                     }});
    items.push_back({"fields", "half-space normal trace first-order decay", [=] {
                       Vec lo{0, 0, 0}, hi{0, 0, 0};
                       for (int a = 0; a < n; ++a) hi[a] = 1.0;
                       const auto fn = corpus_function(n, lo, hi, seed);
                       double prev = 0.0, rate = 0.0;
                       for (int N : {coarse, 2 * coarse}) {
                         Grid g = Grid::box(n, static_cast<std::size_t>(N), lo, hi);
                         for (int a = 0; a + 1 < n; ++a) g.periodic[static_cast<std::size_t>(a)] = true;
                         const DecompositionResult r = project_half_space(sample(g, fn));
                         if (prev > 0.0) rate = prev / r.diag.normal_trace;
                         prev = r.diag.normal_trace;
                       }
                       return Outcome{rate, 1.8, rate >= 1.8, "trace ratio per grid halving"};
                     }});
  }

  if (cfg.select.domains) {
    const auto pts = boundary_points(spec, 8);
    items.push_back({"domains", "chart seam normal component above 2/5", [=] {
                       double m = kInf;
                       for (const Vec& z : pts)
                         m = std::min(m, sample_lipschitz_constant(spec, z, geometry_radius(spec, 96.0, 4.0), 200, seed).min_normal_component);
                       return Outcome{m, 0.4, m > 0.4, ""};
                     }});
    items.push_back({"domains", "boundary-graph Lipschitz ratio within 13n", [=] {
                       double m = 0.0;
                       bool ok = true;
                       for (const Vec& z : pts) {
                         const auto a = sample_lipschitz_constant(spec, z, geometry_radius(spec, 96.0, 4.0), 200, seed);
                         m = std::max(m, a.gamma_ratio);
                         ok = ok && a.gamma_ok;
                       }
                       return Outcome{m, 13.0 * n, ok, ""};
                     }});
    items.push_back({"domains", "sphere-part Lipschitz ratio within 600 n^1.5", [=] {
                       double m = 0.0;
                       bool ok = true;
                       for (const Vec& z : pts) {
                         const auto a = sample_lipschitz_constant(spec, z, geometry_radius(spec, 96.0, 4.0), 200, seed);
                         m = std::max(m, a.sphere_ratio);
                         ok = ok && a.sphere_ok;
                       }
                       return Outcome{m, 600.0 * std::pow(n, 1.5), ok, ""};
                     }});
    items.push_back({"domains", "boundary patches star-like with respect to the core ball", [=] {
                       int bad = 0;
                       for (const Vec& z : pts)
                         if (!check_star_like(spec, z, geometry_radius(spec, 32.0, 0.0), 64, seed).pass) ++bad;
                       return Outcome{static_cast<double>(bad), 0.0, bad == 0, "patches with a multiply-crossing ray"};
                     }});
    items.push_back({"domains", "reach estimate consistent with analytic bounds", [=] {
                       const ReachReport r = estimate_reach(spec);
                       const double need = r.beta_bound_applies ? r.beta_bound : 0.0;
                       return Outcome{r.estimated, need, !r.flagged && r.estimated >= need, ""};
                     }});
  }

  if (cfg.select.cutoffs) {
    const Grid g = domain_grid(spec, static_cast<std::size_t>(coarse));
    items.push_back({"cutoffs", "interior cut-off plateau and support", [=] {
                       const auto a = audit_interior_cutoff(InteriorCutoff(n, deep_point(spec, g), eps), 2000, seed);
                       return Outcome{a.min_value, 0.0, a.plateau_ok && a.support_ok, ""};
                     }});
    const auto pts = boundary_points(spec, 4);
    items.push_back({"cutoffs", "boundary cut-off plateau and support", [=] {
                       bool ok = true;
                       for (const Vec& z : pts) {
                         const auto a = audit_boundary_cutoff(BoundaryCutoff(chart_at(spec, z), eps), spec, 500, seed);
                         ok = ok && a.plateau_ok && a.support_ok;
                       }
                       return Outcome{ok ? 1.0 : 0.0, 1.0, ok, ""};
                     }});
    items.push_back({"cutoffs", "scaled Hessian bound stable across dyadic eps", [=] {
                       std::vector<double> v;
                       for (double e : {eps, eps / 2, eps / 4})
                         v.push_back(audit_interior_cutoff(InteriorCutoff(n, deep_point(spec, g), e), 2000, seed).eps2_hessian);
                       const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
                       const double spread = *mx / *mn - 1.0;
                       return Outcome{spread, 0.01, spread <= 0.01, ""};
                     }});
    items.push_back({"cutoffs", "boundary cut-off flat along the normal in the 3 eps band", [=] {
                       double m = 0.0;
                       for (const Vec& z : pts)
                         m = std::max(m, audit_boundary_cutoff(BoundaryCutoff(chart_at(spec, z), eps), spec, 500, seed)
                                             .max_normal_derivative);
                       return Outcome{m, 1e-6, m < 1e-6, ""};
                     }});
  }

  if (cfg.select.seminorms) {
    const int small = n == 2 ? 32 : 16;
    items.push_back({"seminorms", "exhaustive ball sweep equals the brute-force oracle", [=] {
                       const Grid g = domain_grid(spec, static_cast<std::size_t>(small));
                       const Region R = region_from_spec(spec, g);
                       BallPolicySpec p;
                       p.kind = BallPolicy::exhaustive;
                       const auto u = sample(g, corpus_function(n, spec.box_lo, spec.box_hi, seed));
                       const double a = bmo_seminorm(u, R, make_ball_set(R, 0.25, p)).value;
                       const double b = brute_force_bmo(u, R, 0.25);
                       return Outcome{a, b, a == b, "exact equality required"};
                     }});
    items.push_back({"seminorms", "lattice ball policy within [0.9, 1] of exhaustive", [=] {
                       const Grid g = domain_grid(spec, static_cast<std::size_t>(small));
                       const Region R = region_from_spec(spec, g);
                       BallPolicySpec p;
                       p.kind = BallPolicy::exhaustive;
                       const auto u = sample(g, corpus_function(n, spec.box_lo, spec.box_hi, seed));
                       const double ex = bmo_seminorm(u, R, make_ball_set(R, 0.25, p)).value;
                       const double lat = bmo_seminorm(u, R, make_ball_set(R, 0.25, BallPolicySpec{})).value;
                       const double ratio = lat / ex;
                       return Outcome{ratio, 0.9, ratio >= 0.9 && ratio <= 1.0, ""};
                     }});
    items.push_back({"seminorms", "interpolation constant bounded over exponents", [=] {
                       const Grid g = domain_grid(spec, static_cast<std::size_t>(coarse));
                       const SeminormContext ctx = make_context(spec, g, kInf, kInf);
                       std::vector<double> cs;
                       for (int k = 0; k < cfg.corpus_size; ++k) {
                         const auto u = sample(g, [fn = corpus_function(n, spec.box_lo, spec.box_hi, seed + 7919u * k)](
                                                      const Vec& x) { return fn(x)[0]; });
                         for (double q : {2.0, 4.0, 8.0, 16.0}) cs.push_back(interpolation_constant(u, 2.0, q, ctx));
                       }
                       std::vector<double> s = cs;
                       std::sort(s.begin(), s.end());
                       const double spread = s.back() / s[s.size() / 2];
                       return Outcome{spread, 3.0, spread < 3.0, "max / median"};
                     }});
  }

  if (cfg.select.whitney) {
    const int depth = n == 2 ? 6 : 4;
    auto domain_cells = [spec, depth] {
      double len = 0.0;
      for (int a = 0; a < spec.ndim; ++a) len = std::max(len, spec.box_hi[a] - spec.box_lo[a]);
      return cell_set(spec, depth, spec.box_lo, len);
    };
    items.push_back({"whitney", "cube size comparable to distance and neighbour sizes", [=] {
                       const auto w = whitney_decompose(domain_cells());
                       const WhitneyCheck c = check_whitney(w);
                       return Outcome{c.max_ratio, 4.0 * std::sqrt(n), c.separation_ok && c.neighbor_ok && c.disjoint_ok,
                                      fmt("distance/side ratio in [%.3g, %.3g]", c.min_ratio, c.max_ratio)};
                     }});
    items.push_back({"whitney", "extension restricts exactly and stays near the domain", [=] {
                       const CellSet set = domain_cells();
                       const auto w = whitney_decompose(set);
                       const auto wc = whitney_decompose(complement_in_box(set));
                       const Grid g = set.grid();
                       const auto u = sample(g, [fn = corpus_function(n, spec.box_lo, spec.box_hi, seed)](const Vec& x) {
                         return fn(x)[0];
                       });
                       // Exterior cubes up to four cells wide are matched.
                       const ExtensionResult e = jones_extend(u, 2.0, 40.0 * std::sqrt(n) * set.cell(), w, wc);
                       return Outcome{static_cast<double>(e.plan.max_count), e.plan.count_bound,
                                      e.restriction_exact && e.support_ok && e.plan.max_count >= 1 &&
                                          e.plan.max_count <= e.plan.count_bound,
                                      "matched exterior cubes per interior cube"};
                     }});
  }

  if (cfg.select.helmholtz) {
    items.push_back({"helmholtz", "masked projection is orthogonal with zero boundary flux", [=] {
                       const Grid g = domain_grid(spec, static_cast<std::size_t>(coarse));
                       double worst = 0.0, trace = 0.0;
                       for (const VectorField& f : theorem_corpus(g, spec.box_lo, spec.box_hi, cfg.corpus_size, seed)) {
                         const DecompositionResult r = project_domain(f, spec);
                         worst = std::max({worst, std::fabs(r.diag.orthogonality), r.diag.reconstruction_error});
                         trace = std::max(trace, r.diag.normal_trace);
                       }
                       return Outcome{worst, 1e-10, worst <= 1e-10 && trace == 0.0, fmt("normal trace %.3g", trace)};
                     }});
    items.push_back({"helmholtz", "divergence solver residual first-order with zero trace", [=] {
                       const Vec c = deep_point(spec, domain_grid(spec, static_cast<std::size_t>(coarse)));
                       double prev = 0.0, rate = 0.0, trace = 0.0;
                       const double rad = 0.25;
                       for (int N : {32, 64}) {
                         Vec lo = c, hi = c;
                         for (int a = 0; a < n; ++a) {
                           lo[a] -= 1.25 * rad;
                           hi[a] += 1.25 * rad;
                         }
                         const Grid g = Grid::box(n, static_cast<std::size_t>(N), lo, hi);
                         const StarDomain d = star_ball(g, c, rad, 0.5 * rad);
                         const ScalarField data = sample(g, [c, rad](const Vec& x) {
                           const double t = dot(x - c, x - c) / (0.8 * rad * 0.8 * rad);
                           return t < 1.0 ? (x[0] - c[0]) * std::exp(1.0 - 1.0 / (1.0 - t)) : 0.0;
                         });
                         const BogovskiiResult b = bogovskii(data, d);
                         trace = std::max(trace, b.trace_max);
                         if (prev > 0.0) rate = prev / b.div_residual;
                         prev = b.div_residual;
                       }
                       return Outcome{rate, 1.8, rate >= 1.8 && trace == 0.0, "residual ratio per grid halving"};
                     }});
    items.push_back({"helmholtz", "interior localization identity", [=] {
                       const Grid g = domain_grid(spec, static_cast<std::size_t>(fine));
                       if (const auto u = unresolved(eps, g)) return *u;
                       const VectorField f = theorem_corpus(g, spec.box_lo, spec.box_hi, 1, seed).front();
                       const DecompositionResult dec = project_domain(f, spec);
                       const IdentityRecord r = localized_interior_identity(f, dec, spec, deep_point(spec, g), eps);
                       return Outcome{r.relative, 1e-8, r.relative <= 1e-8 && std::fabs(r.mean_defect) <= 1e-8,
                                      fmt("mean defect %.3g", r.mean_defect)};
                     }});
    items.push_back({"helmholtz", "boundary localization identity and vanishing b-term", [=] {
                       const Grid g = domain_grid(spec, static_cast<std::size_t>(fine));
                       if (const auto u = unresolved(eps, g)) return *u;
                       const VectorField f = theorem_corpus(g, spec.box_lo, spec.box_hi, 1, seed).front();
                       const DecompositionResult dec = project_domain(f, spec);
                       const Vec z0 = boundary_points(spec, 1).front();
                       const IdentityRecord r = localized_boundary_identity(f, dec, spec, z0, eps);
                       return Outcome{r.relative, 1e-8, r.relative <= 1e-8 && r.b_term <= 1e-8, fmt("b-term %.3g", r.b_term)};
                     }});
    items.push_back({"helmholtz", "empirical stability constant finite and grid-stable", [=] {
                       TheoremOptions opt;
                       opt.eps = eps;
                       opt.reference_grid = domain_grid(spec, static_cast<std::size_t>(coarse));
                       double prev = 0.0, change = 0.0;
                       for (int N : {coarse, fine}) {
                         const Grid g = domain_grid(spec, static_cast<std::size_t>(N));
                         const TheoremReport r =
                             verify_main_theorem(theorem_corpus(g, spec.box_lo, spec.box_hi, cfg.corpus_size, seed), spec, opt);
                         if (!std::isfinite(r.max_c)) return Outcome{r.max_c, 0.25, false, "non-finite constant"};
                         if (prev > 0.0) change = std::fabs(r.max_c - prev) / prev;
                         prev = r.max_c;
                       }
                       return Outcome{change, 0.25, change < 0.25, fmt("largest constant %.4g", prev)};
                     }});
  }
  return items;
}

}  // namespace

std::vector<std::string> required_checks(const std::string& module) {
  SuiteConfig all;
  std::vector<std::string> out;
  for (const Item& it : build_items(all))
    if (it.module == module) out.push_back(it.check);
  return out;
}

SuiteReport run_suite(const SuiteConfig& cfg) {
  SuiteReport rep;
  if (!cfg.select.any()) return rep;
  std::vector<Item> items;
  try {
    items = build_items(cfg);
  } catch (const std::exception& e) {
    rep.checks.push_back({1, "harness", "configuration", 0.0, 0.0, false, true, 0.0, std::string("error: ") + e.what()});
    return rep;
  }
  int id = 0;
  for (const Item& it : items) {
    CheckRecord rec;
    rec.id = ++id;
    rec.module = it.module;
    rec.check = it.check;
    rec.hard = it.hard;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const Outcome o = it.run();
      rec.value = o.value;
      rec.bound = o.bound;
      rec.pass = o.pass;
      rec.note = o.note;
    } catch (const std::exception& e) {
      rec.pass = false;
      rec.note = std::string("error: ") + e.what();
    }
    if (cfg.timing) rec.runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rep.checks.push_back(rec);
  }
  // Completeness: every expected property of each enabled module ran once.
  const std::vector<std::pair<std::string, bool>> modules = {
      {"fields", cfg.select.fields},       {"domains", cfg.select.domains}, {"cutoffs", cfg.select.cutoffs},
      {"seminorms", cfg.select.seminorms}, {"whitney", cfg.select.whitney}, {"helmholtz", cfg.select.helmholtz}};
  int missing = 0;
  std::string which;
  for (const auto& [m, on] : modules) {
    if (!on) continue;
    for (const std::string& c : required_checks(m)) {
      const auto hits = std::count_if(rep.checks.begin(), rep.checks.end(),
                                      [&](const CheckRecord& r) { return r.module == m && r.check == c; });
      if (hits != 1) {
        ++missing;
        which += (which.empty() ? "" : "; ") + c;
      }
    }
  }
  rep.checks.push_back({++id, "harness", "every expected check ran exactly once", static_cast<double>(missing), 0.0,
                        missing == 0, true, 0.0, which});
  return rep;
}

// ---- reports ----

namespace {

const char* kColumns = "id,module,check,value,bound,pass,hard,runtime,note";

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string cell;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      row.push_back(cell);
      cell.clear();
      any = true;
    } else if (c == '\n') {
      row.push_back(cell);
      rows.push_back(row);
      row.clear();
      cell.clear();
      any = false;
    } else if (c != '\r') {
      cell += c;
      any = true;
    }
  }
  if (quoted) throw FormatError("unterminated quote in CSV");
  if (any) {
    row.push_back(cell);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

std::string format_report(const SuiteReport& r, ReportFormat f) {
  std::ostringstream os;
  if (f == ReportFormat::csv) {
    os << kColumns << "\n";
    for (const CheckRecord& c : r.checks)
      os << c.id << "," << csv_quote(c.module) << "," << csv_quote(c.check) << "," << num(c.value) << ","
         << num(c.bound) << "," << (c.pass ? 1 : 0) << "," << (c.hard ? 1 : 0) << "," << num(c.runtime) << ","
         << csv_quote(c.note) << "\n";
    return os.str();
  }
  for (const CheckRecord& c : r.checks) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "value %.6g bound %.6g", c.value, c.bound);
    os << "[" << (c.pass ? "PASS" : (c.hard ? "FAIL" : "WARN")) << "] " << c.id << " " << c.module << ": " << c.check
       << " (" << buf;
    if (c.runtime > 0.0) os << ", " << c.runtime << " s";
    os << ")";
    if (!c.note.empty()) os << " " << c.note;
    os << "\n";
  }
  const auto passed = std::count_if(r.checks.begin(), r.checks.end(), [](const CheckRecord& c) { return c.pass; });
  os << passed << "/" << r.checks.size() << " checks passed\n";
  return os.str();
}

SuiteReport parse_report_csv(const std::string& csv) {
  const auto rows = csv_rows(csv);
  if (rows.empty()) throw FormatError("missing CSV header");
  std::string header;
  for (std::size_t i = 0; i < rows[0].size(); ++i) header += (i ? "," : "") + rows[0][i];
  if (header != kColumns) throw FormatError("unexpected CSV header: " + header);
  SuiteReport r;
  for (std::size_t k = 1; k < rows.size(); ++k) {
    const auto& c = rows[k];
    if (c.size() != 9) throw FormatError("CSV row " + std::to_string(k) + " has " + std::to_string(c.size()) + " cells");
    try {
      r.checks.push_back({std::stoi(c[0]), c[1], c[2], std::stod(c[3]), std::stod(c[4]), c[5] == "1", c[6] == "1",
                          std::stod(c[7]), c[8]});
    } catch (const std::logic_error&) {
      throw FormatError("malformed number in CSV row " + std::to_string(k));
    }
  }
  return r;
}

std::filesystem::path emit_report(const SuiteReport& r, ReportFormat f, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  const auto path = dir / (f == ReportFormat::csv ? "report.csv" : "report.txt");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out << format_report(r, f);
  if (!out) throw FormatError("write failed for " + path.string());
  return path;
}

}  // namespace vbmo
