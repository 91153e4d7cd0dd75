#include <doctest.h>

#include <filesystem>

#include "vbmo/harness.hpp"
#include "vbmo/helmholtz.hpp"

using namespace vbmo;

namespace {
SuiteConfig geometry_only() {
  SuiteConfig c;
  c.select = SuiteSelection{false, true, true, false, false, false};
  return c;
}
}  // namespace

TEST_CASE("config sections flatten and the environment overrides them") {
  ConfigMap m = parse_config(R"({"grid": {"sizes": [32, 64]}, "corpus": {"seed": 7}, "domain": {"kind": "ball"}})");
  CHECK(m.at("grid.sizes") == "32,64");
  std::string a = "VBMO_CORPUS_SEED=11", b = "VBMO_DOMAIN_NDIM=3", c = "PATH=/bin";
  char* env[] = {a.data(), b.data(), c.data(), nullptr};
  apply_env_overrides(m, env);
  const SuiteConfig cfg = suite_config_from(m);
  CHECK(cfg.seed == 11);
  CHECK(cfg.ndim == 3);
  CHECK(cfg.domain_kind == "ball");
  CHECK(cfg.grids == std::vector<int>{32, 64});
}

TEST_CASE("bad configurations are rejected") {
  CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"grid": 3})"), ConfigError);
  CHECK_THROWS_AS(suite_config_from(parse_config(R"({"grid": {"colour": 1}})")), ConfigError);
  SuiteConfig small;
  small.grids = {8, 64};
  CHECK_THROWS_AS(validate(small), ConfigError);
  SuiteConfig big_eps;
  big_eps.eps_policy = "fixed";
  big_eps.eps_value = 0.5;
  CHECK_THROWS_AS(validate(big_eps), ConfigError);
  SuiteConfig ok;
  CHECK_NOTHROW(validate(ok));
}

TEST_CASE("suite epsilon stays below the cap") {
  SuiteConfig c;
  const DomainSpec spec = make_domain(c);
  CHECK(suite_epsilon(c, spec) < epsilon_cap(spec));
  CHECK(suite_epsilon(c, spec) > 0.0);
}

TEST_CASE("empty selection gives an empty passing report") {
  SuiteConfig c;
  c.select = SuiteSelection{false, false, false, false, false, false};
  const SuiteReport r = run_suite(c);
  CHECK(r.checks.empty());
  CHECK(r.exit_code() == 0);
  CHECK(format_report(r, ReportFormat::csv) == "id,module,check,value,bound,pass,hard,runtime,note\n");
}

TEST_CASE("CSV reports round-trip") {
  SuiteReport r;
  r.checks.push_back({1, "domains", "a check, with \"quotes\"", 0.1 + 0.2, 1.0 / 3.0, true, true, 0.0, "note"});
  SuiteReport back = parse_report_csv(format_report(r, ReportFormat::csv));
  REQUIRE(back.checks.size() == 1);
  CHECK(back.checks[0].check == r.checks[0].check);
  CHECK(back.checks[0].value == r.checks[0].value);
  CHECK(back.checks[0].bound == r.checks[0].bound);
  CHECK(format_report(back, ReportFormat::csv) == format_report(r, ReportFormat::csv));

  SuiteReport many;
  for (int i = 0; i < 100; ++i)
    many.checks.push_back({i, "m", "c" + std::to_string(i), i * 1e-3, 1.0, i % 3 != 0, i % 2 == 0, 0.0, ""});
  const SuiteReport m2 = parse_report_csv(format_report(many, ReportFormat::csv));
  REQUIRE(m2.checks.size() == 100);
  for (int i = 0; i < 100; ++i) {
    CHECK(m2.checks[static_cast<std::size_t>(i)].pass == (i % 3 != 0));
    CHECK(m2.checks[static_cast<std::size_t>(i)].hard == (i % 2 == 0));
  }
  CHECK_THROWS_AS(parse_report_csv("wrong,header\n"), FormatError);
}

TEST_CASE("a soft failure does not change the exit status") {
  SuiteReport r;
  r.checks.push_back({1, "m", "soft", 2.0, 1.0, false, false, 0.0, ""});
  CHECK(r.exit_code() == 0);
  r.checks.push_back({2, "m", "hard", 2.0, 1.0, false, true, 0.0, ""});
  CHECK(r.exit_code() == 1);
}

TEST_CASE("geometry suite is deterministic and complete") {
  const SuiteConfig c = geometry_only();
  const SuiteReport a = run_suite(c), b = run_suite(c);
  CHECK(format_report(a, ReportFormat::csv) == format_report(b, ReportFormat::csv));
  std::size_t expected = required_checks("domains").size() + required_checks("cutoffs").size();
  CHECK(a.checks.size() == expected + 1);
  CHECK(a.checks.back().check == "every expected check ran exactly once");
  CHECK(a.checks.back().pass);
  for (const auto& r : a.checks) CHECK_MESSAGE(r.pass, r.module << ": " << r.check << " " << r.note);
  for (const auto& r : a.checks) CHECK(r.runtime == 0.0);
}

TEST_CASE("reports are written to the output directory") {
  const auto dir = std::filesystem::temp_directory_path() / "vbmo-harness-test";
  std::filesystem::remove_all(dir);
  SuiteReport r;
  r.checks.push_back({1, "m", "c", 1.0, 2.0, true, true, 0.0, ""});
  const auto p = emit_report(r, ReportFormat::csv, dir);
  CHECK(std::filesystem::exists(p));
  CHECK(p.filename() == "report.csv");
  std::filesystem::remove_all(dir);
}

TEST_CASE("localization checks report an unresolved epsilon instead of running") {
  SuiteConfig c;
  c.domain_kind = "ball";
  c.grids = {32, 64};
  c.corpus_size = 1;
  c.select = SuiteSelection{false, false, false, false, false, true};
  const DomainSpec spec = make_domain(c);
  REQUIRE(suite_epsilon(c, spec) < 2.0 / 64.0);
  const SuiteReport r = run_suite(c);
  int flagged = 0;
  for (const CheckRecord& k : r.checks)
    if (k.check.find("localization identity") != std::string::npos) {
      CHECK_FALSE(k.pass);
      CHECK(k.note.find("below two cells") != std::string::npos);
      ++flagged;
    }
  CHECK(flagged == 2);
  CHECK(r.exit_code() == 1);  // hard checks
}
