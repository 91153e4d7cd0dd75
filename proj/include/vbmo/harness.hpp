// Configuration, the audit suite runner and report emission.
//
// Config files are JSON objects of sections, e.g. {"grid": {"sizes": [32, 64]}}.
// Every key can be overridden from the environment as VBMO_<SECTION>_<KEY>
// (upper case); list values are comma separated.
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "vbmo/domains.hpp"

namespace vbmo {

// Flattened "section.key" -> value text.
using ConfigMap = std::map<std::string, std::string>;

ConfigMap parse_config(const std::string& json_text);
ConfigMap load_config(const std::filesystem::path& path);
// envp: a null-terminated "NAME=value" array (environ in production).
void apply_env_overrides(ConfigMap& cfg, char** envp);

struct SuiteSelection {
  bool fields = true, domains = true, cutoffs = true, seminorms = true, whitney = true, helmholtz = true;
  bool any() const { return fields || domains || cutoffs || seminorms || whitney || helmholtz; }
};

struct SuiteConfig {
  std::string config_path;
  std::string domain_kind = "half_space";   // half_space | ball | bump
  int ndim = 2;
  double radius = 0.4;                     // ball
  double bump_amplitude = 0.05, bump_width = 0.4;
  std::vector<int> grids{64, 128};
  std::string eps_policy = "cap_fraction";  // cap_fraction | fixed
  double eps_value = 0.95;
  std::uint64_t seed = 1;
  int corpus_size = 4;
  DomainConstants constants{1.0, 1.0, 0.5, 0.25, 0.0};
  SuiteSelection select;
  bool timing = false;
};

SuiteConfig suite_config_from(const ConfigMap& cfg);
// Grid sizes >= 16, a bounded domain kind, eps below the localization cap.
void validate(const SuiteConfig& cfg);

DomainSpec make_domain(const SuiteConfig& cfg);
// Cell-centred grid over the domain box; tangential axes of a half space
// are periodic.
Grid domain_grid(const DomainSpec& spec, std::size_t n);
double suite_epsilon(const SuiteConfig& cfg, const DomainSpec& spec);

struct CheckRecord {
  int id = 0;
  std::string module;
  std::string check;     // the property audited
  double value = 0.0;
  double bound = 0.0;
  bool pass = false;
  bool hard = true;      // a failing hard check makes the exit status nonzero
  double runtime = 0.0;  // seconds, 0 unless timing is enabled
  std::string note;
};

struct SuiteReport {
  std::vector<CheckRecord> checks;
  bool ok() const;
  int exit_code() const { return ok() ? 0 : 1; }
};

// Every property the suite is expected to cover for a module.
std::vector<std::string> required_checks(const std::string& module);

// Runs the selected audits in dependency order with fixed seeds. Errors are
// recorded per item and the suite continues.
SuiteReport run_suite(const SuiteConfig& cfg);

enum class ReportFormat { text, csv };
std::string format_report(const SuiteReport& r, ReportFormat f);
SuiteReport parse_report_csv(const std::string& csv);
// Writes report.txt or report.csv under dir; FormatError when unwritable.
std::filesystem::path emit_report(const SuiteReport& r, ReportFormat f, const std::filesystem::path& dir);

}  // namespace vbmo
