#pragma once

// Scenario files: a domain, named forms and paths, an optional cover and a
// list of check suites, in a sectioned key = value text format. Running a
// scenario produces a JSON report.
//
//   [scenario]
//   name = annulus-identities
//   domain = annulus
//   suites = identities
//   grid = 2048
//
//   [forms]
//   th = dtheta
//   w = expr 0, x
//
//   [paths]
//   core = fixture annulus-core
//   arc = curve cos(pi*t), sin(pi*t)
//
//   [identities]
//   paths = core, arc
//   words = th; th.th; th.w

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace itint {

inline constexpr const char* kReportSchema = "itint.report/1";

struct ScenarioEntry {
  std::string key;
  std::string value;
  int line = 0;
};

struct ScenarioSection {
  std::string name;
  int line = 0;
  std::vector<ScenarioEntry> entries;

  const ScenarioEntry* find(const std::string& key) const;
};

struct Scenario {
  std::string file;  // as given, used in diagnostics
  std::vector<ScenarioSection> sections;

  const ScenarioSection* section(const std::string& name) const;
};

// Throws ParseError with "file:line" locations.
Scenario parse_scenario(std::istream& in, const std::string& file);
Scenario load_scenario(const std::string& path);

struct RunOverrides {
  std::optional<int> grid;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol_abs;
  std::optional<double> tol_rel;
};

// Resolves every name first (ParseError on failure), then runs the suites.
// Errors raised by a check are recorded as failed checks.
nlohmann::json run_scenario(const Scenario& scenario, const RunOverrides& overrides = {});

bool report_passed(const nlohmann::json& report);

// Combined report for several scenarios.
nlohmann::json combine_reports(const std::vector<nlohmann::json>& reports);

// One row per check: scenario,suite,check,residual,tolerance,passed.
void write_csv(const nlohmann::json& combined, std::ostream& out);

}  // namespace itint
