// itint: run scenario files, list bundled fixtures, evaluate single
// iterated integrals.

#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "itint/errors.hpp"
#include "itint/evaluator.hpp"
#include "itint/fixtures.hpp"
#include "itint/scenario.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitParse = 2;

// A bare name such as "annulus-identities" refers to a bundled scenario.
std::string resolve_scenario(const std::string& arg) {
  if (fs::exists(arg)) return arg;
  for (const std::string& candidate : {std::string(ITINT_SCENARIO_DIR) + "/" + arg + ".scn",
                                       std::string(ITINT_SCENARIO_DIR) + "/" + arg})
    if (fs::exists(candidate)) return candidate;
  return arg;
}

struct Outcome {
  std::optional<json> report;
  std::string error;
};

Outcome run_one(const std::string& file, const itint::RunOverrides& ov) {
  try {
    return {itint::run_scenario(itint::load_scenario(file), ov), {}};
  } catch (const itint::ParseError& e) {
    return {std::nullopt, e.what()};
  } catch (const std::exception& e) {
    return {std::nullopt, file + ": " + e.what()};
  }
}

void print_summary(const json& report) {
  const bool ok = itint::report_passed(report);
  std::cerr << (ok ? "PASS " : "FAIL ") << report.at("scenario").get<std::string>() << " ("
            << report.at("summary").at("checks").get<std::size_t>() << " checks, "
            << report.at("summary").at("failed").get<std::size_t>() << " failed)\n";
  if (ok) return;
  for (const auto& s : report.at("suites"))
    for (const auto& c : s.at("checks")) {
      if (c.at("passed").get<bool>()) continue;
      std::cerr << "  " << s.at("name").get<std::string>() << ": " << c.at("name").get<std::string>();
      if (c.contains("residual")) std::cerr << "  residual " << c.at("residual") << " > " << c.at("tolerance");
      if (c.contains("minimum")) std::cerr << "  value " << c.at("value") << " < " << c.at("minimum");
      if (c.contains("error")) std::cerr << "  error: " << c.at("error").get<std::string>();
      std::cerr << '\n';
    }
}

int cmd_run(const std::vector<std::string>& files, const itint::RunOverrides& ov, const std::string& out,
            const std::string& csv) {
  std::vector<std::future<Outcome>> jobs;
  for (const auto& f : files)
    jobs.push_back(std::async(std::launch::async, run_one, resolve_scenario(f), ov));

  std::vector<json> reports;
  bool parse_failure = false;
  for (auto& j : jobs) {
    Outcome o = j.get();
    if (!o.report) {
      std::cerr << "error: " << o.error << '\n';
      parse_failure = true;
      continue;
    }
    print_summary(*o.report);
    reports.push_back(std::move(*o.report));
  }
  const json combined = itint::combine_reports(reports);
  if (!out.empty()) {
    std::ofstream os(out);
    if (!os) {
      std::cerr << "error: cannot write " << out << '\n';
      return kExitParse;
    }
    os << combined.dump(2) << '\n';
  } else {
    std::cout << combined.dump(2) << '\n';
  }
  if (!csv.empty()) {
    std::ofstream os(csv);
    itint::write_csv(combined, os);
  }
  if (parse_failure) return kExitParse;
  return itint::report_passed(combined) ? kExitPass : kExitFail;
}

int cmd_fixtures(bool as_json) {
  const auto cat = itint::fixtures::catalog();
  if (as_json) {
    json j = json::array();
    for (const auto& e : cat) j.push_back({{"kind", e.kind}, {"name", e.name}, {"description", e.description}});
    std::cout << j.dump(2) << '\n';
    return kExitPass;
  }
  for (const auto& e : cat) std::cout << e.kind << '\t' << e.name << '\t' << e.description << '\n';
  return kExitPass;
}

int cmd_eval(const std::string& path_name, const std::vector<std::string>& letters, const std::string& domain_name,
             int grid) {
  using namespace itint;
  if (!fixtures::has_loop(path_name)) {
    std::cerr << "error: unknown path '" << path_name << "' (see `itint fixtures`)\n";
    return kExitParse;
  }
  SampledPath p = domain_name.empty() ? fixtures::loop(path_name)
                                      : fixtures::loop(path_name, fixtures::domain(domain_name));
  SymbolRegistry reg;
  Binding b;
  Word w;
  for (const auto& token : letters) {
    std::istringstream in(token);
    for (std::string l; std::getline(in, l, '.');) {
      if (l.empty()) continue;
      if (!fixtures::has_form(l)) {
        std::cerr << "error: unknown form '" << l << "' (see `itint fixtures`)\n";
        return kExitParse;
      }
      const SymbolId id = reg.intern(l).id;
      if (!b.contains(id)) b.bind(id, fixtures::form(l, p.domain_ptr()));
      w.push_back(id);
    }
  }
  QuadratureOptions opts;
  opts.grid = grid;
  const auto r = iterint(p, w, b, opts);
  const json j = {{"path", path_name},
                  {"domain", p.domain().name()},
                  {"word", format_word(w, reg)},
                  {"value", {r.value.real(), r.value.imag()}},
                  {"richardson_error", r.richardson_error},
                  {"grid", r.grid}};
  std::cout << j.dump(2) << '\n';
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Iterated path integrals: scenario runner and fixture catalog"};
  app.require_subcommand(1);

  std::vector<std::string> files;
  itint::RunOverrides ov;
  std::string out, csv;
  auto* run = app.add_subcommand("run", "Run scenario files (or bundled scenario names)");
  run->add_option("files", files, "Scenario files")->required();
  run->add_option_function<int>("--grid", [&](const int& v) { ov.grid = v; }, "Trapezoid intervals per piece");
  run->add_option_function<std::uint64_t>("--seed", [&](const std::uint64_t& v) { ov.seed = v; }, "Sample seed");
  run->add_option_function<double>("--tol-abs", [&](const double& v) { ov.tol_abs = v; }, "Absolute tolerance");
  run->add_option_function<double>("--tol-rel", [&](const double& v) { ov.tol_rel = v; }, "Relative tolerance");
  run->add_option("--out", out, "Write the JSON report here instead of stdout");
  run->add_option("--csv", csv, "Also write a CSV table of checks");

  bool as_json = false;
  auto* fx = app.add_subcommand("fixtures", "List bundled domains, forms, loops and covers");
  fx->add_flag("--json", as_json, "JSON output");

  std::string path_name, domain_name;
  std::vector<std::string> letters;
  int grid = 1024;
  auto* ev = app.add_subcommand("eval", "Iterated integral of a word of bundled forms along a bundled loop");
  ev->add_option("--path", path_name, "Loop fixture")->required();
  ev->add_option("--word", letters, "Form names, separated by spaces or dots")->required();
  ev->add_option("--domain", domain_name, "Domain fixture (defaults to the loop's)");
  ev->add_option("--grid", grid, "Trapezoid intervals per piece")->check(CLI::Range(4, 1 << 22));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitParse;
  }

  try {
    if (*run) return cmd_run(files, ov, out, csv);
    if (*fx) return cmd_fixtures(as_json);
    return cmd_eval(path_name, letters, domain_name, grid);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFail;
  }
}
