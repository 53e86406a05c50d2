#include <doctest.h>

#include <sstream>

#include "itint/errors.hpp"
#include "itint/scenario.hpp"

using namespace itint;

namespace {

Scenario parse(const std::string& text) {
  std::istringstream in(text);
  return parse_scenario(in, "mem.scn");
}

const char* kPairing = R"(# comment
[scenario]
name = pairing
cover = strip-cover
suites = pairing

[forms]
th = dtheta

[pairing]
elements = 1; th; th.th
etas = 1; (1); (1)(1)
diagonal = 1; 2*pi; (2*pi)^2
rank = 3
)";

std::string location_of(const std::string& text) {
  try {
    run_scenario(parse(text));
  } catch (const ParseError& e) {
    return e.location();
  }
  return {};
}

}  // namespace

TEST_CASE("sections and entries keep their lines") {
  const Scenario sc = parse(kPairing);
  REQUIRE(sc.section("pairing"));
  const auto* e = sc.section("pairing")->find("rank");
  REQUIRE(e);
  CHECK(e->value == "3");
  CHECK(e->line == 14);
  CHECK(sc.section("homotopy") == nullptr);
}

TEST_CASE("syntax errors carry file and line") {
  try {
    parse("[scenario]\nname = x\nbogus line\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.location() == "mem.scn:3");
  }
  CHECK_THROWS_AS(parse("[nope]\n"), ParseError);
  CHECK_THROWS_AS(parse("[scenario]\nname = a\nname = b\n"), ParseError);
  CHECK_THROWS_AS(parse("[forms]\nth = dtheta\n"), ParseError);
}

TEST_CASE("unknown names are located") {
  std::string text = kPairing;
  text.replace(text.find("th = dtheta"), 11, "th = dtheta9");
  CHECK(location_of(text) == "mem.scn:8");
  std::string bad_word = kPairing;
  bad_word.replace(bad_word.find("1; th; th.th"), 12, "1; th; th.zz");
  CHECK(location_of(bad_word) == "mem.scn:11");
}

TEST_CASE("report structure and pass state") {
  const auto report = run_scenario(parse(kPairing));
  CHECK(report.at("schema") == kReportSchema);
  CHECK(report.at("scenario") == "pairing");
  CHECK(report_passed(report));
  CHECK(report.at("summary").at("failed") == 0);
  CHECK(report.at("suites").size() == 1);
}

TEST_CASE("overrides reach the settings and can fail checks") {
  RunOverrides ov;
  ov.tol_abs = 1e-30;
  ov.tol_rel = 1e-30;
  const auto report = run_scenario(parse(kPairing), ov);
  CHECK(report.at("settings").at("tol_abs") == 1e-30);
  CHECK_FALSE(report_passed(report));
  RunOverrides bad;
  bad.grid = 2;
  CHECK_THROWS_AS(run_scenario(parse(kPairing), bad), ParseError);
}

TEST_CASE("reports are deterministic") {
  const Scenario sc = parse(kPairing);
  CHECK(run_scenario(sc).dump() == run_scenario(sc).dump());
}

TEST_CASE("csv has one row per check") {
  const auto report = run_scenario(parse(kPairing));
  std::ostringstream os;
  write_csv(combine_reports({report}), os);
  const std::string csv = os.str();
  std::size_t rows = 0;
  for (char c : csv) rows += c == '\n';
  CHECK(rows == 1 + report.at("summary").at("checks").get<std::size_t>());
}
