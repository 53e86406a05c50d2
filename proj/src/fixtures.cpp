#include "itint/fixtures.hpp"

#include <map>
#include <mutex>
#include <numbers>

#include "itint/errors.hpp"

namespace itint::fixtures {

namespace {

struct FormDef {
  std::vector<std::string> coefficients;
  std::string description;
};

const std::map<std::string, FormDef>& form_table() {
  static const std::map<std::string, FormDef> t = {
      {"dtheta", {{"-y/(x^2+y^2)", "x/(x^2+y^2)"}, "winding form about the origin"}},
      {"dr", {{"x/sqrt(x^2+y^2)", "y/sqrt(x^2+y^2)"}, "radial differential, exact"}},
      {"dx", {{"1", "0"}, "coordinate differential"}},
      {"dy", {{"0", "1"}, "coordinate differential"}},
      {"xdy", {{"0", "x"}, "x dy, not closed"}},
      {"ydx", {{"y", "0"}, "y dx, not closed"}},
      {"rdtheta", {{"-y/sqrt(x^2+y^2)", "x/sqrt(x^2+y^2)"}, "r dtheta, not closed"}},
      {"dtheta1", {{"-y/((x+1)^2+y^2)", "(x+1)/((x+1)^2+y^2)"}, "winding form about (-1,0)"}},
      {"dtheta2", {{"-y/((x-1)^2+y^2)", "(x-1)/((x-1)^2+y^2)"}, "winding form about (1,0)"}},
  };
  return t;
}

struct LoopDef {
  std::string domain;
  std::vector<std::vector<std::string>> pieces;  // coordinates in t per piece
  std::string description;
};

const std::map<std::string, LoopDef>& loop_table() {
  static const std::map<std::string, LoopDef> t = {
      {"annulus-core", {"annulus", {{"cos(2*pi*t)", "sin(2*pi*t)"}}, "unit circle from (1,0), winding 1"}},
      {"upper-half", {"annulus", {{"cos(pi*t)", "sin(pi*t)"}}, "upper unit semicircle (1,0) -> (-1,0)"}},
      {"lower-half", {"annulus", {{"cos(pi*t)", "-sin(pi*t)"}}, "lower unit semicircle (1,0) -> (-1,0)"}},
      {"figure-eight",
       {"twice-punctured-plane",
        {{"-1+cos(2*pi*t)", "sin(2*pi*t)"}, {"1-cos(2*pi*t)", "-sin(2*pi*t)"}},
        "around (-1,0) then (1,0), based at the origin"}},
  };
  return t;
}

const std::map<std::string, std::string>& domain_table() {
  static const std::map<std::string, std::string> t = {
      {"annulus", "0.5 < |x| < 2"},
      {"punctured-plane", "R^2 minus the origin"},
      {"twice-punctured-plane", "R^2 minus (-1,0) and (1,0)"},
      {"strip", "(theta, r) with 0.5 < r < 2"},
      {"plane", "R^2"},
      {"rectangle", "(-1,1) x (-1,1)"},
      {"disk", "unit disk about the origin"},
      {"torus-chart", "fundamental square [0,1]^2 of the torus with periodic forms"},
  };
  return t;
}

const std::map<std::string, std::string>& cover_table() {
  static const std::map<std::string, std::string> t = {
      {"strip-cover", "strip over the annulus, deck group Z by theta -> theta + 2 pi"},
      {"torus-cover", "plane over the unit torus, deck group Z^2 by unit translations"},
  };
  return t;
}

}  // namespace

std::vector<CatalogEntry> catalog() {
  std::vector<CatalogEntry> out;
  for (const auto& [n, d] : domain_table()) out.push_back({"domain", n, d});
  for (const auto& [n, d] : form_table()) out.push_back({"form", n, d.description});
  for (const auto& [n, d] : loop_table()) out.push_back({"loop", n, d.description + " on " + d.domain});
  for (const auto& [n, d] : cover_table()) out.push_back({"cover", n, d});
  return out;
}

bool has_domain(const std::string& name) { return domain_table().count(name) != 0; }
bool has_form(const std::string& name) { return form_table().count(name) != 0; }
bool has_loop(const std::string& name) { return loop_table().count(name) != 0; }
bool has_cover(const std::string& name) { return cover_table().count(name) != 0; }

DomainPtr domain(const std::string& name) {
  static std::mutex m;
  static std::map<std::string, DomainPtr> made;
  std::lock_guard lock(m);
  if (auto it = made.find(name); it != made.end()) return it->second;
  DomainPtr d;
  if (name == "annulus")
    d = domains::annulus(0.5, 2.0);
  else if (name == "punctured-plane")
    d = domains::punctured_plane();
  else if (name == "twice-punctured-plane")
    d = domains::twice_punctured_plane();
  else if (name == "strip")
    d = domains::strip(0.5, 2.0, 3.0 * std::numbers::pi);
  else if (name == "plane")
    d = domains::plane(2);
  else if (name == "rectangle")
    d = domains::rectangle({-1.0, -1.0}, {1.0, 1.0});
  else if (name == "disk")
    d = domains::disk(1.0);
  else if (name == "torus-chart")
    d = cover("torus-cover").base_domain();
  else
    throw DomainError("unknown domain '" + name + "'");
  made.emplace(name, d);
  return d;
}

std::vector<std::string> form_expressions(const std::string& name) {
  auto it = form_table().find(name);
  if (it == form_table().end()) throw DomainError("unknown form '" + name + "'");
  return it->second.coefficients;
}

OneForm form(const std::string& name, const DomainPtr& on) {
  if (on->dimension() != 2) throw DomainError("bundled forms live on 2-dimensional domains");
  std::vector<Expression> cs;
  for (const auto& text : form_expressions(name)) cs.push_back(Expression::parse(text, Expression::coordinate_names(2)));
  return OneForm::from_expressions(on, std::move(cs));
}

SampledPath loop(const std::string& name) {
  auto it = loop_table().find(name);
  if (it == loop_table().end()) throw DomainError("unknown loop '" + name + "'");
  return loop(name, domain(it->second.domain));
}

SampledPath loop(const std::string& name, const DomainPtr& on) {
  auto it = loop_table().find(name);
  if (it == loop_table().end()) throw DomainError("unknown loop '" + name + "'");
  const Expression::VariableNames t{{"t"}};
  std::optional<SampledPath> out;
  for (const auto& piece : it->second.pieces) {
    std::vector<Expression> xs;
    for (const auto& text : piece) xs.push_back(Expression::parse(text, t));
    SampledPath p = SampledPath::from_expressions(on, std::move(xs));
    out = out ? compose(*out, p) : std::move(p);
  }
  return *out;
}

const CoverSpace& cover(const std::string& name) {
  if (name == "strip-cover") {
    static const CoverSpace c = covers::strip_annulus(0.5, 2.0, 1.0);
    return c;
  }
  if (name == "torus-cover") {
    static const CoverSpace c = covers::plane_torus(1.0);
    return c;
  }
  throw DomainError("unknown cover '" + name + "'");
}

}  // namespace itint::fixtures
