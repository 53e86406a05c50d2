#include "itint/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "itint/cover.hpp"
#include "itint/errors.hpp"
#include "itint/evaluator.hpp"
#include "itint/fixtures.hpp"
#include "itint/homotopy.hpp"
#include "itint/invariants.hpp"

namespace itint {

using nlohmann::json;

namespace {

const std::set<std::string> kSections = {"scenario", "forms",  "paths", "covers",  "identities",
                                         "homotopy", "defining-system", "order", "pairing", "coboundary"};
const std::set<std::string> kSuites = {"identities", "homotopy", "defining-system", "order", "pairing", "coboundary"};

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == sep && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  out.erase(std::remove(out.begin(), out.end(), std::string{}), out.end());
  return out;
}

std::vector<std::string> words_of(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

bool is_identifier(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

constexpr double kMinOrder = 1.9;
constexpr double kConvergenceFloor = 1e-12;

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

}  // namespace

const ScenarioEntry* ScenarioSection::find(const std::string& key) const {
  for (const auto& e : entries)
    if (e.key == key) return &e;
  return nullptr;
}

const ScenarioSection* Scenario::section(const std::string& name) const {
  for (const auto& s : sections)
    if (s.name == name) return &s;
  return nullptr;
}

Scenario parse_scenario(std::istream& in, const std::string& file) {
  Scenario sc;
  sc.file = file;
  auto loc = [&](int line) { return file + ":" + std::to_string(line); };
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (auto h = raw.find('#'); h != std::string::npos) raw.erase(h);
    const std::string text = trim(raw);
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']') throw ParseError("unterminated section header", loc(line));
      const std::string name = trim(std::string_view(text).substr(1, text.size() - 2));
      if (!kSections.count(name)) throw ParseError("unknown section [" + name + "]", loc(line));
      if (sc.section(name)) throw ParseError("duplicate section [" + name + "]", loc(line));
      sc.sections.push_back({name, line, {}});
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'key = value'", loc(line));
    if (sc.sections.empty()) throw ParseError("entry outside of any section", loc(line));
    ScenarioEntry e{trim(std::string_view(text).substr(0, eq)), trim(std::string_view(text).substr(eq + 1)), line};
    if (e.key.empty()) throw ParseError("empty key", loc(line));
    if (e.value.empty()) throw ParseError("empty value for '" + e.key + "'", loc(line));
    if (sc.sections.back().find(e.key)) throw ParseError("duplicate key '" + e.key + "'", loc(line));
    sc.sections.back().entries.push_back(std::move(e));
  }
  if (!sc.section("scenario")) throw ParseError("missing [scenario] section", loc(std::max(line, 1)));
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario file", path);
  return parse_scenario(in, path);
}

// ---------------------------------------------------------------------------

namespace {

class Runner {
 public:
  Runner(const Scenario& sc, const RunOverrides& ov) : sc_(sc) { configure(ov); }

  json run();

 private:
  // --- resolution ---------------------------------------------------------
  [[noreturn]] void fail(const ScenarioEntry& e, const std::string& msg) const {
    throw ParseError(msg, sc_.file + ":" + std::to_string(e.line));
  }
  [[noreturn]] void fail_section(const ScenarioSection& s, const std::string& msg) const {
    throw ParseError(msg, sc_.file + ":" + std::to_string(s.line));
  }

  double number(const ScenarioEntry& e, const std::string& text) const {
    try {
      const Expression x = Expression::parse(text, {});
      const double v = x(std::span<const double>{});
      if (!std::isfinite(v)) fail(e, "non-finite number '" + text + "'");
      return v;
    } catch (const ParseError&) {
      throw;
    } catch (const Error& err) {
      fail(e, "bad number '" + text + "': " + err.what());
    }
  }
  long long integer(const ScenarioEntry& e, const std::string& text) const {
    const double v = number(e, text);
    if (v != std::floor(v) || std::abs(v) > 1e15) fail(e, "expected an integer, got '" + text + "'");
    return static_cast<long long>(v);
  }

  void configure(const RunOverrides& ov);
  DomainPtr parse_domain(const ScenarioEntry& e) const;
  void resolve_cover(const ScenarioEntry& e);
  void resolve_forms();
  void resolve_paths();

  SymbolId letter(const ScenarioEntry& e, const std::string& name) const {
    auto it = forms_.find(name);
    if (it == forms_.end()) fail(e, "unknown form '" + name + "'");
    return it->second;
  }
  Word word(const ScenarioEntry& e, const std::string& text) const {
    if (text == "1") return {};
    Word w;
    for (const auto& l : split(text, '.')) w.push_back(letter(e, l));
    if (w.empty()) fail(e, "empty word");
    return w;
  }
  AlgebraElement element(const ScenarioEntry& e, const std::string& text) const;
  const SampledPath& path(const ScenarioEntry& e, const std::string& name) const {
    auto it = paths_.find(name);
    if (it == paths_.end()) fail(e, "unknown path '" + name + "'");
    return it->second;
  }
  std::vector<GroupElement> eta_tuple(const ScenarioEntry& e, const std::string& text) const;
  const CoverSpace& need_cover(const ScenarioSection& s) const {
    if (!cover_) fail_section(s, "suite [" + s.name + "] needs a cover");
    return *cover_;
  }
  const ScenarioSection& suite_section(const std::string& name) const {
    const ScenarioSection* s = sc_.section(name);
    if (!s) throw ParseError("suite '" + name + "' selected but section [" + name + "] is missing", sc_.file);
    return *s;
  }
  void check_keys(const ScenarioSection& s, const std::set<std::string>& allowed) const {
    for (const auto& e : s.entries)
      if (!allowed.count(e.key)) fail(e, "unknown key '" + e.key + "' in [" + s.name + "]");
  }

  // --- certification ------------------------------------------------------
  InvarianceCertificate certify(const AlgebraElement& e, Binding& binding, std::size_t samples);

  // --- suites -------------------------------------------------------------
  json identities();
  json homotopy();
  json defining_system();
  json order();
  json pairing();
  json coboundary();

  // --- checks -------------------------------------------------------------
  template <class F>
  void guarded(json& checks, const std::string& name, F&& f) {
    try {
      f();
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& err) {
      checks.push_back({{"name", name}, {"error", err.what()}, {"passed", false}});
    }
  }
  static void residual_check(json& checks, const std::string& name, double residual, double tolerance,
                             json extra = json::object()) {
    extra["name"] = name;
    extra["residual"] = residual;
    extra["tolerance"] = tolerance;
    extra["passed"] = residual <= tolerance;
    checks.push_back(std::move(extra));
  }
  static void minimum_check(json& checks, const std::string& name, double value, double minimum,
                            json extra = json::object()) {
    extra["name"] = name;
    extra["value"] = value;
    extra["minimum"] = minimum;
    extra["passed"] = value >= minimum;
    checks.push_back(std::move(extra));
  }
  void record(json& checks, const CheckResult& r, const std::string& label) {
    residual_check(checks, r.name + " " + label, r.residual, r.tolerance,
                   {{"lhs", complex_json(r.lhs)},
                    {"rhs", complex_json(r.rhs)},
                    {"error_estimate", r.error_estimate}});
  }

  std::string fmt(const Word& w) const { return format_word(w, registry_); }
  std::string fmt(const AlgebraElement& e) const { return format_element(e, registry_); }

  const Scenario& sc_;
  std::string name_;
  DomainPtr domain_;
  std::vector<std::string> suites_;
  QuadratureOptions opts_;
  std::uint64_t seed_ = 0;
  Tolerance tol_;
  std::string cover_name_;
  std::unique_ptr<CoverSpace> own_cover_;
  const CoverSpace* cover_ = nullptr;

  SymbolRegistry registry_{CoefficientMode::floating};
  Binding binding_;
  std::map<std::string, SymbolId> forms_;
  std::vector<std::string> form_order_;
  std::map<std::string, SampledPath> paths_;
  std::vector<std::string> path_order_;
};

void Runner::configure(const RunOverrides& ov) {
  const ScenarioSection& s = *sc_.section("scenario");
  check_keys(s, {"name", "domain", "suites", "grid", "seed", "tol-abs", "tol-rel", "cover"});
  const auto* name = s.find("name");
  if (!name) fail_section(s, "[scenario] needs a name");
  name_ = name->value;

  if (const auto* e = s.find("grid")) {
    const long long g = integer(*e, e->value);
    if (g < 4 || g > (1 << 22)) fail(*e, "grid must lie in [4, 4194304]");
    opts_.grid = static_cast<int>(g);
  }
  if (const auto* e = s.find("seed")) {
    const long long v = integer(*e, e->value);
    if (v < 0) fail(*e, "seed must be non-negative");
    seed_ = static_cast<std::uint64_t>(v);
  }
  if (const auto* e = s.find("tol-abs")) tol_.abs = number(*e, e->value);
  if (const auto* e = s.find("tol-rel")) tol_.rel = number(*e, e->value);
  if (ov.grid) {
    if (*ov.grid < 4) throw ParseError("--grid must be at least 4", "command line");
    opts_.grid = *ov.grid;
  }
  if (ov.seed) seed_ = *ov.seed;
  if (ov.tol_abs) tol_.abs = *ov.tol_abs;
  if (ov.tol_rel) tol_.rel = *ov.tol_rel;
  if (!(tol_.abs > 0.0) || !(tol_.rel > 0.0)) {
    const auto* e = s.find("tol-abs") ? s.find("tol-abs") : s.find("tol-rel");
    if (e) fail(*e, "tolerances must be positive");
    throw ParseError("tolerances must be positive", "command line");
  }

  if (const auto* e = s.find("suites")) {
    for (const auto& su : split(e->value, ',')) {
      if (!kSuites.count(su)) fail(*e, "unknown suite '" + su + "'");
      suites_.push_back(su);
    }
  }

  if (const auto* e = s.find("cover")) resolve_cover(*e);
  if (const auto* e = s.find("domain")) {
    domain_ = parse_domain(*e);
    if (cover_ && !(*domain_ == *cover_->base_domain()))
      fail(*e, "domain " + domain_->name() + " differs from the cover base " + cover_->base_domain()->name());
  } else if (cover_) {
    domain_ = cover_->base_domain();
  } else {
    fail_section(s, "[scenario] needs a domain or a cover");
  }
  resolve_forms();
  resolve_paths();
}

DomainPtr Runner::parse_domain(const ScenarioEntry& e) const {
  const auto t = words_of(e.value);
  try {
    if (t.size() == 1 && fixtures::has_domain(t[0])) return fixtures::domain(t[0]);
    if (t[0] == "annulus" && t.size() == 3) return domains::annulus(number(e, t[1]), number(e, t[2]));
    if (t[0] == "disk" && t.size() == 2) return domains::disk(number(e, t[1]));
    if (t[0] == "strip" && t.size() == 3)
      return domains::strip(number(e, t[1]), number(e, t[2]), 3.0 * std::numbers::pi);
    if (t[0] == "rectangle" && t.size() == 5)
      return domains::rectangle({number(e, t[1]), number(e, t[2])}, {number(e, t[3]), number(e, t[4])});
  } catch (const ParseError&) {
    throw;
  } catch (const Error& err) {
    fail(e, err.what());
  }
  fail(e, "unknown domain '" + e.value + "'");
}

void Runner::resolve_cover(const ScenarioEntry& e) {
  cover_name_ = e.value;
  if (const ScenarioSection* cs = sc_.section("covers")) {
    if (const ScenarioEntry* def = cs->find(e.value)) {
      const auto t = words_of(def->value);
      std::map<std::string, double> kv;
      for (std::size_t i = 1; i < t.size(); ++i) {
        const auto eq = t[i].find('=');
        if (eq == std::string::npos) fail(*def, "expected key=value, got '" + t[i] + "'");
        kv[t[i].substr(0, eq)] = number(*def, t[i].substr(eq + 1));
      }
      auto get = [&](const std::string& k, double d) {
        auto it = kv.find(k);
        if (it == kv.end()) return d;
        const double v = it->second;
        kv.erase(it);
        return v;
      };
      try {
        if (t[0] == "fixture" && t.size() == 2) {
          if (!fixtures::has_cover(t[1])) fail(*def, "unknown cover fixture '" + t[1] + "'");
          cover_ = &fixtures::cover(t[1]);
          return;
        }
        if (t[0] == "strip-annulus") {
          const double r1 = get("r1", 0.5), r2 = get("r2", 2.0), r0 = get("r0", 1.0), w = get("width", 0.25);
          if (!kv.empty()) fail(*def, "unknown cover parameter '" + kv.begin()->first + "'");
          own_cover_ = std::make_unique<CoverSpace>(covers::strip_annulus(r1, r2, r0, w));
        } else if (t[0] == "plane-torus") {
          const double L = get("period", 1.0), w = get("width", 0.25);
          if (!kv.empty()) fail(*def, "unknown cover parameter '" + kv.begin()->first + "'");
          own_cover_ = std::make_unique<CoverSpace>(covers::plane_torus(L, w));
        } else {
          fail(*def, "unknown cover kind '" + t[0] + "'");
        }
      } catch (const ParseError&) {
        throw;
      } catch (const Error& err) {
        fail(*def, err.what());
      }
      cover_ = own_cover_.get();
      return;
    }
  }
  if (!fixtures::has_cover(e.value)) fail(e, "unknown cover '" + e.value + "'");
  cover_ = &fixtures::cover(e.value);
}

void Runner::resolve_forms() {
  const ScenarioSection* s = sc_.section("forms");
  if (!s) return;
  for (const auto& e : s->entries) {
    if (!is_identifier(e.key)) fail(e, "form names must be identifiers: '" + e.key + "'");
    const auto t = words_of(e.value);
    std::optional<OneForm> f;
    try {
      if (t[0] == "expr") {
        std::vector<Expression> cs;
        for (const auto& c : split(e.value.substr(4), ','))
          cs.push_back(Expression::parse(c, Expression::coordinate_names(domain_->dimension())));
        if (cs.size() != domain_->dimension()) fail(e, "need one coefficient per coordinate");
        f = OneForm::from_expressions(domain_, std::move(cs));
      } else if (t.size() == 1 && fixtures::has_form(t[0])) {
        f = fixtures::form(t[0], domain_);
      } else if (t.size() == 2 && t[0] == "fixture" && fixtures::has_form(t[1])) {
        f = fixtures::form(t[1], domain_);
      } else {
        fail(e, "unknown form '" + e.value + "'");
      }
    } catch (const ParseError& err) {
      if (!err.location().empty()) throw;
      fail(e, err.what());
    } catch (const Error& err) {
      fail(e, err.what());
    }
    const SymbolId id = registry_.intern(e.key).id;
    binding_.bind(id, *f);
    forms_[e.key] = id;
    form_order_.push_back(e.key);
  }
}

void Runner::resolve_paths() {
  const ScenarioSection* s = sc_.section("paths");
  if (!s) return;
  auto point = [&](const ScenarioEntry& e, const std::string& text) {
    const auto cs = split(text, ',');
    if (cs.size() != domain_->dimension()) fail(e, "point '" + text + "' has the wrong dimension");
    Point p(cs.size());
    for (std::size_t i = 0; i < cs.size(); ++i) p[i] = number(e, cs[i]);
    return p;
  };
  for (const auto& e : s->entries) {
    if (!is_identifier(e.key)) fail(e, "path names must be identifiers: '" + e.key + "'");
    const auto t = words_of(e.value);
    const std::string rest = trim(std::string_view(e.value).substr(t[0].size()));
    std::optional<SampledPath> p;
    try {
      if (t[0] == "fixture" && t.size() == 2) {
        if (!fixtures::has_loop(t[1])) fail(e, "unknown loop fixture '" + t[1] + "'");
        p = fixtures::loop(t[1], domain_);
      } else if (t[0] == "curve") {
        std::vector<Expression> xs;
        for (const auto& c : split(rest, ',')) xs.push_back(Expression::parse(c, {{"t"}}));
        if (xs.size() != domain_->dimension()) fail(e, "need one coordinate expression per dimension");
        p = SampledPath::from_expressions(domain_, std::move(xs));
      } else if (t[0] == "points") {
        std::vector<Point> pts;
        for (const auto& q : split(rest, ';')) pts.push_back(point(e, q));
        if (pts.size() < 2) fail(e, "a polyline needs at least two points");
        p = SampledPath::polyline(domain_, pts);
      } else if (t[0] == "compose" && t.size() >= 3) {
        p = path(e, t[1]);
        for (std::size_t i = 2; i < t.size(); ++i) p = compose(*p, path(e, t[i]));
      } else if (t[0] == "inverse" && t.size() == 2) {
        p = inverse(path(e, t[1]));
      } else {
        fail(e, "unknown path specification '" + e.value + "'");
      }
    } catch (const ParseError& err) {
      if (!err.location().empty()) throw;
      fail(e, err.what());
    } catch (const Error& err) {
      fail(e, err.what());
    }
    paths_.insert_or_assign(e.key, *p);
    path_order_.push_back(e.key);
  }
}

// c*a.b + d*c - e ; coefficients are numeric expressions.
AlgebraElement Runner::element(const ScenarioEntry& e, const std::string& text) const {
  std::vector<std::pair<double, std::string>> terms;
  std::string cur;
  double sign = 1.0;
  int depth = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '(') ++depth;
    if (c == ')') --depth;
    const bool exponent = i >= 2 && (text[i - 1] == 'e' || text[i - 1] == 'E') &&
                          std::isdigit(static_cast<unsigned char>(text[i - 2]));
    if ((c == '+' || c == '-') && depth == 0 && !exponent && !trim(cur).empty()) {
      terms.push_back({sign, trim(cur)});
      cur.clear();
      sign = c == '-' ? -1.0 : 1.0;
      continue;
    }
    if ((c == '+' || c == '-') && depth == 0 && trim(cur).empty()) {
      if (c == '-') sign = -sign;
      continue;
    }
    cur += c;
  }
  if (trim(cur).empty()) fail(e, "empty element term in '" + text + "'");
  terms.push_back({sign, trim(cur)});

  AlgebraElement out;
  for (const auto& [sg, t] : terms) {
    if (t == "0") continue;
    double coef = sg;
    std::string w = t;
    int d = 0;
    std::size_t star = std::string::npos;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (t[i] == '(') ++d;
      if (t[i] == ')') --d;
      if (t[i] == '*' && d == 0) star = i;
    }
    if (star != std::string::npos) {
      coef *= number(e, t.substr(0, star));
      w = trim(std::string_view(t).substr(star + 1));
    } else if (!std::isalpha(static_cast<unsigned char>(t[0])) && t[0] != '_') {
      out.add_term({}, coef * number(e, t));
      continue;
    }
    out.add_term(word(e, w), coef);
  }
  return out;
}

std::vector<GroupElement> Runner::eta_tuple(const ScenarioEntry& e, const std::string& text) const {
  const std::size_t rank = cover_ ? cover_->rank() : 1;
  std::vector<GroupElement> out;
  if (trim(text) == "1") return out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (std::isspace(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    if (text[i] != '(') fail(e, "eta factors look like (1)(2): '" + text + "'");
    const auto close = text.find(')', i);
    if (close == std::string::npos) fail(e, "unbalanced parenthesis in '" + text + "'");
    const long long g = integer(e, text.substr(i + 1, close - i - 1));
    if (g < 1 || static_cast<std::size_t>(g) > rank) fail(e, "generator index out of range in '" + text + "'");
    out.push_back(generator(rank, static_cast<std::size_t>(g - 1)));
    i = close + 1;
  }
  return out;
}

InvarianceCertificate Runner::certify(const AlgebraElement& e, Binding& binding, std::size_t samples) {
  const auto pts = domain_->samples(samples, seed_);
  if (e.degree() <= 2) return certify_s2(e, binding, pts, 1e-8);
  if (e.terms().size() != 1) throw CertificationError("elements of degree > 2 must be a single word");
  const auto& [w, c] = *e.terms().begin();
  std::vector<OneForm> fs;
  for (SymbolId id : w) fs.push_back(binding.at(id));
  const DefiningSystem sys = build_defining_system(fs, pts, 1e-8);
  InvarianceCertificate cert = defining_system_element(sys, w, registry_, binding, "m" + std::to_string(registry_.size()));
  cert.element = cert.element * AlgebraElement::constant(c);
  return cert;
}

// ---------------------------------------------------------------------------

json Runner::identities() {
  const ScenarioSection& s = suite_section("identities");
  check_keys(s, {"paths", "words", "reparametrizations", "compose", "shuffle-max", "diffeomorphisms", "convergence",
                 "eta", "eta-s"});
  json checks = json::array();

  std::vector<std::string> pnames = path_order_;
  if (const auto* e = s.find("paths")) {
    pnames = split(e->value, ',');
    for (const auto& n : pnames) path(*e, n);
  }
  std::vector<Word> words;
  if (const auto* e = s.find("words"))
    for (const auto& w : split(e->value, ';')) words.push_back(word(*e, w));

  std::vector<Reparametrization> reps{reparametrizations::square(), reparametrizations::smoothstep(),
                                      reparametrizations::sine_warp()};
  if (const auto* e = s.find("reparametrizations")) {
    reps.clear();
    for (const auto& n : split(e->value, ',')) {
      if (n == "square") reps.push_back(reparametrizations::square());
      else if (n == "smoothstep") reps.push_back(reparametrizations::smoothstep());
      else if (n == "sine-warp") reps.push_back(reparametrizations::sine_warp());
      else if (n == "identity") reps.push_back(reparametrizations::identity());
      else fail(*e, "unknown reparametrization '" + n + "'");
    }
  }

  std::vector<std::pair<std::string, std::string>> pairs;
  if (const auto* e = s.find("compose")) {
    for (const auto& pq : split(e->value, ';')) {
      const auto t = words_of(pq);
      if (t.size() != 2) fail(*e, "compose pairs look like 'p q; r s'");
      path(*e, t[0]);
      path(*e, t[1]);
      pairs.push_back({t[0], t[1]});
    }
  } else {
    for (const auto& a : pnames)
      for (const auto& b : pnames)
        if (distance(paths_.at(a).end(), paths_.at(b).start()) <= kEndpointTolerance) pairs.push_back({a, b});
  }

  std::size_t shuffle_max = 4;
  if (const auto* e = s.find("shuffle-max")) shuffle_max = static_cast<std::size_t>(integer(*e, e->value));

  std::vector<Diffeomorphism> diffeos;
  if (const auto* e = s.find("diffeomorphisms")) {
    for (const auto& d : split(e->value, ';')) {
      const auto t = words_of(d);
      try {
        if (t.size() == 2 && t[0] == "rotation")
          diffeos.push_back(diffeomorphisms::rotation(domain_, number(*e, t[1])));
        else if (t.size() == 2 && t[0] == "scaling")
          diffeos.push_back(diffeomorphisms::scaling(domain_, domain_, number(*e, t[1])));
        else
          fail(*e, "diffeomorphisms look like 'rotation 0.7; scaling 1.5'");
      } catch (const ParseError&) {
        throw;
      } catch (const Error& err) {
        fail(*e, err.what());
      }
    }
  }

  for (const auto& pn : pnames) {
    const SampledPath& p = paths_.at(pn);
    for (const auto& w : words) {
      const std::string label = pn + " " + fmt(w);
      for (const auto& phi : reps)
        guarded(checks, "reparametrization " + label,
                [&] { record(checks, check_reparametrization(p, phi, w, binding_, opts_, tol_), label); });
      guarded(checks, "reversal " + label,
              [&] { record(checks, check_reversal(p, w, binding_, opts_, tol_), label); });
      for (const auto& F : diffeos)
        guarded(checks, "diffeomorphism " + label, [&] {
          record(checks, check_diffeo_invariance(p, F, w, binding_, opts_, tol_), label);
        });
    }
    for (std::size_t i = 0; i < words.size(); ++i)
      for (std::size_t j = i; j < words.size(); ++j) {
        if (words[i].size() + words[j].size() > shuffle_max) continue;
        const std::string label = pn + " " + fmt(words[i]) + " | " + fmt(words[j]);
        guarded(checks, "shuffle " + label,
                [&] { record(checks, check_shuffle(p, words[i], words[j], binding_, opts_, tol_), label); });
      }
  }
  for (const auto& [a, b] : pairs)
    for (const auto& w : words) {
      const std::string label = a + "*" + b + " " + fmt(w);
      guarded(checks, "composition " + label, [&] {
        record(checks, check_composition(paths_.at(a), paths_.at(b), w, binding_, opts_, tol_), label);
      });
    }

  // Raw trapezoid residuals at grids N/4, N/2, N must fall at second order
  // until they reach the floor.
  if (const auto* e = s.find("convergence"); e && e->value == "yes") {
    QuadratureOptions raw = opts_;
    raw.extrapolate = false;
    const int n0 = std::max(8, opts_.grid / 4);
    auto study = [&](const std::string& label, const std::function<double(const QuadratureOptions&)>& residual) {
      guarded(checks, label, [&] {
        const auto rep = convergence_study(
            [&](int n) {
              QuadratureOptions o = raw;
              o.grid = n;
              return residual(o);
            },
            n0, 3);
        // Nothing to measure when the coarsest grid is already exact.
        if (rep.residuals.front() <= kConvergenceFloor) return;
        checks.push_back({{"name", label},
                          {"grids", rep.grids},
                          {"residuals", rep.residuals},
                          {"orders", rep.orders},
                          {"minimum_order", kMinOrder},
                          {"floor", kConvergenceFloor},
                          {"passed", rep.converges(kMinOrder, kConvergenceFloor)}});
      });
    };
    for (const auto& pn : pnames) {
      const SampledPath& p = paths_.at(pn);
      for (std::size_t i = 0; i + 1 < words.size(); ++i) {
        const Word& w = words[i];
        const Word& v = words[i + 1];
        if (w.empty() || v.empty() || w.size() + v.size() > shuffle_max) continue;
        study("convergence shuffle " + pn + " " + fmt(w) + " | " + fmt(v),
              [&](const QuadratureOptions& o) { return check_shuffle(p, w, v, binding_, o, tol_).residual; });
      }
      for (const auto& w : words) {
        if (w.size() < 2) continue;
        study("convergence reversal " + pn + " " + fmt(w),
              [&](const QuadratureOptions& o) { return check_reversal(p, w, binding_, o, tol_).residual; });
      }
    }
  }

  if (const auto* e = s.find("eta")) {
    const ScenarioEntry* es = s.find("eta-s");
    if (!es) fail(*e, "eta needs eta-s");
    need_cover(s);
    const SymbolId l = letter(*e, e->value);
    for (const auto& sv : split(es->value, ',')) {
      const long long sl = integer(*es, sv);
      if (sl < 1 || sl > 8) fail(*es, "eta-s values must lie in 1..8");
      const std::vector<GroupElement> gammas(static_cast<std::size_t>(sl), generator(cover_->rank(), 0));
      double scale = 1.0;
      guarded(checks, "eta loop integral", [&] {
        const auto full = check_eta_vanishing(gammas, Word(gammas.size(), l), binding_, *cover_, opts_);
        for (Complex z : full.loop_integrals) scale *= std::abs(z);
      });
      for (long long r = 1; r <= sl; ++r) {
        const std::string label = "eta s=" + std::to_string(sl) + " r=" + std::to_string(r);
        guarded(checks, label, [&] {
          const auto rep = check_eta_vanishing(gammas, Word(static_cast<std::size_t>(r), l), binding_, *cover_, opts_);
          const double tol = r < sl ? tol_.bound(scale) : tol_.bound(std::abs(rep.expected));
          residual_check(checks, label, rep.residual, tol,
                         {{"value", complex_json(rep.value)},
                          {"expected", complex_json(rep.expected)},
                          {"error_estimate", rep.error_estimate}});
        });
      }
    }
  }
  return checks;
}

json Runner::homotopy() {
  const ScenarioSection& s = suite_section("homotopy");
  check_keys(s, {"elements", "path", "field", "k", "amplitudes", "max-amplitude", "expect", "certification-tol",
                 "samples", "variant-threshold"});
  json checks = json::array();
  const auto* pe = s.find("path");
  const auto* ee = s.find("elements");
  if (!pe || !ee) fail_section(s, "[homotopy] needs elements and path");
  const SampledPath& base = path(*pe, pe->value);
  std::vector<AlgebraElement> elems;
  for (const auto& t : split(ee->value, ';')) elems.push_back(element(*ee, t));

  int k = 1;
  if (const auto* e = s.find("k")) k = static_cast<int>(integer(*e, e->value));
  PerturbationField field;
  {
    const auto* fe = s.find("field");
    const std::string spec = fe ? fe->value : "radial";
    const auto t = words_of(spec);
    if (t[0] == "radial") {
      Point c(domain_->dimension());
      if (domain_->star_center()) c = *domain_->star_center();
      if (t.size() > 1) {
        const auto cs = split(trim(std::string_view(spec).substr(6)), ',');
        if (cs.size() != c.size()) fail(*fe, "radial center has the wrong dimension");
        for (std::size_t i = 0; i < cs.size(); ++i) c[i] = number(*fe, cs[i]);
      }
      field = fields::radial_bump(base, c, k);
    } else if (t[0] == "direction") {
      const auto cs = split(trim(std::string_view(spec).substr(9)), ',');
      if (cs.size() != domain_->dimension()) fail(*fe, "direction has the wrong dimension");
      Point d(cs.size());
      for (std::size_t i = 0; i < cs.size(); ++i) d[i] = number(*fe, cs[i]);
      field = fields::direction_bump(d, k);
    } else {
      fail(*fe, "field is 'radial [cx, cy]' or 'direction a, b'");
    }
  }
  std::size_t count = 20;
  if (const auto* e = s.find("amplitudes")) count = static_cast<std::size_t>(integer(*e, e->value));
  double amax = 0.1;
  if (const auto* e = s.find("max-amplitude")) amax = number(*e, e->value);
  bool expect_invariant = true;
  if (const auto* e = s.find("expect")) {
    if (e->value == "variant") expect_invariant = false;
    else if (e->value != "invariant") fail(*e, "expect is 'invariant' or 'variant'");
  }
  double cert_tol = 1e-8;
  if (const auto* e = s.find("certification-tol")) cert_tol = number(*e, e->value);
  std::size_t nsamples = kDefaultCertificationSamples;
  if (const auto* e = s.find("samples")) nsamples = static_cast<std::size_t>(integer(*e, e->value));
  double threshold = 1e-3;
  if (const auto* e = s.find("variant-threshold")) threshold = number(*e, e->value);

  const PathFamily family(base, field);
  const auto amps = symmetric_amplitudes(count, amax);
  const auto pts = domain_->samples(nsamples, seed_);
  for (const auto& el : elems) {
    const std::string label = fmt(el);
    json cert_info = nullptr;
    bool certified = false;
    if (el.degree() <= 2) {
      try {
        const S2Report r = check_s2_condition(el, binding_, pts, cert_tol);
        certified = r.passed;
        cert_info = {{"residual", r.residual}, {"tolerance", r.tolerance}, {"passed", r.passed}};
      } catch (const Error& err) {
        cert_info = {{"error", err.what()}, {"passed", false}};
      }
    }
    if (expect_invariant) {
      guarded(checks, "certification " + label, [&] {
        const S2Report r = check_s2_condition(el, binding_, pts, cert_tol);
        residual_check(checks, "certification " + label, r.residual, cert_tol, {{"samples", r.samples}});
      });
      guarded(checks, "invariance " + label, [&] {
        const auto rep = empirical_invariance(el, binding_, family, amps, opts_);
        residual_check(checks, "invariance " + label, rep.max_deviation, tol_.bound(std::abs(rep.base_value)),
                       {{"base_value", complex_json(rep.base_value)}, {"amplitudes", rep.amplitudes.size()}});
      });
    } else {
      guarded(checks, "deviation " + label, [&] {
        const auto rep = empirical_invariance(el, binding_, family, amps, opts_);
        minimum_check(checks, "deviation " + label, rep.max_deviation, threshold,
                      {{"base_value", complex_json(rep.base_value)},
                       {"certification", cert_info},
                       {"certified", certified}});
      });
    }
  }
  return checks;
}

json Runner::defining_system() {
  const ScenarioSection& s = suite_section("defining-system");
  check_keys(s, {"forms", "samples", "tol", "path", "field", "amplitudes", "max-amplitude"});
  json checks = json::array();
  const auto* fe = s.find("forms");
  if (!fe) fail_section(s, "[defining-system] needs forms");
  std::vector<SymbolId> ids;
  for (const auto& n : split(fe->value, ',')) ids.push_back(letter(*fe, n));
  std::size_t nsamples = kDefaultCertificationSamples;
  if (const auto* e = s.find("samples")) nsamples = static_cast<std::size_t>(integer(*e, e->value));
  double tol = tol_.abs;
  if (const auto* e = s.find("tol")) tol = number(*e, e->value);
  const SampledPath* path_ptr = nullptr;
  if (const auto* e = s.find("path")) path_ptr = &path(*e, e->value);

  const auto pts = domain_->samples(nsamples, seed_);
  std::vector<OneForm> fs;
  for (SymbolId id : ids) fs.push_back(binding_.at(id));

  for (std::size_t i = 0; i < fs.size(); ++i)
    guarded(checks, "closed " + registry_.label(ids[i]), [&] {
      residual_check(checks, "closed " + registry_.label(ids[i]), is_closed(fs[i], tol, pts).residual, tol);
    });
  guarded(checks, "defining-system", [&] {
    // Build with an infinite tolerance so every residual is reported.
    const DefiningSystem sys = build_defining_system(fs, pts, std::numeric_limits<double>::infinity());
    for (const auto& r : sys.residuals())
      residual_check(checks,
                     "equation " + std::to_string(r.first + 1) + ".." + std::to_string(r.last + 1), r.residual, tol);
    if (fs.size() >= 2) {
      const TwoForm beta = wedge(fs[0], fs[1]);
      const double rt = max_norm(exterior_derivative(poincare_primitive(beta)) - beta, pts);
      residual_check(checks, "roundtrip dK", rt, tol, {{"samples", pts.size()}});
    }
    if (path_ptr) {
      Binding b = binding_;
      const auto cert = defining_system_element(sys, ids, registry_, b, "ds");
      std::size_t count = 20;
      if (const auto* e = s.find("amplitudes")) count = static_cast<std::size_t>(integer(*e, e->value));
      double amax = 0.1;
      if (const auto* e = s.find("max-amplitude")) amax = number(*e, e->value);
      Point c = domain_->star_center().value_or(Point(domain_->dimension()));
      const PathFamily family(*path_ptr, fields::radial_bump(*path_ptr, c, 1));
      const auto rep = empirical_invariance(cert.element, b, family, symmetric_amplitudes(count, amax), opts_);
      residual_check(checks, "invariance " + fmt(cert.element), rep.max_deviation,
                     tol_.bound(std::abs(rep.base_value)), {{"base_value", complex_json(rep.base_value)}});
    }
  });
  return checks;
}

json Runner::order() {
  const ScenarioSection& s = suite_section("order");
  check_keys(s, {"elements", "samples", "witness-min", "kernel", "kernel-excluded"});
  json checks = json::array();
  const CoverSpace& cover = need_cover(s);
  std::size_t nsamples = 16;
  if (const auto* e = s.find("samples")) nsamples = static_cast<std::size_t>(integer(*e, e->value));
  const auto pts = cover.samples(nsamples, seed_);

  std::vector<AlgebraElement> elems;
  if (const auto* e = s.find("elements"))
    for (const auto& t : split(e->value, ';')) elems.push_back(element(*e, t));
  std::vector<double> wmin(elems.size(), tol_.abs);
  if (const auto* e = s.find("witness-min")) {
    const auto vs = split(e->value, ';');
    if (vs.size() != elems.size()) fail(*e, "need one witness minimum per element");
    for (std::size_t i = 0; i < vs.size(); ++i) wmin[i] = number(*e, vs[i]);
  }

  for (std::size_t i = 0; i < elems.size(); ++i) {
    const std::string label = fmt(elems[i]);
    guarded(checks, "order " + label, [&] {
      Binding b = binding_;
      const auto cert = certify(elems[i], b, kDefaultCertificationSamples);
      const HigherInvariant f(cert, b, cover, opts_);
      const OrderReport rep = order_check(f, pts, 0.0);
      const double tol = tol_.bound(rep.witness_magnitude);
      std::vector<std::string> witness;
      for (const auto& g : rep.witness) witness.push_back(format_group_element(g));
      residual_check(checks, "order vanishing " + label, rep.residual, tol,
                     {{"tuple_length", rep.tuple_length}, {"degree", rep.degree}});
      minimum_check(checks, "order witness " + label, rep.witness_magnitude, wmin[i],
                    {{"witness", witness}, {"witness_value", complex_json(rep.witness_value)}});
    });
  }

  if (const auto* e = s.find("kernel"))
    for (const auto& t : split(e->value, ';')) {
      const AlgebraElement el = element(*e, t);
      const std::string label = "kernel " + fmt(el);
      guarded(checks, label, [&] {
        Binding b = binding_;
        const auto cert = certify(el, b, kDefaultCertificationSamples);
        const HigherInvariant f(cert, b, cover, opts_);
        const auto rep = kernel_inclusion_check(f, pts, tol_.abs);
        residual_check(checks, label, rep.residuals.empty() ? 0.0 : rep.residuals.back(), tol_.abs,
                       {{"precondition_residual", rep.precondition_residual},
                        {"residuals_by_length", rep.residuals},
                        {"included", rep.included}});
      });
    }
  if (const auto* e = s.find("kernel-excluded"))
    for (const auto& t : split(e->value, ';')) {
      const AlgebraElement el = element(*e, t);
      const std::string label = "kernel precondition " + fmt(el);
      guarded(checks, label, [&] {
        Binding b = binding_;
        const auto cert = certify(el, b, kDefaultCertificationSamples);
        const HigherInvariant f(cert, b, cover, opts_);
        try {
          kernel_inclusion_check(f, pts, tol_.abs);
          checks.push_back({{"name", label}, {"expected_error", "precondition"}, {"passed", false}});
        } catch (const PreconditionError& err) {
          checks.push_back(
              {{"name", label}, {"expected_error", "precondition"}, {"detail", err.what()}, {"passed", true}});
        }
      });
    }
  return checks;
}

json Runner::pairing() {
  const ScenarioSection& s = suite_section("pairing");
  check_keys(s, {"elements", "etas", "diagonal", "rank"});
  json checks = json::array();
  const CoverSpace& cover = need_cover(s);
  const auto* ee = s.find("elements");
  const auto* te = s.find("etas");
  if (!ee || !te) fail_section(s, "[pairing] needs elements and etas");
  std::vector<AlgebraElement> elems;
  for (const auto& t : split(ee->value, ';')) elems.push_back(element(*ee, t));
  std::vector<GroupRingElement> etas;
  std::vector<std::string> eta_labels;
  for (const auto& t : split(te->value, ';')) {
    etas.push_back(eta(eta_tuple(*te, t), cover.rank()));
    eta_labels.push_back(etas.back().str());
  }
  std::vector<Complex> diag;
  if (const auto* e = s.find("diagonal"))
    for (const auto& t : split(e->value, ';')) diag.push_back(number(*e, t));
  std::optional<long long> rank;
  if (const auto* e = s.find("rank")) rank = integer(*e, e->value);

  guarded(checks, "pairing", [&] {
    Binding b = binding_;
    std::vector<InvarianceCertificate> certs;
    for (const auto& el : elems) certs.push_back(certify(el, b, kDefaultCertificationSamples));
    const PairingReport rep = chen_pairing(certs, etas, b, cover, opts_);
    json matrix = json::array();
    double below = 0.0, scale = 0.0;
    for (std::size_t j = 0; j < rep.values.size(); ++j) {
      json row = json::array();
      for (std::size_t i = 0; i < rep.values[j].size(); ++i) {
        row.push_back(complex_json(rep.values[j][i]));
        scale = std::max(scale, std::abs(rep.values[j][i]));
        if (i < j) below = std::max(below, std::abs(rep.values[j][i]));
      }
      matrix.push_back(std::move(row));
    }
    std::vector<std::string> el_labels;
    for (const auto& el : elems) el_labels.push_back(fmt(el));
    residual_check(checks, "triangular", below, tol_.bound(scale),
                   {{"matrix", matrix}, {"rows", eta_labels}, {"columns", el_labels}, {"rank", rep.rank}});
    for (std::size_t i = 0; i < diag.size() && i < rep.values.size() && i < elems.size(); ++i)
      residual_check(checks, "diagonal " + std::to_string(i + 1), std::abs(rep.values[i][i] - diag[i]),
                     tol_.bound(std::abs(diag[i])),
                     {{"value", complex_json(rep.values[i][i])}, {"expected", complex_json(diag[i])}});
    if (rank)
      residual_check(checks, "rank", std::abs(static_cast<double>(rep.rank) - static_cast<double>(*rank)), 0.0,
                     {{"rank", rep.rank}, {"expected", *rank}});
  });
  return checks;
}

json Runner::coboundary() {
  const ScenarioSection& s = suite_section("coboundary");
  check_keys(s, {"cocycle", "samples", "random-words", "max-exponent"});
  json checks = json::array();
  const CoverSpace& cover = need_cover(s);
  const auto* ce = s.find("cocycle");
  if (!ce) fail_section(s, "[coboundary] needs a cocycle");
  std::size_t nsamples = 512;
  if (const auto* e = s.find("samples")) nsamples = static_cast<std::size_t>(integer(*e, e->value));
  std::size_t nwords = 3;
  if (const auto* e = s.find("random-words")) nwords = static_cast<std::size_t>(integer(*e, e->value));
  long long maxexp = 3;
  if (const auto* e = s.find("max-exponent")) maxexp = integer(*e, e->value);
  if (maxexp < 2) fail_section(s, "max-exponent must be at least 2");

  const auto t = words_of(ce->value);
  const std::string rest = trim(std::string_view(ce->value).substr(t[0].size()));
  std::optional<Cocycle> alpha;
  if (t[0] == "constant") {
    std::vector<Complex> vals;
    for (const auto& v : split(rest, ',')) vals.push_back(number(*ce, v));
    if (vals.size() != cover.rank()) fail(*ce, "need one constant per generator");
    alpha = Cocycle::constant(cover, vals);
  } else if (t[0] == "coboundary") {
    Expression g = [&] {
      try {
        return Expression::parse(rest, Expression::coordinate_names(cover.cover_domain()->dimension()));
      } catch (const ParseError& err) {
        fail(*ce, err.what());
      }
    }();
    alpha = Cocycle::coboundary_of(cover, [g](const Point& x) { return Complex(g(x.coords())); });
  } else {
    fail(*ce, "cocycle is 'constant c1, c2' or 'coboundary <expression>'");
  }

  const auto pts = cover.samples(nsamples, seed_);
  double psum = 0.0;
  for (const auto& x : pts) psum = std::max(psum, std::abs(cover.partition_sum(x) - 1.0));
  residual_check(checks, "partition-sum", psum, 1e-10, {{"samples", pts.size()}});

  guarded(checks, "coboundary", [&] {
    const CoverFunction f = solve_coboundary(*alpha, pts, 1e-8);
    std::vector<GroupElement> gs;
    for (std::size_t i = 0; i < cover.rank(); ++i) gs.push_back(generator(cover.rank(), i));
    std::mt19937_64 rng(seed_);
    std::uniform_int_distribution<long long> dist(-maxexp, maxexp);
    for (std::size_t n = 0; n < nwords;) {
      GroupElement g(cover.rank());
      long long weight = 0;
      for (auto& x : g) {
        x = dist(rng);
        weight += std::abs(x);
      }
      if (weight < 2) continue;
      gs.push_back(g);
      ++n;
    }
    for (const auto& g : gs)
      residual_check(checks, "coboundary " + format_group_element(g), coboundary_residual(*alpha, f, g, pts), tol_.abs);
  });
  return checks;
}

json Runner::run() {
  json suites = json::array();
  std::size_t total = 0, failed = 0;
  for (const auto& su : suites_) {
    json checks;
    if (su == "identities") checks = identities();
    else if (su == "homotopy") checks = homotopy();
    else if (su == "defining-system") checks = defining_system();
    else if (su == "order") checks = order();
    else if (su == "pairing") checks = pairing();
    else checks = coboundary();
    bool ok = true;
    for (const auto& c : checks) {
      ++total;
      if (!c.at("passed").get<bool>()) {
        ok = false;
        ++failed;
      }
    }
    suites.push_back({{"name", su}, {"passed", ok}, {"checks", std::move(checks)}});
  }
  std::string file = sc_.file;
  if (auto slash = file.find_last_of('/'); slash != std::string::npos) file = file.substr(slash + 1);
  return {{"schema", kReportSchema},
          {"scenario", name_},
          {"file", file},
          {"settings",
           {{"domain", domain_->name()},
            {"cover", cover_ ? json(cover_->name()) : json(nullptr)},
            {"grid", opts_.grid},
            {"seed", seed_},
            {"tol_abs", tol_.abs},
            {"tol_rel", tol_.rel},
            {"suites", suites_}}},
          {"suites", std::move(suites)},
          {"summary", {{"checks", total}, {"failed", failed}}},
          {"passed", failed == 0}};
}

}  // namespace

json run_scenario(const Scenario& scenario, const RunOverrides& overrides) {
  Runner r(scenario, overrides);
  return r.run();
}

bool report_passed(const json& report) { return report.value("passed", false); }

json combine_reports(const std::vector<json>& reports) {
  bool ok = true;
  for (const auto& r : reports) ok = ok && report_passed(r);
  return {{"schema", kReportSchema}, {"reports", reports}, {"passed", ok}};
}

void write_csv(const json& combined, std::ostream& out) {
  auto quote = [](const std::string& s) {
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  };
  auto num = [](const json& j) -> std::string {
    if (!j.is_number()) return "";
    std::ostringstream o;
    o.precision(17);
    o << j.get<double>();
    return o.str();
  };
  out << "scenario,suite,check,residual,tolerance,passed\n";
  for (const auto& r : combined.at("reports"))
    for (const auto& s : r.at("suites"))
      for (const auto& c : s.at("checks"))
        out << quote(r.at("scenario").get<std::string>()) << ',' << quote(s.at("name").get<std::string>()) << ','
            << quote(c.at("name").get<std::string>()) << ',' << num(c.value("residual", json())) << ','
            << num(c.value("tolerance", json())) << ',' << (c.at("passed").get<bool>() ? "true" : "false") << '\n';
}

}  // namespace itint
