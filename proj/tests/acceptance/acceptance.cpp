// Acceptance suite: one PASS/FAIL line per criterion with the measured
// quantities. Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "itint/errors.hpp"
#include "itint/fixtures.hpp"
#include "itint/invariants.hpp"
#include "itint/scenario.hpp"

using namespace itint;

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

int failures = 0;

void report(int n, bool ok, const std::string& what, const std::string& detail) {
  std::printf("%s criterion %d: %s (%s)\n", ok ? "PASS" : "FAIL", n, what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Runs one criterion; an exception is a failure with its message.
void criterion(int n, const std::string& what, const std::function<std::pair<bool, std::string>()>& body) {
  try {
    const auto [ok, detail] = body();
    report(n, ok, what, detail);
  } catch (const std::exception& e) {
    report(n, false, what, std::string("error: ") + e.what());
  }
}

struct Forms {
  SymbolRegistry reg;
  Binding b;

  SymbolId add(const std::string& name, const DomainPtr& d) {
    const SymbolId id = reg.intern(name).id;
    b.bind(id, fixtures::form(name, d));
    return id;
  }
};

std::vector<Word> words_up_to(const std::vector<SymbolId>& letters, std::size_t max_len) {
  std::vector<Word> out, layer{{}};
  for (std::size_t k = 1; k <= max_len; ++k) {
    std::vector<Word> next;
    for (const auto& w : layer)
      for (SymbolId l : letters) {
        Word v = w;
        v.push_back(l);
        next.push_back(v);
      }
    out.insert(out.end(), next.begin(), next.end());
    layer = std::move(next);
  }
  return out;
}

SampledPath curve(const DomainPtr& d, const char* x, const char* y) {
  const Expression::VariableNames t{{"t"}};
  return SampledPath::from_expressions(d, {Expression::parse(x, t), Expression::parse(y, t)});
}

std::pair<bool, std::string> path_identities() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto ann = fixtures::domain("annulus");
  Forms f;
  const std::vector<SymbolId> letters{f.add("dtheta", ann), f.add("dr", ann), f.add("xdy", ann)};
  const auto words = words_up_to(letters, 3);

  const SampledPath core = fixtures::loop("annulus-core"), up = fixtures::loop("upper-half"),
                    lo = fixtures::loop("lower-half");
  const SampledPath arc = curve(ann, "(1.2 + 0.3*t)*cos(2*pi*t*t)", "(1.2 + 0.3*t)*sin(2*pi*t*t)");
  const SampledPath seg = SampledPath::polyline(ann, {{1.0, 0.0}, {0.8, 1.1}, {-1.0, 0.7}});
  const std::vector<const SampledPath*> paths{&core, &up, &lo, &arc, &seg};

  QuadratureOptions opts;
  opts.grid = 2048;
  const Tolerance tol{1e-6, 0.0};
  double rep = 0, comp = 0, shuf = 0, rev = 0;
  for (const SampledPath* p : paths)
    for (const auto& w : words) {
      for (const auto& phi :
           {reparametrizations::square(), reparametrizations::smoothstep(), reparametrizations::sine_warp()})
        rep = std::max(rep, check_reparametrization(*p, phi, w, f.b, opts, tol).residual);
      rev = std::max(rev, check_reversal(*p, w, f.b, opts, tol).residual);
      for (const auto& v : words)
        if (w.size() + v.size() <= 3) shuf = std::max(shuf, check_shuffle(*p, w, v, f.b, opts, tol).residual);
    }
  const SampledPath lo_back = inverse(lo), seg_back = inverse(seg);
  for (const auto& w : words) {
    comp = std::max(comp, check_composition(up, lo_back, w, f.b, opts, tol).residual);
    comp = std::max(comp, check_composition(core, core, w, f.b, opts, tol).residual);
    comp = std::max(comp, check_composition(arc, inverse(arc), w, f.b, opts, tol).residual);
    comp = std::max(comp, check_composition(seg, seg_back, w, f.b, opts, tol).residual);
  }

  // Second-order decay of the raw trapezoid residuals up to N = 2048.
  QuadratureOptions raw = opts;
  raw.extrapolate = false;
  auto at = [&](int n) {
    QuadratureOptions o = raw;
    o.grid = n;
    return o;
  };
  const Word th_r{letters[0], letters[1]}, th_th_w{letters[0], letters[0], letters[2]};
  const std::vector<std::function<double(int)>> studies{
      [&](int n) {
        return check_reparametrization(arc, reparametrizations::sine_warp(), th_th_w, f.b, at(n), tol).residual;
      },
      [&](int n) { return check_shuffle(arc, {letters[0]}, th_r, f.b, at(n), tol).residual; },
      [&](int n) { return check_reversal(arc, th_th_w, f.b, at(n), tol).residual; },
      [&](int n) { return check_shuffle(seg, {letters[2]}, th_r, f.b, at(n), tol).residual; },
  };
  double min_order = INFINITY;
  bool converges = true;
  for (const auto& s : studies) {
    const auto c = convergence_study(s, 512, 3);
    converges = converges && c.converges(1.9, 1e-13);
    for (double o : c.orders) min_order = std::min(min_order, o);
  }
  const double secs = seconds_since(t0);
  const bool ok = rep <= 1e-6 && comp <= 1e-6 && shuf <= 1e-6 && rev <= 1e-6 && converges && secs <= 30.0;
  return {ok, fmt("%zu words x %zu paths; reparam %.1e, composition %.1e, shuffle %.1e, reversal %.1e; "
                  "min observed order %.3f; %.1f s",
                  words.size(), paths.size(), rep, comp, shuf, rev, min_order, secs)};
}

std::pair<bool, std::string> diffeomorphisms_check() {
  const auto pp = fixtures::domain("punctured-plane");
  Forms f;
  const SymbolId th = f.add("dtheta", pp), r = f.add("dr", pp), x = f.add("xdy", pp);
  const auto words = words_up_to({th, r, x}, 2);
  const SampledPath core = fixtures::loop("annulus-core", pp);
  const SampledPath off = curve(pp, "0.5 + 1.5*cos(2*pi*t)", "0.8*sin(2*pi*t)");
  const std::vector<Diffeomorphism> maps{diffeomorphisms::rotation(pp, 0.7), diffeomorphisms::rotation(pp, -2.1),
                                         diffeomorphisms::scaling(pp, pp, 1.5),
                                         diffeomorphisms::scaling(pp, pp, 0.4)};
  QuadratureOptions opts;
  opts.grid = 2048;
  double worst = 0;
  for (const auto& F : maps)
    for (const SampledPath* p : {&core, &off})
      for (const auto& w : words) worst = std::max(worst, check_diffeo_invariance(*p, F, w, f.b, opts).residual);
  return {worst <= 1e-6, fmt("%zu maps x 2 paths x %zu words; max residual %.1e", maps.size(), words.size(), worst)};
}

std::pair<bool, std::string> eta_vanishing() {
  const CoverSpace& cover = fixtures::cover("strip-cover");
  Forms f;
  const SymbolId th = f.add("dtheta", cover.base_domain());
  QuadratureOptions opts;
  opts.grid = 2048;
  double worst_zero = 0, worst_rel = 0, worst_winding = 0;
  bool ok = true;
  for (std::size_t s = 1; s <= 3; ++s) {
    const std::vector<GroupElement> gs(s, generator(1, 0));
    const double scale = std::pow(kTwoPi, double(s));
    for (std::size_t r = 1; r <= s; ++r) {
      const auto rep = check_eta_vanishing(gs, Word(r, th), f.b, cover, opts);
      if (r < s) {
        worst_zero = std::max(worst_zero, std::abs(rep.value) / scale);
        ok = ok && std::abs(rep.value) <= 1e-6 * scale;
        continue;
      }
      // winding oracle for the product of loop integrals
      for (const Complex& li : rep.loop_integrals) worst_winding = std::max(worst_winding, std::abs(li - kTwoPi));
      const double rel = std::abs(rep.value - rep.expected) / std::abs(rep.expected);
      worst_rel = std::max(worst_rel, rel);
      ok = ok && rel <= 1e-6 && std::abs(rep.expected - scale) <= 1e-6 * scale;
    }
  }
  return {ok, fmt("r<s max |value|/(2pi)^s %.1e; r=s max rel %.1e; max |loop - 2pi| %.1e", worst_zero, worst_rel,
                  worst_winding)};
}

std::pair<bool, std::string> homotopy_invariance() {
  const auto ann = fixtures::domain("annulus");
  Forms f;
  const SymbolId th = f.add("dtheta", ann), r = f.add("dr", ann), w = f.add("xdy", ann), dx = f.add("dx", ann),
                 dy = f.add("dy", ann);
  const auto pts = ann->samples(kDefaultCertificationSamples, 1);
  const std::vector<AlgebraElement> candidates{
      AlgebraElement::letter(th),
      AlgebraElement::letter(r),
      AlgebraElement::word({th, th}),
      AlgebraElement::word({th, r}) + AlgebraElement::word({r, th}),
      AlgebraElement::word({dx, dy}) - AlgebraElement::letter(w),
      AlgebraElement::word({th, r}, 2.0) + AlgebraElement::word({r, th}, 2.0) - AlgebraElement::letter(r, 3.0),
      AlgebraElement::word({th, r}),
      AlgebraElement::letter(w),
  };
  const SampledPath up = fixtures::loop("upper-half");
  const std::vector<PathFamily> families{PathFamily(up, fields::radial_bump(up, {0.0, 0.0}, 1)),
                                         PathFamily(up, fields::radial_bump(up, {0.0, 0.0}, 2))};
  const auto amps = symmetric_amplitudes(20, 0.3);
  QuadratureOptions opts;
  opts.grid = 1024;
  std::size_t certified = 0;
  double worst = 0;
  for (const auto& e : candidates) {
    if (!check_s2_condition(e, f.b, pts, 1e-8).passed) continue;
    ++certified;
    for (const auto& fam : families) worst = std::max(worst, empirical_invariance(e, f.b, fam, amps, opts).max_deviation);
  }
  const bool w_uncertified = !check_s2_condition(AlgebraElement::letter(w), f.b, pts, 1e-8).passed;
  const double counter = empirical_invariance(AlgebraElement::letter(w), f.b, families[0], amps, opts).max_deviation;
  const bool ok = certified == 6 && worst <= 1e-6 && w_uncertified && counter > 1e-3;
  return {ok, fmt("%zu of %zu candidates certified; max deviation %.1e over %zu amplitudes; x dy deviation %.3f",
                  certified, candidates.size(), worst, amps.size(), counter)};
}

std::pair<bool, std::string> defining_system() {
  const auto disk = fixtures::domain("disk");
  const auto pts = disk->samples(512, 0);
  const auto xy = Expression::coordinate_names(2);
  const std::vector<OneForm> forms{fixtures::form("dx", disk), fixtures::form("dy", disk),
                                   OneForm::differential(disk, Expression::parse("x*y", xy))};
  const DefiningSystem sys = build_defining_system(forms, pts, 1e-6);
  double eq = 0;
  for (const auto& e : sys.residuals()) eq = std::max(eq, e.residual);

  std::vector<TwoForm> betas{wedge(forms[0], forms[1]),
                             wedge(forms[0], sys.form(1, 2)) + wedge(sys.form(0, 1), forms[2]),
                             TwoForm::from_expressions(disk, {Expression::parse("exp(x)*cos(y)", xy)})};
  double rt = 0;
  for (const auto& beta : betas) rt = std::max(rt, max_norm(exterior_derivative(poincare_primitive(beta)) - beta, pts));
  const bool ok = sys.residuals().size() == 3 && eq <= 1e-6 && rt <= 1e-6;
  return {ok, fmt("%zu equations, max residual %.1e; d K round trip %.1e on %zu samples", sys.residuals().size(), eq,
                  rt, pts.size())};
}

std::pair<bool, std::string> order_grading() {
  const auto t0 = std::chrono::steady_clock::now();
  const CoverSpace& cover = fixtures::cover("strip-cover");
  Forms f;
  const SymbolId th = f.add("dtheta", cover.base_domain());
  const auto base_pts = cover.base_domain()->samples(kDefaultCertificationSamples, 1);
  const auto pts = cover.samples(16, 1);
  bool ok = true;
  std::string detail;
  for (std::size_t s = 1; s <= 4; ++s) {
    const double scale = std::pow(kTwoPi, double(s));
    const AlgebraElement e = AlgebraElement::word(Word(s, th));
    InvarianceCertificate cert = s <= 2 ? certify_s2(e, f.b, base_pts, 1e-8)
                                        : InvarianceCertificate{e, "defining-system", 0.0, 1e-8, true};
    if (s > 2) {
      // dtheta ^ dtheta = 0, so the defining system has zero auxiliary forms.
      const auto sys = build_defining_system(std::vector<OneForm>(s, f.b.at(th)), base_pts, 1e-8);
      cert.residual = sys.max_residual();
      cert.passed = cert.residual <= 1e-8;
    }
    HigherInvariant fn(cert, f.b, cover);
    const OrderReport rep = order_check(fn, pts, 1e-6 * scale);
    ok = ok && rep.residual <= 1e-6 * scale && rep.witness_magnitude >= 0.9 * scale;
    detail += fmt("s=%zu residual/(2pi)^s %.1e witness/(2pi)^s %.9f; ", s, rep.residual / scale,
                  rep.witness_magnitude / scale);
  }
  const double secs = seconds_since(t0);
  ok = ok && secs <= 60.0;
  return {ok, detail + fmt("%zu samples, %.1f s", pts.size(), secs)};
}

std::pair<bool, std::string> pairing_slice() {
  const CoverSpace& cover = fixtures::cover("strip-cover");
  Forms f;
  const SymbolId th = f.add("dtheta", cover.base_domain());
  const auto base_pts = cover.base_domain()->samples(kDefaultCertificationSamples, 1);
  const std::vector<InvarianceCertificate> els{certify_s2(AlgebraElement::unit(), f.b, base_pts, 1e-8),
                                               certify_s2(AlgebraElement::letter(th), f.b, base_pts, 1e-8),
                                               certify_s2(AlgebraElement::word({th, th}), f.b, base_pts, 1e-8)};
  const GroupElement g = generator(1, 0);
  const std::vector<GroupRingElement> etas{eta({}, 1), eta({g}, 1), eta({g, g}, 1)};
  QuadratureOptions opts;
  opts.grid = 2048;
  const PairingReport rep = chen_pairing(els, etas, f.b, cover, opts);
  const double diag[] = {1.0, kTwoPi, kTwoPi * kTwoPi};
  double lower = 0, rel = 0;
  for (std::size_t j = 0; j < 3; ++j)
    for (std::size_t i = 0; i < 3; ++i) {
      if (j > i) lower = std::max(lower, std::abs(rep.values[j][i]));
      if (i == j) rel = std::max(rel, std::abs(rep.values[j][i] - diag[i]) / diag[i]);
    }
  const bool ok = lower <= 1e-6 && rel <= 1e-6 && rep.rank == 3;
  return {ok, fmt("max below-diagonal %.1e; diagonal max rel %.1e; rank %zu", lower, rel, rep.rank)};
}

std::pair<bool, std::string> coboundary_solver() {
  const CoverSpace& strip = fixtures::cover("strip-cover");
  const CoverSpace& torus = fixtures::cover("torus-cover");
  double part = 0;
  for (const CoverSpace* c : {&strip, &torus})
    for (const auto& x : c->samples(512, 5)) part = std::max(part, std::abs(c->partition_sum(x) - 1.0));

  const auto pts = strip.samples(256, 3);
  const Cocycle alpha = Cocycle::coboundary_of(strip, [](const Point& x) { return Complex(std::sin(x[1]) * x[0]); });
  const CoverFunction fn = solve_coboundary(alpha, pts);
  std::vector<GroupElement> gs{generator(1, 0), generator(1, 0, -1)};
  std::mt19937_64 rng(20261015);
  std::uniform_int_distribution<int> power(-4, 4);
  for (int i = 0; i < 3; ++i) {
    int n = 0;
    while (n == 0 || n == 1 || n == -1) n = power(rng);
    gs.push_back(generator(1, 0, n));
  }
  double res = 0;
  std::string words;
  for (const auto& g : gs) {
    res = std::max(res, coboundary_residual(alpha, fn, g, pts));
    words += (words.empty() ? "" : ", ") + format_group_element(g);
  }
  const bool ok = part <= 1e-10 && res <= 1e-8;
  return {ok, fmt("partition sum deviation %.1e; max |g f - f - a(g)| %.1e over %s", part, res, words.c_str())};
}

std::pair<bool, std::string> kernel_inclusion() {
  const CoverSpace& cover = fixtures::cover("strip-cover");
  Forms f;
  const SymbolId r = f.add("dr", cover.base_domain());
  const auto base_pts = cover.base_domain()->samples(kDefaultCertificationSamples, 1);
  HigherInvariant fn(certify_s2(AlgebraElement::word({r, r}), f.b, base_pts, 1e-8), f.b, cover);
  const auto pts = cover.samples(16, 1);
  const KernelInclusionReport rep = kernel_inclusion_check(fn, pts, 1e-8);
  const bool ok = rep.included && !rep.residuals.empty() && rep.residuals.front() <= 1e-8;
  return {ok, fmt("(g-1) f residual %.1e; pairing on J^2 %.1e", rep.residuals.front(), rep.precondition_residual)};
}

std::pair<bool, std::string> determinism() {
  RunOverrides ov;
  ov.seed = 42;
  std::size_t bytes = 0;
  for (const char* name : {"strip-order", "annulus-homotopy", "strip-coboundary-input"}) {
    const Scenario sc = load_scenario(std::string(ITINT_SCENARIO_DIR) + "/" + name + ".scn");
    const std::string a = run_scenario(sc, ov).dump(2), b = run_scenario(sc, ov).dump(2);
    if (a != b) return {false, fmt("%s reports differ", name)};
    bytes += a.size();
  }
  return {true, fmt("3 scenarios, %zu identical bytes", bytes)};
}

}  // namespace

int main() {
  criterion(1, "iterated integral identities on the annulus", path_identities);
  criterion(2, "diffeomorphism invariance on the punctured plane", diffeomorphisms_check);
  criterion(3, "integrals over products of augmentation elements", eta_vanishing);
  criterion(4, "certified elements are homotopy invariant", homotopy_invariance);
  criterion(5, "defining system of three forms on the disk", defining_system);
  criterion(6, "order grading of powers of dtheta", order_grading);
  criterion(7, "pairing slice is triangular of rank 3", pairing_slice);
  criterion(8, "partition of unity and coboundary solver", coboundary_solver);
  criterion(9, "dr dr lies in the kernel", kernel_inclusion);
  criterion(10, "reports are deterministic", determinism);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures;
}
