#include <doctest.h>

#include <cmath>
#include <numbers>

#include "itint/errors.hpp"
#include "itint/evaluator.hpp"
#include "itint/fixtures.hpp"

using namespace itint;

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

struct Setup {
  SymbolRegistry reg;
  Binding b;
  SymbolId th, r, w, dx, dy;

  explicit Setup(const DomainPtr& d) {
    th = bind("dtheta", d);
    r = bind("dr", d);
    w = bind("xdy", d);
    dx = bind("dx", d);
    dy = bind("dy", d);
  }
  SymbolId bind(const std::string& name, const DomainPtr& d) {
    const SymbolId id = reg.intern(name).id;
    b.bind(id, fixtures::form(name, d));
    return id;
  }
};

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

}  // namespace

TEST_CASE("empty word integrates to one") {
  Setup s(fixtures::domain("annulus"));
  const auto r = iterint(fixtures::loop("annulus-core"), {}, s.b);
  CHECK(r.value == Complex(1.0, 0.0));
}

TEST_CASE("winding number oracle") {
  Setup s(fixtures::domain("annulus"));
  const SampledPath core = fixtures::loop("annulus-core");
  for (int k = 1; k <= 4; ++k) {
    const Word w(k, s.th);
    // dtheta^k along a loop winding once is (2 pi)^k / k!
    CHECK(std::abs(iterint(core, w, s.b).value - std::pow(kTwoPi, k) / factorial(k)) < 1e-9 * std::pow(kTwoPi, k));
  }
  CHECK(std::abs(iterint(core, {s.r}, s.b).value) < 1e-12);
}

TEST_CASE("polynomial oracle on a segment") {
  const auto plane = fixtures::domain("plane");
  Setup s(plane);
  const SampledPath seg = SampledPath::segment(plane, {0.0, 0.0}, {2.0, 3.0});
  // dx dy along a straight segment is (dx total)(dy total) / 2
  CHECK(std::abs(iterint(seg, {s.dx, s.dy}, s.b).value - 3.0) < 1e-12);
  CHECK(std::abs(iterint(seg, {s.dx, s.dx, s.dx}, s.b).value - 8.0 / 6.0) < 1e-12);
}

TEST_CASE("Richardson error estimate tracks the true error") {
  Setup s(fixtures::domain("annulus"));
  // theta(t) = sin(3t), so dtheta dtheta integrates to sin(3)^2 / 2
  const SampledPath arc = SampledPath::from_functions(
      fixtures::domain("annulus"),
      [](double t) { return Point{std::cos(std::sin(3 * t)), std::sin(std::sin(3 * t))}; },
      [](double t) {
        const double a = std::sin(3 * t), da = 3 * std::cos(3 * t);
        return Point{-da * std::sin(a), da * std::cos(a)};
      });
  const double exact = std::sin(3.0) * std::sin(3.0) / 2;
  QuadratureOptions raw;
  raw.grid = 64;
  raw.extrapolate = false;
  const auto coarse = iterint(arc, {s.th, s.th}, s.b, raw);
  CHECK(std::abs(coarse.value - exact) < 1e-3);
  QuadratureOptions fine;
  fine.grid = 64;
  const auto ext = iterint(arc, {s.th, s.th}, s.b, fine);
  CHECK(std::abs(ext.value - exact) < 0.1 * std::abs(coarse.value - exact));
  CHECK(std::abs(ext.value - exact) <= 2 * ext.richardson_error);
}

TEST_CASE("Chen matrix holds all contiguous sub-words") {
  Setup s(fixtures::domain("annulus"));
  const SampledPath up = fixtures::loop("upper-half");
  const Word w{s.th, s.r, s.w};
  const ChenMatrix m = word_matrix(up, w, s.b);
  CHECK(m.at(0, 0) == Complex(1.0));
  CHECK(std::abs(m.at(0, 1) - iterint(up, {s.th}, s.b).value) < 1e-12);
  CHECK(std::abs(m.at(1, 3) - iterint(up, {s.r, s.w}, s.b).value) < 1e-12);
  CHECK(std::abs(m.at(0, 3) - iterint(up, w, s.b).value) < 1e-12);
}

TEST_CASE("identities hold on the annulus") {
  Setup s(fixtures::domain("annulus"));
  const SampledPath up = fixtures::loop("upper-half");
  const SampledPath lo = inverse(fixtures::loop("lower-half"));
  const std::vector<Word> words{{s.th}, {s.th, s.r}, {s.w, s.th}, {s.th, s.r, s.th}, {s.r, s.r, s.w}};
  for (const auto& w : words) {
    for (const auto& phi : {reparametrizations::square(), reparametrizations::sine_warp()})
      CHECK(check_reparametrization(up, phi, w, s.b).residual <= 1e-6);
    CHECK(check_composition(up, lo, w, s.b).residual <= 1e-10);
    CHECK(check_reversal(up, w, s.b).residual <= 1e-8);
    for (const auto& v : words)
      if (w.size() + v.size() <= 5) CHECK(check_shuffle(up, w, v, s.b).residual <= 1e-6);
  }
}

TEST_CASE("diffeomorphism invariance on the punctured plane") {
  const auto pp = fixtures::domain("punctured-plane");
  Setup s(pp);
  const SampledPath p = fixtures::loop("annulus-core", pp);
  const Word w{s.th, s.r, s.th};
  CHECK(check_diffeo_invariance(p, diffeomorphisms::rotation(pp, 0.7), w, s.b).residual <= 1e-6);
  CHECK(check_diffeo_invariance(p, diffeomorphisms::scaling(pp, pp, 1.5), w, s.b).residual <= 1e-6);
}

TEST_CASE("closed path integrals of exact forms vanish") {
  Setup s(fixtures::domain("annulus"));
  CHECK(std::abs(iterint(fixtures::loop("annulus-core"), {s.r}, s.b).value) < 1e-12);
}

TEST_CASE("unbound letters are reported") {
  Setup s(fixtures::domain("annulus"));
  CHECK_THROWS_AS(iterint(fixtures::loop("annulus-core"), {99}, s.b), UnboundSymbol);
}

TEST_CASE("form and path domains must agree") {
  Setup s(fixtures::domain("plane"));
  CHECK_THROWS_AS(iterint(fixtures::loop("annulus-core"), {s.dx}, s.b), DomainError);
}

TEST_CASE("element evaluation is linear") {
  Setup s(fixtures::domain("annulus"));
  const SampledPath up = fixtures::loop("upper-half");
  AlgebraElement e = AlgebraElement::word({s.th, s.r}, 2.0) + AlgebraElement::letter(s.w, -0.5) + AlgebraElement::unit();
  const Complex want = 2.0 * iterint(up, {s.th, s.r}, s.b).value - 0.5 * iterint(up, {s.w}, s.b).value + 1.0;
  CHECK(std::abs(eval_element(up, e, s.b).value - want) < 1e-12);
}

TEST_CASE("convergence study reports second order") {
  const auto rep = convergence_study([](int n) { return 1.0 / (double(n) * n); }, 16, 3);
  REQUIRE(rep.orders.size() == 2);
  CHECK(rep.orders[0] == doctest::Approx(2.0));
  CHECK(rep.converges(1.9, 1e-14));
  const auto flat = convergence_study([](int) { return 1e-3; }, 16, 3);
  CHECK_FALSE(flat.converges(1.9, 1e-14));
}
