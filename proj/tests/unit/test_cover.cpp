#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "itint/cover.hpp"
#include "itint/errors.hpp"
#include "itint/fixtures.hpp"

using namespace itint;

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

GroupRingElement random_ring_element(std::mt19937_64& rng, std::size_t rank) {
  std::uniform_int_distribution<int> e(-2, 2), c(-3, 3);
  GroupRingElement x(rank);
  for (int i = 0; i < 3; ++i) {
    GroupElement g(rank);
    for (auto& gi : g) gi = e(rng);
    x.add_term(g, c(rng));
  }
  return x;
}

}  // namespace

TEST_CASE("group elements") {
  const GroupElement g = group_multiply(generator(2, 0, 2), generator(2, 1, -1));
  CHECK(format_group_element(g) == "g1^2*g2^-1");
  CHECK(format_group_element(group_identity(2)) == "1");
  CHECK(is_identity(group_multiply(g, group_inverse(g))));
}

TEST_CASE("group ring ring axioms") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const auto a = random_ring_element(rng, 2), b = random_ring_element(rng, 2), c = random_ring_element(rng, 2);
    CHECK((a * b) * c == a * (b * c));
    CHECK(a * (b + c) == a * b + a * c);
    CHECK(a * b == b * a);
    CHECK((a * b).augmentation() == a.augmentation() * b.augmentation());
    CHECK(GroupRingElement::one(2) * a == a);
    (a * b - c).check_invariants();
  }
}

TEST_CASE("eta lies in the augmentation ideal") {
  const GroupRingElement e2 = eta({generator(1, 0), generator(1, 0)}, 1);
  // (g - 1)^2 = g^2 - 2 g + 1
  CHECK(e2.coefficient(generator(1, 0, 2)) == 1);
  CHECK(e2.coefficient(generator(1, 0)) == -2);
  CHECK(e2.coefficient(group_identity(1)) == 1);
  CHECK(e2.augmentation() == 0);
  CHECK(eta({}, 1) == GroupRingElement::one(1));
}

TEST_CASE("group ring overflow is reported") {
  GroupRingElement a = GroupRingElement::of(group_identity(1), INT64_MAX);
  CHECK_THROWS_AS(a + a, ArithmeticError);
}

TEST_CASE("deck transformations commute with the projection") {
  const CoverSpace& c = fixtures::cover("strip-cover");
  for (const auto& x : c.samples(32, 2)) {
    const Point y = c.act(generator(1, 0, 3), x);
    CHECK(distance(c.project(x), c.project(y)) < 1e-12);
    CHECK(y[0] == doctest::Approx(x[0] + 3 * kTwoPi));
  }
  const CoverSpace& t = fixtures::cover("torus-cover");
  const Point x{0.3, 0.7};
  CHECK(t.base_distance(t.project(x), t.project(t.act(generator(2, 1, -2), x))) < 1e-12);
}

TEST_CASE("partition of unity sums to one over every orbit") {
  for (const char* name : {"strip-cover", "torus-cover"}) {
    const CoverSpace& c = fixtures::cover(name);
    for (const auto& x : c.samples(64, 8)) CHECK(std::abs(c.partition_sum(x) - 1.0) <= 1e-10);
  }
}

TEST_CASE("base loops wind once per generator power") {
  const CoverSpace& c = fixtures::cover("strip-cover");
  SymbolRegistry reg;
  Binding b;
  const SymbolId th = reg.intern("th").id;
  b.bind(th, fixtures::form("dtheta", c.base_domain()));
  for (int n : {1, 2, -1}) {
    const SampledPath loop = base_loop(generator(1, 0, n), c);
    CHECK(distance(loop.start(), loop.end()) < 1e-12);
    CHECK(std::abs(iterint(loop, {th}, b).value - n * kTwoPi) < 1e-9);
  }
}

TEST_CASE("eta vanishing on the strip") {
  const CoverSpace& c = fixtures::cover("strip-cover");
  SymbolRegistry reg;
  Binding b;
  const SymbolId th = reg.intern("th").id;
  b.bind(th, fixtures::form("dtheta", c.base_domain()));
  for (std::size_t s = 1; s <= 3; ++s) {
    const std::vector<GroupElement> gs(s, generator(1, 0));
    for (std::size_t r = 1; r <= s; ++r) {
      const auto rep = check_eta_vanishing(gs, Word(r, th), b, c);
      const double scale = std::pow(kTwoPi, double(s));
      if (r < s)
        CHECK(std::abs(rep.value) <= 1e-6 * scale);
      else
        CHECK(std::abs(rep.value - scale) <= 1e-6 * scale);
    }
    CHECK_THROWS_AS(check_eta_vanishing(gs, Word(s + 1, th), b, c), PreconditionError);
  }
}

TEST_CASE("group ring action on functions") {
  const CoverSpace& c = fixtures::cover("strip-cover");
  const CoverFunction f = [](const Point& x) { return Complex(x[0] * x[0]); };
  const Point x{0.5, 1.0};
  // (g - 1) f at x = f(g x) - f(x)
  const Complex v = apply_group_ring(eta({generator(1, 0)}, 1), f, x, c);
  CHECK(v.real() == doctest::Approx((0.5 + kTwoPi) * (0.5 + kTwoPi) - 0.25));
}

TEST_CASE("coboundary solver inverts constant and coboundary cocycles") {
  const CoverSpace& c = fixtures::cover("strip-cover");
  const auto pts = c.samples(64, 3);
  const Cocycle k = Cocycle::constant(c, {Complex(kTwoPi)});
  CHECK(k.relation_residual(pts) < 1e-12);
  const CoverFunction f = solve_coboundary(k, pts);
  for (const auto& g : {generator(1, 0), generator(1, 0, -1), generator(1, 0, 3)})
    CHECK(coboundary_residual(k, f, g, pts) <= 1e-8);

  const Cocycle h = Cocycle::coboundary_of(c, [](const Point& x) { return Complex(std::sin(x[1]) * x[0]); });
  const CoverFunction fh = solve_coboundary(h, pts);
  CHECK(coboundary_residual(h, fh, generator(1, 0, 2), pts) <= 1e-8);
}

TEST_CASE("non-cocycles are rejected") {
  // On Z^2 the values a(g1)(x) = y, a(g2) = 0 fail a(g1 g2) = a(g2 g1).
  const CoverSpace& t = fixtures::cover("torus-cover");
  const auto pts = t.samples(32, 3);
  const Cocycle bad(t, {[](const Point& x) { return Complex(x[1]); }, [](const Point&) { return Complex(0.0); }});
  CHECK(bad.relation_residual(pts) >= 1.0 - 1e-12);
  CHECK_THROWS_AS(solve_coboundary(bad, pts), CocycleError);
}

TEST_CASE("torus cover group paths") {
  const CoverSpace& t = fixtures::cover("torus-cover");
  const GroupElement g = group_multiply(generator(2, 0, 2), generator(2, 1, -1));
  const SampledPath p = group_path(g, t.lift(), t);
  CHECK(distance(p.end(), t.act(g, t.lift())) < 1e-12);
}
