#include <doctest.h>

#include <cmath>
#include <numbers>

#include "itint/errors.hpp"
#include "itint/expression.hpp"
#include "itint/fixtures.hpp"
#include "itint/geometry.hpp"

using namespace itint;

namespace {

Expression xy(const char* text) { return Expression::parse(text, Expression::coordinate_names(2)); }

}  // namespace

TEST_CASE("expression parsing and symbolic derivative") {
  const Expression e = xy("x^2*y + sin(pi*x)");
  const double p[] = {0.5, 2.0};
  CHECK(e(p) == doctest::Approx(0.25 * 2.0 + 1.0));
  CHECK(e.derivative(0)(p) == doctest::Approx(2.0 * 0.5 * 2.0 + std::numbers::pi * std::cos(std::numbers::pi * 0.5)));
  CHECK(e.derivative(1)(p) == doctest::Approx(0.25));
  CHECK(xy("3*2").is_constant());
  CHECK_THROWS_AS(xy("x +* y"), ParseError);
  CHECK_THROWS_AS(xy("q"), ParseError);
}

TEST_CASE("domains reject outside points") {
  const auto ann = domains::annulus(0.5, 2.0);
  CHECK(ann->contains({1.0, 0.0}));
  CHECK_FALSE(ann->contains({0.1, 0.0}));
  CHECK_FALSE(ann->contains({3.0, 0.0}));
  CHECK_FALSE(ann->contains({NAN, 1.0}));
  CHECK_FALSE(ann->star_center().has_value());
  CHECK(domains::disk(1.0)->star_center().has_value());
}

TEST_CASE("samples are deterministic and inside") {
  const auto ann = domains::annulus(0.5, 2.0);
  const auto a = ann->samples(64, 3), b = ann->samples(64, 3), c = ann->samples(64, 4);
  REQUIRE(a.size() == 64);
  CHECK(a == b);
  CHECK_FALSE(a == c);
  for (const auto& x : a) CHECK(ann->contains(x));
}

TEST_CASE("winding form is closed, x dy is not") {
  const auto ann = fixtures::domain("annulus");
  const auto pts = ann->samples(128, 1);
  CHECK(is_closed(fixtures::form("dtheta", ann), 1e-8, pts).closed);
  CHECK(is_closed(fixtures::form("dr", ann), 1e-8, pts).closed);
  const auto r = is_closed(fixtures::form("xdy", ann), 1e-8, pts);
  CHECK_FALSE(r.closed);
  CHECK(r.residual == doctest::Approx(1.0));
}

TEST_CASE("d of d f vanishes") {
  const auto d = domains::disk(1.0);
  const OneForm df = OneForm::differential(d, xy("exp(x)*sin(3*y) + x*y^2"));
  const auto pts = d->samples(64, 2);
  CHECK(max_norm(exterior_derivative(df), pts) < 1e-12);
  // without partials the finite-difference path is used
  const OneForm no_partials(d, [&](const Point& x, std::span<Complex> out) { df.coefficients(x, out); });
  CHECK(max_norm(exterior_derivative(no_partials), pts) < 1e-6);
}

TEST_CASE("exterior derivative matches analytic value") {
  const auto d = domains::plane();
  const OneForm w = OneForm::from_expressions(d, {xy("-y^3"), xy("x*y")});
  const TwoForm dw = exterior_derivative(w);
  const Point p{0.3, -0.7};
  CHECK(dw.component(p, 0, 1).real() == doctest::Approx(-0.7 + 3 * 0.49));
  CHECK(dw.component(p, 1, 0).real() == doctest::Approx(0.7 - 3 * 0.49));
}

TEST_CASE("wedge is antisymmetric") {
  const auto d = domains::plane();
  const OneForm a = OneForm::from_expressions(d, {xy("x"), xy("y^2")});
  const OneForm b = OneForm::from_expressions(d, {xy("cos(y)"), xy("1")});
  const auto pts = d->samples(32, 5);
  CHECK(max_norm(wedge(a, b) + wedge(b, a), pts) < 1e-14);
  CHECK(max_norm(wedge(a, a), pts) < 1e-14);
  CHECK(wedge(OneForm::coordinate(d, 0), OneForm::coordinate(d, 1)).component({0.2, 0.1}, 0, 1).real() == 1.0);
}

TEST_CASE("pull back along a rotation fixes dtheta") {
  const auto pp = fixtures::domain("punctured-plane");
  const OneForm th = fixtures::form("dtheta", pp);
  const OneForm pulled = pull_back(th, diffeomorphisms::rotation(pp, 0.9));
  for (const auto& x : pp->samples(32, 9)) {
    Complex a[2], b[2];
    th.coefficients(x, a);
    pulled.coefficients(x, b);
    CHECK(std::abs(a[0] - b[0]) < 1e-14);
    CHECK(std::abs(a[1] - b[1]) < 1e-14);
  }
}

TEST_CASE("forms on different domains do not mix") {
  const OneForm a = OneForm::coordinate(domains::disk(1.0), 0);
  const OneForm b = OneForm::coordinate(domains::plane(), 0);
  CHECK_THROWS_AS(a + b, DomainError);
}
