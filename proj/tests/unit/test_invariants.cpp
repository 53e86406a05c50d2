#include <doctest.h>

#include <cmath>
#include <numbers>

#include "itint/errors.hpp"
#include "itint/fixtures.hpp"
#include "itint/invariants.hpp"

using namespace itint;

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

struct Strip {
  const CoverSpace& cover = fixtures::cover("strip-cover");
  SymbolRegistry reg;
  Binding b;
  SymbolId th, r;
  std::vector<Point> base_pts = cover.base_domain()->samples(256, 1);
  std::vector<Point> pts = cover.samples(16, 1);

  Strip() {
    th = reg.intern("dtheta").id;
    r = reg.intern("dr").id;
    b.bind(th, fixtures::form("dtheta", cover.base_domain()));
    b.bind(r, fixtures::form("dr", cover.base_domain()));
  }
  InvarianceCertificate cert(const AlgebraElement& e) const { return certify_s2(e, b, base_pts, 1e-8); }
};

}  // namespace

TEST_CASE("uncertified elements are refused") {
  Strip s;
  const InvarianceCertificate c = s.cert(AlgebraElement::word({s.th, s.r}));
  CHECK_FALSE(c.passed);
  CHECK_THROWS_AS(HigherInvariant(c, s.b, s.cover), CertificationError);
}

TEST_CASE("f of dtheta is the angle coordinate") {
  Strip s;
  HigherInvariant f(s.cert(AlgebraElement::letter(s.th)), s.b, s.cover);
  CHECK(std::abs(f(s.cover.lift())) < 1e-14);
  const Point x{2.5, 1.3};
  CHECK(std::abs(f(x) - 2.5) < 1e-9);
  CHECK(f.cache_size() >= 1);
  CHECK(f.path_independence(x).passed);
}

TEST_CASE("evaluation along a path must start at the lift") {
  Strip s;
  HigherInvariant f(s.cert(AlgebraElement::letter(s.th)), s.b, s.cover);
  const SampledPath p = SampledPath::segment(s.cover.cover_domain(), {1.0, 1.0}, {2.0, 1.0});
  CHECK_THROWS_AS(f.evaluate_along(p), EndpointMismatch);
}

TEST_CASE("generator tuples are multisets") {
  CHECK(generator_tuples(1, 3).size() == 1);
  CHECK(generator_tuples(2, 2).size() == 3);
  CHECK(generator_tuples(2, 0).size() == 1);
}

TEST_CASE("order grading for powers of dtheta") {
  Strip s;
  for (std::size_t k = 1; k <= 2; ++k) {
    HigherInvariant f(s.cert(AlgebraElement::word(Word(k, s.th))), s.b, s.cover);
    const double scale = std::pow(kTwoPi, double(k));
    const OrderReport rep = order_check(f, s.pts, 1e-6 * scale);
    CHECK(rep.vanishes);
    CHECK(rep.exact);
    // (g - 1)^k f = (2 pi)^k exactly for polynomials of degree k in theta / k!
    CHECK(std::abs(rep.witness_magnitude - scale) <= 1e-6 * scale);
  }
}

TEST_CASE("pairing slice is triangular with the expected diagonal") {
  Strip s;
  std::vector<InvarianceCertificate> els{s.cert(AlgebraElement::unit()), s.cert(AlgebraElement::letter(s.th)),
                                         s.cert(AlgebraElement::word({s.th, s.th}))};
  const GroupElement g = generator(1, 0);
  std::vector<GroupRingElement> etas{eta({}, 1), eta({g}, 1), eta({g, g}, 1)};
  const PairingReport rep = chen_pairing(els, etas, s.b, s.cover);
  const double diag[] = {1.0, kTwoPi, kTwoPi * kTwoPi};
  for (std::size_t j = 0; j < 3; ++j)
    for (std::size_t i = 0; i < 3; ++i) {
      if (i == j) CHECK(std::abs(rep.values[j][i] - diag[i]) <= 1e-6 * diag[i]);
      if (j > i) CHECK(std::abs(rep.values[j][i]) <= 1e-6);
    }
  CHECK(rep.rank == 3);
}

TEST_CASE("pairing is linear in the group ring") {
  Strip s;
  const AlgebraElement e = AlgebraElement::word({s.th, s.th});
  const GroupElement g = generator(1, 0);
  const auto a = eta({g}, 1), b = eta({g, g}, 1);
  const Complex lhs = pair(e, a + b, s.b, s.cover).value;
  const Complex rhs = pair(e, a, s.b, s.cover).value + pair(e, b, s.b, s.cover).value;
  CHECK(std::abs(lhs - rhs) < 1e-9);
}

TEST_CASE("dr dr lies in the kernel") {
  Strip s;
  HigherInvariant f(s.cert(AlgebraElement::word({s.r, s.r})), s.b, s.cover);
  const KernelInclusionReport rep = kernel_inclusion_check(f, s.pts, 1e-8);
  CHECK(rep.included);
  REQUIRE(rep.residuals.size() == 2);
  CHECK(rep.residuals[0] <= 1e-8);
}

TEST_CASE("kernel check precondition") {
  Strip s;
  HigherInvariant f(s.cert(AlgebraElement::letter(s.th)), s.b, s.cover);
  CHECK_THROWS_AS(kernel_inclusion_check(f, s.pts, 1e-8), PreconditionError);
  HigherInvariant z(s.cert(AlgebraElement()), s.b, s.cover);
  CHECK(kernel_inclusion_check(z, s.pts, 1e-8).included);
}

TEST_CASE("torus invariants of dx and dy") {
  const CoverSpace& t = fixtures::cover("torus-cover");
  SymbolRegistry reg;
  Binding b;
  const SymbolId dx = reg.intern("dx").id, dy = reg.intern("dy").id;
  b.bind(dx, fixtures::form("dx", t.base_domain()));
  b.bind(dy, fixtures::form("dy", t.base_domain()));
  const auto base_pts = t.base_domain()->samples(128, 2);
  const AlgebraElement e = AlgebraElement::word({dx, dy}) + AlgebraElement::word({dy, dx});
  HigherInvariant f(certify_s2(e, b, base_pts, 1e-8), b, t);
  const OrderReport rep = order_check(f, t.samples(8, 2), 1e-6);
  CHECK(rep.vanishes);
  CHECK(rep.exact);
}
