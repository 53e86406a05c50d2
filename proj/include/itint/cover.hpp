#pragma once

// Universal covers with a free abelian deck group acting by translations,
// the integral group ring of the deck group, and the partition-of-unity
// coboundary solver.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "itint/evaluator.hpp"
#include "itint/geometry.hpp"
#include "itint/paths.hpp"

namespace itint {

// Element of Z^k as its exponent vector over the generators.
using GroupElement = std::vector<std::int64_t>;

GroupElement group_identity(std::size_t rank);
GroupElement generator(std::size_t rank, std::size_t i, std::int64_t power = 1);
GroupElement group_multiply(const GroupElement& a, const GroupElement& b);
GroupElement group_inverse(const GroupElement& g);
bool is_identity(const GroupElement& g);
// "1", "g1", "g1^2*g2^-1", ...
std::string format_group_element(const GroupElement& g);

// Finite Z-linear combination of group elements. Zero coefficients are never
// stored; the coefficient sum is kept alongside. Arithmetic throws
// ArithmeticError on int64 overflow.
class GroupRingElement {
 public:
  explicit GroupRingElement(std::size_t rank = 1) : rank_(rank) {}

  static GroupRingElement zero(std::size_t rank) { return GroupRingElement(rank); }
  static GroupRingElement one(std::size_t rank);
  static GroupRingElement of(const GroupElement& g, std::int64_t coefficient = 1);

  std::size_t rank() const noexcept { return rank_; }
  const std::map<GroupElement, std::int64_t>& terms() const noexcept { return terms_; }
  std::int64_t augmentation() const noexcept { return augmentation_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  std::int64_t coefficient(const GroupElement& g) const;

  void add_term(const GroupElement& g, std::int64_t c);

  friend GroupRingElement operator+(const GroupRingElement& a, const GroupRingElement& b);
  friend GroupRingElement operator-(const GroupRingElement& a, const GroupRingElement& b);
  friend GroupRingElement operator*(const GroupRingElement& a, const GroupRingElement& b);
  friend bool operator==(const GroupRingElement& a, const GroupRingElement& b) noexcept {
    return a.rank_ == b.rank_ && a.terms_ == b.terms_;
  }

  // Throws std::logic_error when a stored coefficient is zero or the cached
  // augmentation disagrees with the coefficient sum.
  void check_invariants() const;

  std::string str() const;

 private:
  std::size_t rank_;
  std::map<GroupElement, std::int64_t> terms_;
  std::int64_t augmentation_ = 0;
};

// (g_1 - 1)(g_2 - 1)...(g_s - 1); the empty product is 1.
GroupRingElement eta(const std::vector<GroupElement>& gammas, std::size_t rank);

using CoverFunction = std::function<Complex(const Point&)>;

struct CoverSpec {
  std::string name;
  DomainPtr cover;
  DomainPtr base;
  std::function<Point(const Point&)> projection;
  // out[i*n + j] = d pi_i / d x_j
  std::function<void(const Point&, std::span<double>)> projection_jacobian;
  // Generator i translates coordinate axes[i] by periods[i].
  std::vector<std::size_t> axes;
  std::vector<double> periods;
  Point lift;  // x~0
  // Extra half-width of the bump beyond half a period, in periods.
  double bump_width = 0.25;
  // Distance on the base; Euclidean when empty.
  std::function<double(const Point&, const Point&)> base_distance;
};

// Immutable cover X~ -> X with deck group Z^k acting by axis translations.
// Construction verifies pi o g = pi for every generator and the partition
// of unity on the default cover samples.
class CoverSpace {
 public:
  explicit CoverSpace(CoverSpec spec);

  const std::string& name() const noexcept { return spec_.name; }
  const DomainPtr& cover_domain() const noexcept { return spec_.cover; }
  const DomainPtr& base_domain() const noexcept { return spec_.base; }
  std::size_t rank() const noexcept { return spec_.axes.size(); }
  const Point& lift() const noexcept { return spec_.lift; }
  Point base_point() const { return project(spec_.lift); }
  double bump_width() const noexcept { return spec_.bump_width; }
  std::span<const double> periods() const noexcept { return spec_.periods; }
  std::span<const std::size_t> axes() const noexcept { return spec_.axes; }

  Point act(const GroupElement& g, const Point& x) const;
  Point project(const Point& x) const { return spec_.projection(x); }
  double base_distance(const Point& a, const Point& b) const;

  // u(x): smooth bump over the fundamental domain normalised so that the
  // sum over the orbit, sum_t u(t^-1 x), is 1.
  double partition(const Point& x) const;
  // The group elements t with u(t^-1 x) != 0.
  std::vector<GroupElement> partition_support(const Point& x) const;
  double partition_sum(const Point& x) const;

  // pi o p on the base domain, with velocities through the Jacobian.
  SampledPath push_forward(const SampledPath& p) const;

  // Default sample set in the cover domain.
  std::vector<Point> samples(std::size_t count, std::uint64_t seed) const;

 private:
  double bump(std::size_t i, double t) const;
  double bump_orbit_sum(std::size_t i, double t) const;

  CoverSpec spec_;
};

namespace covers {
// (theta, r) -> (r cos theta, r sin theta) onto the annulus r1 < |x| < r2;
// the generator shifts theta by 2 pi and the lift is (0, r0).
CoverSpace strip_annulus(double r_inner = 0.5, double r_outer = 2.0, double r0 = 1.0, double bump_width = 0.25);
// R^2 over the torus R^2 / (L Z)^2, charted by the plane with periodic
// forms; the generators translate by (L, 0) and (0, L).
CoverSpace plane_torus(double period = 1.0, double bump_width = 0.25);
}  // namespace covers

// Path in the cover from x to g x: the straight segment, or a polyline
// through single generator steps when the segment leaves the domain.
// Throws UnreachableError otherwise.
SampledPath group_path(const GroupElement& g, const Point& x, const CoverSpace& cover);

struct FormalPath {
  std::int64_t coefficient = 0;
  SampledPath path;
};

// Linear extension to the group ring.
std::vector<FormalPath> group_path(const GroupRingElement& eta, const Point& x, const CoverSpace& cover);

// Base loop at x0 of a group element: pi of the group path from x~0.
SampledPath base_loop(const GroupElement& g, const CoverSpace& cover);

struct EtaVanishingReport {
  std::size_t r = 0;  // word length
  std::size_t s = 0;  // number of factors
  Complex value;      // integral over eta
  Complex expected;   // product of the loop integrals (r = s) or 0 (r < s)
  double residual = 0.0;
  double error_estimate = 0.0;
  std::vector<Complex> loop_integrals;  // int_{alpha_i} omega_i when r = s
};

// Integral of the word over eta = (a_1 - 1)...(a_s - 1), a_i the base loops
// of `gammas`, expanded over the 2^s subproducts and evaluated with the
// composition formula. Throws PreconditionError for r > s.
EtaVanishingReport check_eta_vanishing(const std::vector<GroupElement>& gammas, const Word& w,
                                       const Binding& base_binding, const CoverSpace& cover,
                                       const QuadratureOptions& opts = {});

// sum_g c_g f(g x)
Complex apply_group_ring(const GroupRingElement& eta, const CoverFunction& f, const Point& x,
                         const CoverSpace& cover);

// Map Gamma -> functions on the cover, stored by its generator values and
// extended along the canonical word g1^n1 g2^n2 ... by
// a(l t)(x) = a(l)(x) + a(t)(l^-1 x), a(l^-1)(x) = -a(l)(l x).
class Cocycle {
 public:
  Cocycle(const CoverSpace& cover, std::vector<CoverFunction> generator_values);

  // Constant functions c_i on the generators.
  static Cocycle constant(const CoverSpace& cover, std::vector<Complex> values);
  // a(g) = g h - h, i.e. a(g)(x) = h(g^-1 x) - h(x).
  static Cocycle coboundary_of(const CoverSpace& cover, CoverFunction h);

  const CoverSpace& cover() const noexcept { return *cover_; }
  Complex operator()(const GroupElement& g, const Point& x) const;

  // max over pairs (g, t) of {generators, inverses, pairwise products} and
  // samples of |a(g t)(x) - a(g)(x) - a(t)(g^-1 x)|.
  double relation_residual(std::span<const Point> samples) const;

 private:
  const CoverSpace* cover_;
  std::vector<CoverFunction> gens_;
};

// f(x) = -sum_t a(t)(x) u(t^-1 x). Verifies the cocycle relation within
// `cocycle_tol` (CocycleError) and the partition sum within 1e-10
// (PartitionError) on the samples first. The cover must outlive f.
CoverFunction solve_coboundary(const Cocycle& alpha, std::span<const Point> samples, double cocycle_tol = 1e-8);

// max over samples of |f(g^-1 x) - f(x) - a(g)(x)|
double coboundary_residual(const Cocycle& alpha, const CoverFunction& f, const GroupElement& g,
                           std::span<const Point> samples);

}  // namespace itint
