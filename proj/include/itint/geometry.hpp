#pragma once

// Differential 1- and 2-forms on open chart domains of R^n.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "itint/expression.hpp"
#include "itint/point.hpp"

namespace itint {

// An open subset of R^n described by a membership predicate and a bounding
// box used for sampling. A star center, when given, is validated against
// the default sample set at construction.
class ChartDomain {
 public:
  using Membership = std::function<bool(const Point&)>;

  ChartDomain(std::string name, std::size_t dim, Membership contains, Point box_lo, Point box_hi,
              std::optional<Point> star_center = std::nullopt);

  const std::string& name() const noexcept { return name_; }
  std::size_t dimension() const noexcept { return dim_; }
  bool contains(const Point& x) const { return x.size() == dim_ && x.finite() && contains_(x); }
  const std::optional<Point>& star_center() const noexcept { return star_center_; }
  const Point& box_lo() const noexcept { return lo_; }
  const Point& box_hi() const noexcept { return hi_; }

  // Samples from a seeded, shifted Halton sequence over the bounding box,
  // keeping points whose coordinate neighbours at distance `margin` are
  // also inside. Deterministic in (count, seed, margin).
  std::vector<Point> samples(std::size_t count, std::uint64_t seed, double margin = 1e-3) const;

  // Membership of `checks` equally spaced points on the closed segment.
  bool segment_inside(const Point& a, const Point& b, int checks = 33) const;

  friend bool operator==(const ChartDomain& a, const ChartDomain& b) noexcept {
    return a.dim_ == b.dim_ && a.name_ == b.name_;
  }

 private:
  std::string name_;
  std::size_t dim_;
  Membership contains_;
  Point lo_, hi_;
  std::optional<Point> star_center_;
};

using DomainPtr = std::shared_ptr<const ChartDomain>;

void require_same_domain(const ChartDomain& a, const ChartDomain& b, const char* what);

namespace domains {
DomainPtr annulus(double r_inner, double r_outer);
DomainPtr punctured_plane(double extent = 10.0);
// Plane with the two points (-1,0) and (1,0) removed.
DomainPtr twice_punctured_plane(double extent = 10.0);
DomainPtr disk(double radius, Point center = {0.0, 0.0});
DomainPtr rectangle(Point lo, Point hi);
// All of R^dim; `extent` only bounds the sampling box.
DomainPtr plane(std::size_t dim = 2, double extent = 10.0, std::string name = {});
// {(theta, r) : r_inner < r < r_outer}; sampling uses |theta| <= theta_extent.
DomainPtr strip(double r_inner, double r_outer, double theta_extent);
}  // namespace domains

class OneForm {
 public:
  // Writes a_1..a_n at x.
  using Coefficients = std::function<void(const Point& x, std::span<Complex> out)>;
  // Writes out[i*n + j] = d a_i / d x_j at x.
  using Partials = std::function<void(const Point& x, std::span<Complex> out)>;

  OneForm(DomainPtr domain, Coefficients coefficients, Partials partials = {});

  static OneForm zero(DomainPtr domain);
  // dx_i
  static OneForm coordinate(DomainPtr domain, std::size_t i);
  // sum_i a_i dx_i with partials obtained by symbolic differentiation.
  static OneForm from_expressions(DomainPtr domain, std::vector<Expression> coefficients);
  // df
  static OneForm differential(DomainPtr domain, const Expression& f);

  const DomainPtr& domain_ptr() const noexcept { return domain_; }
  const ChartDomain& domain() const noexcept { return *domain_; }
  std::size_t dimension() const noexcept { return domain_->dimension(); }

  void coefficients(const Point& x, std::span<Complex> out) const { coefficients_(x, out); }
  // omega_x(v)
  Complex apply(const Point& x, const Point& v) const;
  bool has_partials() const noexcept { return static_cast<bool>(partials_); }
  void partials(const Point& x, std::span<Complex> out) const;

  OneForm scaled(Complex s) const;
  friend OneForm operator+(const OneForm& a, const OneForm& b);
  friend OneForm operator-(const OneForm& a, const OneForm& b) { return a + b.scaled(-1.0); }

 private:
  DomainPtr domain_;
  Coefficients coefficients_;
  Partials partials_;
};

// Antisymmetric 2-form; only components b_ij with i < j are stored, in the
// order (0,1), (0,2), ..., (1,2), ...
class TwoForm {
 public:
  using Components = std::function<void(const Point& x, std::span<Complex> out)>;

  TwoForm(DomainPtr domain, Components components);

  static TwoForm zero(DomainPtr domain);
  // Components given as expressions in component order.
  static TwoForm from_expressions(DomainPtr domain, std::vector<Expression> components);

  static std::size_t component_count(std::size_t n) noexcept { return n * (n - 1) / 2; }
  static std::size_t index(std::size_t i, std::size_t j, std::size_t n) noexcept;

  const DomainPtr& domain_ptr() const noexcept { return domain_; }
  const ChartDomain& domain() const noexcept { return *domain_; }
  std::size_t dimension() const noexcept { return domain_->dimension(); }

  void components(const Point& x, std::span<Complex> out) const { components_(x, out); }
  // b_ij for any i, j (antisymmetric extension).
  Complex component(const Point& x, std::size_t i, std::size_t j) const;
  // beta_x(u, v)
  Complex apply(const Point& x, const Point& u, const Point& v) const;
  // max_{i<j} |b_ij(x)|
  double norm_at(const Point& x) const;

  TwoForm scaled(Complex s) const;
  friend TwoForm operator+(const TwoForm& a, const TwoForm& b);
  friend TwoForm operator-(const TwoForm& a, const TwoForm& b) { return a + b.scaled(-1.0); }

 private:
  DomainPtr domain_;
  Components components_;
};

inline constexpr double kDefaultFiniteDifferenceStep = 1e-5;

TwoForm wedge(const OneForm& alpha, const OneForm& beta);

// b_ij = d a_j / d x_i - d a_i / d x_j, analytically when the form carries
// partials and by central differences with step h otherwise.
TwoForm exterior_derivative(const OneForm& omega, double h = kDefaultFiniteDifferenceStep);

double max_norm(const TwoForm& beta, std::span<const Point> samples);

struct ClosednessReport {
  bool closed = false;
  double residual = 0.0;
};

ClosednessReport is_closed(const OneForm& omega, double tol, std::span<const Point> samples,
                           double h = kDefaultFiniteDifferenceStep);

// A diffeomorphism F: source -> target with analytic Jacobian
// (out[i*n + j] = d F_i / d x_j).
struct Diffeomorphism {
  std::string name;
  DomainPtr source;
  DomainPtr target;
  std::function<Point(const Point&)> map;
  std::function<void(const Point&, std::span<double>)> jacobian;
};

// (F^* omega)_j(x) = sum_i a_i(F(x)) dF_i/dx_j(x); omega must live on F's target.
OneForm pull_back(const OneForm& omega, const Diffeomorphism& F);

namespace diffeomorphisms {
Diffeomorphism identity(DomainPtr domain);
// Rotation of the plane about the origin restricted to `domain`, which must
// be rotation invariant.
Diffeomorphism rotation(DomainPtr domain, double angle);
// x -> k x from `source` onto `target`.
Diffeomorphism scaling(DomainPtr source, DomainPtr target, double factor);
}  // namespace diffeomorphisms

}  // namespace itint
