#pragma once

// Smooth and piecewise-smooth paths in chart coordinates.

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "itint/expression.hpp"
#include "itint/geometry.hpp"

namespace itint {

// A smooth map [0,1] -> R^n with its velocity, given either analytically or
// as N+1 uniform samples u_i = i/N of points and velocities (cubic Hermite
// interpolation between nodes).
class Curve {
 public:
  using Evaluator = std::function<void(double u, Point& x, Point& v)>;

  static Curve analytic(std::size_t dim, Evaluator evaluator);
  static Curve gridded(std::vector<Point> points, std::vector<Point> velocities);

  std::size_t dimension() const noexcept { return dim_; }
  bool is_gridded() const noexcept { return !points_.empty(); }
  std::size_t grid_intervals() const noexcept { return points_.empty() ? 0 : points_.size() - 1; }
  const std::vector<Point>& grid_points() const noexcept { return points_; }
  const std::vector<Point>& grid_velocities() const noexcept { return velocities_; }

  void evaluate(double u, Point& x, Point& v) const;
  // u -> 1-u with negated velocity; exact on gridded data.
  Curve reversed() const;

 private:
  Curve() = default;

  std::size_t dim_ = 0;
  Evaluator analytic_;
  std::vector<Point> points_;
  std::vector<Point> velocities_;
};

// Smooth piece occupying [t0, t1] of the global parameter interval.
struct PathPiece {
  Curve curve;
  double t0 = 0.0;
  double t1 = 1.0;
};

// A piecewise-smooth path p: [0,1] -> domain. Single-piece paths are smooth;
// composition appends pieces rather than smoothing the junction.
class SampledPath {
 public:
  // Checks that the curve stays inside the domain on a check grid.
  SampledPath(DomainPtr domain, Curve curve);
  // Pieces must tile [0,1] in order and be continuous at the junctions.
  SampledPath(DomainPtr domain, std::vector<PathPiece> pieces);

  static SampledPath from_functions(DomainPtr domain, std::function<Point(double)> point,
                                    std::function<Point(double)> velocity);
  // coordinates[i] is an expression in t; velocities come from symbolic
  // differentiation.
  static SampledPath from_expressions(DomainPtr domain, std::vector<Expression> coordinates);
  // Rejects velocities inconsistent with the points beyond O(1/N^2).
  static SampledPath gridded(DomainPtr domain, std::vector<Point> points, std::vector<Point> velocities);
  static SampledPath constant(DomainPtr domain, const Point& x);
  static SampledPath segment(DomainPtr domain, const Point& a, const Point& b);
  // Straight segments through consecutive points, composed left to right.
  static SampledPath polyline(DomainPtr domain, const std::vector<Point>& points);

  const DomainPtr& domain_ptr() const noexcept { return domain_; }
  const ChartDomain& domain() const noexcept { return *domain_; }
  std::size_t dimension() const noexcept { return domain_->dimension(); }
  std::span<const PathPiece> pieces() const noexcept { return pieces_; }

  Point start() const;
  Point end() const;
  // Global parameter; velocity is d/dt of the global parametrization.
  void evaluate(double t, Point& x, Point& v) const;
  Point point(double t) const;

 private:
  DomainPtr domain_;
  std::vector<PathPiece> pieces_;
};

inline constexpr double kEndpointTolerance = 1e-10;

// p on [0,1/2] followed by q on [1/2,1].
SampledPath compose(const SampledPath& p, const SampledPath& q, double tol = kEndpointTolerance);
// t -> p(1-t)
SampledPath inverse(const SampledPath& p);

// Orientation-preserving reparametrization phi of [0,1]. phi'(0) = 0 or
// phi'(1) = 0 is admitted; phi' must be positive at interior check nodes.
struct Reparametrization {
  std::string name;
  std::function<double(double)> phi;
  std::function<double(double)> dphi;
};

namespace reparametrizations {
Reparametrization identity();
Reparametrization square();      // t^2
Reparametrization smoothstep();  // 3t^2 - 2t^3
Reparametrization sine_warp(double amplitude = 0.3);  // t + a sin(2 pi t) / (2 pi)
}  // namespace reparametrizations

// p o phi with chain-rule velocities; endpoints are reproduced exactly.
SampledPath reparametrize(const SampledPath& p, const Reparametrization& phi);

// Perturbation field over the global parameter: value and d/dt. Must vanish
// at t = 0 and t = 1.
using PerturbationField = std::function<void(double t, Point& value, Point& derivative)>;

namespace fields {
// sin(k pi t) times the unit vector from `center` to p(t).
PerturbationField radial_bump(const SampledPath& base, Point center, int k = 1);
// sin(k pi t) times a fixed vector.
PerturbationField direction_bump(Point direction, int k = 1);
}  // namespace fields

// Fixed-endpoint family p + a * field.
class PathFamily {
 public:
  PathFamily(SampledPath base, PerturbationField field);

  const SampledPath& base() const noexcept { return base_; }
  const PerturbationField& field() const noexcept { return field_; }

 private:
  SampledPath base_;
  PerturbationField field_;
};

// Member of the family at the given amplitude; throws DomainError if it
// leaves the domain.
SampledPath perturb(const PathFamily& family, double amplitude);

}  // namespace itint
