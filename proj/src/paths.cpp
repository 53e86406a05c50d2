#include "itint/paths.hpp"

#include <cmath>
#include <numbers>

#include "itint/errors.hpp"

namespace itint {

namespace {

constexpr int kCheckNodes = 64;

void check_inside(const ChartDomain& domain, const Curve& c) {
  Point x, v;
  if (c.is_gridded()) {
    for (const Point& p : c.grid_points())
      if (!domain.contains(p)) throw DomainError("path leaves " + domain.name());
    return;
  }
  for (int k = 0; k <= kCheckNodes; ++k) {
    c.evaluate(static_cast<double>(k) / kCheckNodes, x, v);
    if (!domain.contains(x)) throw DomainError("path leaves " + domain.name());
    if (!v.finite()) throw NonFiniteValue("path velocity is not finite");
  }
}

}  // namespace

Curve Curve::analytic(std::size_t dim, Evaluator evaluator) {
  Curve c;
  c.dim_ = dim;
  c.analytic_ = std::move(evaluator);
  return c;
}

Curve Curve::gridded(std::vector<Point> points, std::vector<Point> velocities) {
  if (points.size() < 2 || points.size() != velocities.size())
    throw DomainError("gridded curve needs N+1 >= 2 points with matching velocities");
  Curve c;
  c.dim_ = points.front().size();
  c.points_ = std::move(points);
  c.velocities_ = std::move(velocities);
  return c;
}

void Curve::evaluate(double u, Point& x, Point& v) const {
  if (!is_gridded()) {
    analytic_(u, x, v);
    return;
  }
  const std::size_t n = points_.size() - 1;
  const double s = std::clamp(u, 0.0, 1.0) * static_cast<double>(n);
  std::size_t k = static_cast<std::size_t>(std::floor(s));
  if (k >= n) k = n - 1;
  const double f = s - static_cast<double>(k);
  if (f == 0.0) {
    x = points_[k];
    v = velocities_[k];
    return;
  }
  if (f == 1.0) {
    x = points_[k + 1];
    v = velocities_[k + 1];
    return;
  }
  // Cubic Hermite on [k, k+1] with h = 1/n.
  const double h = 1.0 / static_cast<double>(n);
  const double f2 = f * f, f3 = f2 * f;
  const double h00 = 2 * f3 - 3 * f2 + 1, h10 = f3 - 2 * f2 + f, h01 = -2 * f3 + 3 * f2, h11 = f3 - f2;
  const double d00 = 6 * f2 - 6 * f, d10 = 3 * f2 - 4 * f + 1, d01 = -6 * f2 + 6 * f, d11 = 3 * f2 - 2 * f;
  const Point& p0 = points_[k];
  const Point& p1 = points_[k + 1];
  const Point& v0 = velocities_[k];
  const Point& v1 = velocities_[k + 1];
  x = h00 * p0 + (h10 * h) * v0 + h01 * p1 + (h11 * h) * v1;
  v = (d00 / h) * p0 + d10 * v0 + (d01 / h) * p1 + d11 * v1;
}

Curve Curve::reversed() const {
  if (is_gridded()) {
    std::vector<Point> pts(points_.rbegin(), points_.rend());
    std::vector<Point> vel;
    vel.reserve(velocities_.size());
    for (auto it = velocities_.rbegin(); it != velocities_.rend(); ++it) vel.push_back(-*it);
    return gridded(std::move(pts), std::move(vel));
  }
  return analytic(dim_, [f = analytic_](double u, Point& x, Point& v) {
    f(1.0 - u, x, v);
    v *= -1.0;
  });
}

// ---------------------------------------------------------------------------

SampledPath::SampledPath(DomainPtr domain, Curve curve) : domain_(std::move(domain)) {
  if (curve.dimension() != domain_->dimension()) throw DomainError("path dimension does not match its domain");
  check_inside(*domain_, curve);
  pieces_.push_back({std::move(curve), 0.0, 1.0});
}

SampledPath::SampledPath(DomainPtr domain, std::vector<PathPiece> pieces)
    : domain_(std::move(domain)), pieces_(std::move(pieces)) {
  if (pieces_.empty()) throw DomainError("path without pieces");
  if (pieces_.front().t0 != 0.0 || pieces_.back().t1 != 1.0) throw DomainError("path pieces must tile [0,1]");
  for (std::size_t k = 0; k < pieces_.size(); ++k) {
    const PathPiece& p = pieces_[k];
    if (p.curve.dimension() != domain_->dimension()) throw DomainError("path dimension does not match its domain");
    if (!(p.t0 < p.t1)) throw DomainError("degenerate path piece");
    if (k > 0 && pieces_[k - 1].t1 != p.t0) throw DomainError("path pieces must be contiguous");
    check_inside(*domain_, p.curve);
  }
}

SampledPath SampledPath::from_functions(DomainPtr domain, std::function<Point(double)> point,
                                        std::function<Point(double)> velocity) {
  const std::size_t dim = domain->dimension();
  return SampledPath(std::move(domain),
                     Curve::analytic(dim, [point = std::move(point), velocity = std::move(velocity)](
                                              double u, Point& x, Point& v) {
                       x = point(u);
                       v = velocity(u);
                     }));
}

SampledPath SampledPath::from_expressions(DomainPtr domain, std::vector<Expression> coordinates) {
  const std::size_t dim = domain->dimension();
  if (coordinates.size() != dim) throw DomainError("need one expression per coordinate");
  std::vector<Expression> rates;
  for (const auto& e : coordinates) rates.push_back(e.derivative(0));
  return SampledPath(std::move(domain),
                     Curve::analytic(dim, [xs = std::move(coordinates), vs = std::move(rates)](double u, Point& x,
                                                                                              Point& v) {
                       const double t[1] = {u};
                       x = Point(xs.size());
                       v = Point(xs.size());
                       for (std::size_t i = 0; i < xs.size(); ++i) {
                         x[i] = xs[i](t);
                         v[i] = vs[i](t);
                       }
                     }));
}

SampledPath SampledPath::gridded(DomainPtr domain, std::vector<Point> points, std::vector<Point> velocities) {
  const std::size_t n = points.size() - 1;
  if (points.size() >= 3 && points.size() == velocities.size()) {
    // Central differences of the points match the velocities up to
    // (h^2/6) |x'''|; |x'''| is estimated from second differences of v.
    const double h = 1.0 / static_cast<double>(n);
    double third = 0.0, vmax = 0.0, err = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
      third = std::max(third, (velocities[i + 1] - 2.0 * velocities[i] + velocities[i - 1]).max_abs() / (h * h));
      err = std::max(err, ((points[i + 1] - points[i - 1]) * (0.5 / h) - velocities[i]).max_abs());
    }
    for (const Point& v : velocities) vmax = std::max(vmax, v.max_abs());
    const double tol = 4.0 * h * h / 6.0 * third + 1e-9 * (1.0 + vmax);
    if (err > tol)
      throw DomainError("gridded velocities are inconsistent with the points (error " + std::to_string(err) +
                        ", allowed " + std::to_string(tol) + ")");
  }
  return SampledPath(std::move(domain), Curve::gridded(std::move(points), std::move(velocities)));
}

SampledPath SampledPath::constant(DomainPtr domain, const Point& x) {
  const std::size_t dim = domain->dimension();
  return SampledPath(std::move(domain), Curve::analytic(dim, [x, dim](double, Point& p, Point& v) {
                       p = x;
                       v = Point(dim);
                     }));
}

SampledPath SampledPath::segment(DomainPtr domain, const Point& a, const Point& b) {
  const std::size_t dim = domain->dimension();
  const Point d = b - a;
  return SampledPath(std::move(domain), Curve::analytic(dim, [a, b, d](double u, Point& x, Point& v) {
                       // exact endpoints
                       x = u == 1.0 ? b : a + u * d;
                       v = d;
                     }));
}

SampledPath SampledPath::polyline(DomainPtr domain, const std::vector<Point>& points) {
  if (points.size() < 2) throw DomainError("polyline needs at least two points");
  const std::size_t m = points.size() - 1;
  std::vector<PathPiece> pieces;
  for (std::size_t k = 0; k < m; ++k) {
    const Point a = points[k], b = points[k + 1], d = b - a;
    pieces.push_back({Curve::analytic(domain->dimension(),
                                      [a, b, d](double u, Point& x, Point& v) {
                                        x = u == 1.0 ? b : a + u * d;
                                        v = d;
                                      }),
                      k == 0 ? 0.0 : static_cast<double>(k) / static_cast<double>(m),
                      k + 1 == m ? 1.0 : static_cast<double>(k + 1) / static_cast<double>(m)});
  }
  return SampledPath(std::move(domain), std::move(pieces));
}

Point SampledPath::start() const {
  Point x, v;
  pieces_.front().curve.evaluate(0.0, x, v);
  return x;
}

Point SampledPath::end() const {
  Point x, v;
  pieces_.back().curve.evaluate(1.0, x, v);
  return x;
}

void SampledPath::evaluate(double t, Point& x, Point& v) const {
  std::size_t k = 0;
  while (k + 1 < pieces_.size() && t >= pieces_[k].t1) ++k;
  const PathPiece& p = pieces_[k];
  const double len = p.t1 - p.t0;
  double u = (t - p.t0) / len;
  if (t == p.t1) u = 1.0;
  p.curve.evaluate(std::clamp(u, 0.0, 1.0), x, v);
  v *= 1.0 / len;
}

Point SampledPath::point(double t) const {
  Point x, v;
  evaluate(t, x, v);
  return x;
}

// ---------------------------------------------------------------------------

SampledPath compose(const SampledPath& p, const SampledPath& q, double tol) {
  require_same_domain(p.domain(), q.domain(), "compose");
  const double gap = (p.end() - q.start()).max_abs();
  if (!(gap <= tol)) throw EndpointMismatch("compose: p(1) and q(0) differ by " + std::to_string(gap));
  std::vector<PathPiece> pieces;
  for (const PathPiece& a : p.pieces()) pieces.push_back({a.curve, 0.5 * a.t0, 0.5 * a.t1});
  for (const PathPiece& b : q.pieces()) pieces.push_back({b.curve, 0.5 + 0.5 * b.t0, 0.5 + 0.5 * b.t1});
  pieces.back().t1 = 1.0;
  return SampledPath(p.domain_ptr(), std::move(pieces));
}

SampledPath inverse(const SampledPath& p) {
  std::vector<PathPiece> pieces;
  auto src = p.pieces();
  for (auto it = src.rbegin(); it != src.rend(); ++it) pieces.push_back({it->curve.reversed(), 1.0 - it->t1, 1.0 - it->t0});
  return SampledPath(p.domain_ptr(), std::move(pieces));
}

namespace reparametrizations {

Reparametrization identity() {
  return {"identity", [](double t) { return t; }, [](double) { return 1.0; }};
}

Reparametrization square() {
  return {"square", [](double t) { return t * t; }, [](double t) { return 2.0 * t; }};
}

Reparametrization smoothstep() {
  return {"smoothstep", [](double t) { return t * t * (3.0 - 2.0 * t); }, [](double t) { return 6.0 * t * (1.0 - t); }};
}

Reparametrization sine_warp(double a) {
  const double w = 2.0 * std::numbers::pi;
  return {"sine-warp", [a, w](double t) { return t + a * std::sin(w * t) / w; },
          [a, w](double t) { return 1.0 + a * std::cos(w * t); }};
}

}  // namespace reparametrizations

namespace {

double invert_monotone(const std::function<double(double)>& phi, double y) {
  if (y <= 0.0) return 0.0;
  if (y >= 1.0) return 1.0;
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (phi(mid) < y ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

SampledPath reparametrize(const SampledPath& p, const Reparametrization& r) {
  if (std::abs(r.phi(0.0)) > 1e-12 || std::abs(r.phi(1.0) - 1.0) > 1e-12)
    throw InvalidReparametrization(r.name + ": must fix 0 and 1");
  constexpr int kNodes = 1024;
  double prev = r.phi(0.0);
  for (int k = 1; k <= kNodes; ++k) {
    const double t = static_cast<double>(k) / kNodes;
    const double y = r.phi(t);
    if (!(y > prev)) throw InvalidReparametrization(r.name + ": not increasing");
    if (k < kNodes && !(r.dphi(t) > 0.0)) throw InvalidReparametrization(r.name + ": derivative not positive");
    prev = y;
  }

  std::vector<PathPiece> pieces;
  const auto src = p.pieces();
  for (std::size_t k = 0; k < src.size(); ++k) {
    const PathPiece& piece = src[k];
    const double a = piece.t0, b = piece.t1;
    const double alpha = k == 0 ? 0.0 : pieces.back().t1;
    const double beta = k + 1 == src.size() ? 1.0 : invert_monotone(r.phi, b);
    const Curve curve = piece.curve;
    pieces.push_back({Curve::analytic(p.dimension(),
                                      [curve, r, a, b, alpha, beta](double u, Point& x, Point& v) {
                                        const double tau = alpha + u * (beta - alpha);
                                        double s = u == 0.0 ? a : u == 1.0 ? b : r.phi(tau);
                                        const double local = std::clamp((s - a) / (b - a), 0.0, 1.0);
                                        curve.evaluate(local, x, v);
                                        v *= r.dphi(tau) * (beta - alpha) / (b - a);
                                      }),
                      alpha, beta});
  }
  return SampledPath(p.domain_ptr(), std::move(pieces));
}

// ---------------------------------------------------------------------------

namespace fields {

PerturbationField radial_bump(const SampledPath& base, Point center, int k) {
  const double w = k * std::numbers::pi;
  return [base, center, w](double t, Point& value, Point& derivative) {
    Point x, v;
    base.evaluate(t, x, v);
    const Point d = x - center;
    const double r = d.norm();
    const Point n = d * (1.0 / r);
    // d/dt of the unit vector: (v - (n.v) n) / r
    double nv = 0.0;
    for (std::size_t i = 0; i < n.size(); ++i) nv += n[i] * v[i];
    const Point dn = (v - nv * n) * (1.0 / r);
    const double s = std::sin(w * t), ds = w * std::cos(w * t);
    value = s * n;
    derivative = ds * n + s * dn;
  };
}

PerturbationField direction_bump(Point direction, int k) {
  const double w = k * std::numbers::pi;
  return [direction, w](double t, Point& value, Point& derivative) {
    value = std::sin(w * t) * direction;
    derivative = (w * std::cos(w * t)) * direction;
  };
}

}  // namespace fields

PathFamily::PathFamily(SampledPath base, PerturbationField field) : base_(std::move(base)), field_(std::move(field)) {
  Point v0, d0, v1, d1;
  field_(0.0, v0, d0);
  field_(1.0, v1, d1);
  if (v0.max_abs() > 1e-12 || v1.max_abs() > 1e-12)
    throw DomainError("perturbation field must vanish at both endpoints");
}

SampledPath perturb(const PathFamily& family, double amplitude) {
  if (amplitude == 0.0) return family.base();
  const auto src = family.base().pieces();
  std::vector<PathPiece> pieces;
  for (std::size_t k = 0; k < src.size(); ++k) {
    const PathPiece piece = src[k];
    const bool first = k == 0, last = k + 1 == src.size();
    pieces.push_back({Curve::analytic(family.base().dimension(),
                                      [piece, field = family.field(), amplitude, first, last](double u, Point& x,
                                                                                              Point& v) {
                                        piece.curve.evaluate(u, x, v);
                                        const double len = piece.t1 - piece.t0;
                                        Point f, df;
                                        field(piece.t0 + u * len, f, df);
                                        // The field vanishes at the ends but its velocity does not.
                                        if (!((first && u == 0.0) || (last && u == 1.0))) x += amplitude * f;
                                        v += (amplitude * len) * df;
                                      }),
                      piece.t0, piece.t1});
  }
  try {
    return SampledPath(family.base().domain_ptr(), std::move(pieces));
  } catch (const DomainError& e) {
    throw DomainError("perturbation with amplitude " + std::to_string(amplitude) + " exits the domain: " + e.what());
  }
}

}  // namespace itint
