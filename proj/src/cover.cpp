#include "itint/cover.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "itint/errors.hpp"

namespace itint {

namespace {

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw ArithmeticError("group ring coefficient overflow");
  return r;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw ArithmeticError("group ring coefficient overflow");
  return r;
}

void require_rank(std::size_t a, std::size_t b) {
  if (a != b) throw DomainError("group elements of different rank");
}

}  // namespace

GroupElement group_identity(std::size_t rank) { return GroupElement(rank, 0); }

GroupElement generator(std::size_t rank, std::size_t i, std::int64_t power) {
  if (i >= rank) throw DomainError("generator index out of range");
  GroupElement g(rank, 0);
  g[i] = power;
  return g;
}

GroupElement group_multiply(const GroupElement& a, const GroupElement& b) {
  require_rank(a.size(), b.size());
  GroupElement g(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) g[i] = checked_add(a[i], b[i]);
  return g;
}

GroupElement group_inverse(const GroupElement& g) {
  GroupElement out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = checked_mul(g[i], -1);
  return out;
}

bool is_identity(const GroupElement& g) {
  return std::all_of(g.begin(), g.end(), [](std::int64_t e) { return e == 0; });
}

std::string format_group_element(const GroupElement& g) {
  std::string out;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g[i] == 0) continue;
    if (!out.empty()) out += "*";
    out += "g" + std::to_string(i + 1);
    if (g[i] != 1) out += "^" + std::to_string(g[i]);
  }
  return out.empty() ? "1" : out;
}

// ---------------------------------------------------------------------------

GroupRingElement GroupRingElement::one(std::size_t rank) { return of(group_identity(rank)); }

GroupRingElement GroupRingElement::of(const GroupElement& g, std::int64_t coefficient) {
  GroupRingElement e(g.size());
  e.add_term(g, coefficient);
  return e;
}

std::int64_t GroupRingElement::coefficient(const GroupElement& g) const {
  auto it = terms_.find(g);
  return it == terms_.end() ? 0 : it->second;
}

void GroupRingElement::add_term(const GroupElement& g, std::int64_t c) {
  require_rank(g.size(), rank_);
  if (c == 0) return;
  augmentation_ = checked_add(augmentation_, c);
  auto it = terms_.find(g);
  if (it == terms_.end()) {
    terms_.emplace(g, c);
    return;
  }
  it->second = checked_add(it->second, c);
  if (it->second == 0) terms_.erase(it);
}

GroupRingElement operator+(const GroupRingElement& a, const GroupRingElement& b) {
  require_rank(a.rank_, b.rank_);
  GroupRingElement out = a;
  for (const auto& [g, c] : b.terms_) out.add_term(g, c);
  return out;
}

GroupRingElement operator-(const GroupRingElement& a, const GroupRingElement& b) {
  require_rank(a.rank_, b.rank_);
  GroupRingElement out = a;
  for (const auto& [g, c] : b.terms_) out.add_term(g, checked_mul(c, -1));
  return out;
}

GroupRingElement operator*(const GroupRingElement& a, const GroupRingElement& b) {
  require_rank(a.rank_, b.rank_);
  GroupRingElement out(a.rank_);
  for (const auto& [g, c] : a.terms_)
    for (const auto& [h, d] : b.terms_) out.add_term(group_multiply(g, h), checked_mul(c, d));
  return out;
}

void GroupRingElement::check_invariants() const {
  std::int64_t sum = 0;
  for (const auto& [g, c] : terms_) {
    if (c == 0) throw std::logic_error("zero coefficient stored in group ring element");
    if (g.size() != rank_) throw std::logic_error("group element of wrong rank stored");
    sum = checked_add(sum, c);
  }
  if (sum != augmentation_) throw std::logic_error("stale augmentation in group ring element");
}

std::string GroupRingElement::str() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (const auto& [g, c] : terms_) {
    const std::int64_t m = c < 0 ? -c : c;
    if (out.empty())
      out += c < 0 ? "-" : "";
    else
      out += c < 0 ? " - " : " + ";
    const std::string ge = format_group_element(g);
    if (ge == "1")
      out += std::to_string(m);
    else
      out += (m == 1 ? "" : std::to_string(m) + "*") + ge;
  }
  return out;
}

GroupRingElement eta(const std::vector<GroupElement>& gammas, std::size_t rank) {
  GroupRingElement out = GroupRingElement::one(rank);
  for (const auto& g : gammas) out = out * (GroupRingElement::of(g) - GroupRingElement::one(rank));
  return out;
}

// ---------------------------------------------------------------------------

CoverSpace::CoverSpace(CoverSpec spec) : spec_(std::move(spec)) {
  const std::size_t n = spec_.cover->dimension();
  if (spec_.axes.size() != spec_.periods.size() || spec_.axes.empty())
    throw DomainError(spec_.name + ": need one period per generator axis");
  for (std::size_t i = 0; i < spec_.axes.size(); ++i) {
    if (spec_.axes[i] >= n) throw DomainError(spec_.name + ": generator axis out of range");
    if (!(spec_.periods[i] > 0.0)) throw DomainError(spec_.name + ": periods must be positive");
    for (std::size_t j = 0; j < i; ++j)
      if (spec_.axes[j] == spec_.axes[i]) throw DomainError(spec_.name + ": generator axes must be distinct");
  }
  if (!(spec_.bump_width > 0.0)) throw DomainError(spec_.name + ": bump width must be positive");
  if (!spec_.cover->contains(spec_.lift)) throw DomainError(spec_.name + ": lift outside the cover domain");
  if (!spec_.base->contains(project(spec_.lift))) throw DomainError(spec_.name + ": base point outside the base");

  const auto pts = samples(512, 0);
  for (std::size_t i = 0; i < rank(); ++i) {
    const GroupElement g = generator(rank(), i);
    for (const auto& x : pts) {
      const double d = base_distance(project(act(g, x)), project(x));
      if (!(d <= 1e-9 * (1.0 + x.max_abs())))
        throw DomainError(spec_.name + ": projection is not invariant under generator " + std::to_string(i + 1));
    }
  }
  for (const auto& x : pts) {
    const double s = partition_sum(x);
    if (!(std::abs(s - 1.0) <= 1e-10))
      throw PartitionError(spec_.name + ": partition of unity sums to " + std::to_string(s));
  }
}

Point CoverSpace::act(const GroupElement& g, const Point& x) const {
  require_rank(g.size(), rank());
  Point y = x;
  for (std::size_t i = 0; i < rank(); ++i) y[spec_.axes[i]] += static_cast<double>(g[i]) * spec_.periods[i];
  return y;
}

double CoverSpace::base_distance(const Point& a, const Point& b) const {
  return spec_.base_distance ? spec_.base_distance(a, b) : distance(a, b);
}

// C^2 bump (1 - z^2)^3 on |z| < 1, scaled to half-width (1/2 + width) periods.
double CoverSpace::bump(std::size_t i, double t) const {
  const double hw = (0.5 + spec_.bump_width) * spec_.periods[i];
  const double z = (t - spec_.lift[spec_.axes[i]]) / hw;
  if (std::abs(z) >= 1.0) return 0.0;
  const double q = 1.0 - z * z;
  return q * q * q;
}

double CoverSpace::bump_orbit_sum(std::size_t i, double t) const {
  const double T = spec_.periods[i];
  const double hw = (0.5 + spec_.bump_width) * T;
  const double off = t - spec_.lift[spec_.axes[i]];
  const auto lo = static_cast<std::int64_t>(std::floor((off - hw) / T));
  const auto hi = static_cast<std::int64_t>(std::ceil((off + hw) / T));
  double s = 0.0;
  for (std::int64_t k = lo; k <= hi; ++k) s += bump(i, t - static_cast<double>(k) * T);
  return s;
}

double CoverSpace::partition(const Point& x) const {
  double u = 1.0;
  for (std::size_t i = 0; i < rank() && u != 0.0; ++i) {
    const double t = x[spec_.axes[i]];
    const double b = bump(i, t);
    u *= b == 0.0 ? 0.0 : b / bump_orbit_sum(i, t);
  }
  return u;
}

std::vector<GroupElement> CoverSpace::partition_support(const Point& x) const {
  std::vector<std::vector<std::int64_t>> per_axis(rank());
  for (std::size_t i = 0; i < rank(); ++i) {
    const double T = spec_.periods[i];
    const double hw = (0.5 + spec_.bump_width) * T;
    const double t = x[spec_.axes[i]];
    const double off = t - spec_.lift[spec_.axes[i]];
    const auto lo = static_cast<std::int64_t>(std::floor((off - hw) / T));
    const auto hi = static_cast<std::int64_t>(std::ceil((off + hw) / T));
    for (std::int64_t k = lo; k <= hi; ++k)
      if (bump(i, t - static_cast<double>(k) * T) != 0.0) per_axis[i].push_back(k);
  }
  std::vector<GroupElement> out{GroupElement{}};
  for (std::size_t i = 0; i < rank(); ++i) {
    std::vector<GroupElement> next;
    for (const auto& g : out)
      for (std::int64_t k : per_axis[i]) {
        GroupElement h = g;
        h.push_back(k);
        next.push_back(std::move(h));
      }
    out = std::move(next);
  }
  return out;
}

double CoverSpace::partition_sum(const Point& x) const {
  double s = 0.0;
  for (const auto& g : partition_support(x)) s += partition(act(group_inverse(g), x));
  return s;
}

SampledPath CoverSpace::push_forward(const SampledPath& p) const {
  require_same_domain(p.domain(), *spec_.cover, "push_forward");
  const std::size_t n = spec_.cover->dimension();
  const std::size_t m = spec_.base->dimension();
  std::vector<PathPiece> pieces;
  for (const auto& piece : p.pieces()) {
    Curve c = Curve::analytic(m, [curve = piece.curve, proj = spec_.projection, jac = spec_.projection_jacobian, n,
                                  m](double u, Point& x, Point& v) {
      Point y, w;
      curve.evaluate(u, y, w);
      x = proj(y);
      std::array<double, kMaxDimension * kMaxDimension> J{};
      jac(y, std::span<double>(J.data(), m * n));
      v = Point(m);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) v[i] += J[i * n + j] * w[j];
    });
    pieces.push_back({std::move(c), piece.t0, piece.t1});
  }
  return SampledPath(spec_.base, std::move(pieces));
}

std::vector<Point> CoverSpace::samples(std::size_t count, std::uint64_t seed) const {
  return spec_.cover->samples(count, seed);
}

namespace covers {

CoverSpace strip_annulus(double r_inner, double r_outer, double r0, double bump_width) {
  CoverSpec spec;
  spec.name = "strip-cover";
  spec.cover = domains::strip(r_inner, r_outer, 3.0 * std::numbers::pi);
  spec.base = domains::annulus(r_inner, r_outer);
  spec.projection = [](const Point& x) { return Point{x[1] * std::cos(x[0]), x[1] * std::sin(x[0])}; };
  spec.projection_jacobian = [](const Point& x, std::span<double> J) {
    const double c = std::cos(x[0]), s = std::sin(x[0]);
    J[0] = -x[1] * s;
    J[1] = c;
    J[2] = x[1] * c;
    J[3] = s;
  };
  spec.axes = {0};
  spec.periods = {2.0 * std::numbers::pi};
  spec.lift = Point{0.0, r0};
  spec.bump_width = bump_width;
  return CoverSpace(std::move(spec));
}

CoverSpace plane_torus(double period, double bump_width) {
  if (!(period > 0.0)) throw DomainError("torus period must be positive");
  CoverSpec spec;
  spec.name = "torus-cover";
  spec.cover = domains::plane(2, 3.0 * period, "plane");
  spec.base = std::make_shared<ChartDomain>(
      "torus-chart", 2, [](const Point&) { return true; }, Point{0.0, 0.0}, Point{period, period},
      Point{0.5 * period, 0.5 * period});
  spec.projection = [](const Point& x) { return x; };
  spec.projection_jacobian = [](const Point&, std::span<double> J) {
    J[0] = 1.0;
    J[1] = 0.0;
    J[2] = 0.0;
    J[3] = 1.0;
  };
  spec.axes = {0, 1};
  spec.periods = {period, period};
  spec.lift = Point{0.0, 0.0};
  spec.bump_width = bump_width;
  spec.base_distance = [period](const Point& a, const Point& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      double d = a[i] - b[i];
      d -= period * std::round(d / period);
      s += d * d;
    }
    return std::sqrt(s);
  };
  return CoverSpace(std::move(spec));
}

}  // namespace covers

// ---------------------------------------------------------------------------

SampledPath group_path(const GroupElement& g, const Point& x, const CoverSpace& cover) {
  const auto& dom = cover.cover_domain();
  if (!dom->contains(x)) throw DomainError("group_path start outside " + dom->name());
  if (is_identity(g)) return SampledPath::constant(dom, x);
  const Point y = cover.act(g, x);
  if (dom->segment_inside(x, y)) return SampledPath::segment(dom, x, y);

  std::vector<Point> pts{x};
  Point cur = x;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const GroupElement step = generator(g.size(), i, g[i] > 0 ? 1 : -1);
    for (std::int64_t k = 0; k < (g[i] < 0 ? -g[i] : g[i]); ++k) {
      const Point next = cover.act(step, cur);
      if (!dom->segment_inside(cur, next))
        throw UnreachableError("no path from x to " + format_group_element(g) + " x inside " + dom->name());
      pts.push_back(next);
      cur = next;
    }
  }
  return SampledPath::polyline(dom, pts);
}

std::vector<FormalPath> group_path(const GroupRingElement& eta, const Point& x, const CoverSpace& cover) {
  std::vector<FormalPath> out;
  for (const auto& [g, c] : eta.terms()) out.push_back({c, group_path(g, x, cover)});
  return out;
}

SampledPath base_loop(const GroupElement& g, const CoverSpace& cover) {
  return cover.push_forward(group_path(g, cover.lift(), cover));
}

namespace {

using Square = std::vector<Complex>;

// Product of upper-triangular (r+1)x(r+1) matrices.
Square chain(const Square& A, const Square& B, std::size_t r) {
  const std::size_t m = r + 1;
  Square C(m * m, Complex{});
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = a; b < m; ++b) {
      Complex s{};
      for (std::size_t k = a; k <= b; ++k) s += A[a * m + k] * B[k * m + b];
      C[a * m + b] = s;
    }
  return C;
}

}  // namespace

EtaVanishingReport check_eta_vanishing(const std::vector<GroupElement>& gammas, const Word& w,
                                       const Binding& base_binding, const CoverSpace& cover,
                                       const QuadratureOptions& opts) {
  const std::size_t s = gammas.size();
  const std::size_t r = w.size();
  if (r > s)
    throw PreconditionError("eta vanishing needs word length <= number of factors (r=" + std::to_string(r) +
                            ", s=" + std::to_string(s) + ")");
  if (s > 20) throw PreconditionError("too many eta factors");
  const std::size_t m = r + 1;

  std::vector<Square> mats;
  double err = 0.0, mag = 1.0;
  for (const auto& g : gammas) {
    const ChenMatrix cm = word_matrix(base_loop(g, cover), w, base_binding, opts);
    mats.push_back(cm.values);
    for (std::size_t k = 0; k < cm.errors.size(); ++k) {
      err = std::max(err, cm.errors[k]);
      mag = std::max(mag, std::abs(cm.values[k]));
    }
  }

  Square identity(m * m, Complex{});
  for (std::size_t a = 0; a < m; ++a) identity[a * m + a] = 1.0;

  EtaVanishingReport rep;
  rep.r = r;
  rep.s = s;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << s); ++mask) {
    Square M = identity;
    std::size_t bits = 0;
    for (std::size_t i = 0; i < s; ++i)
      if ((mask >> i) & 1U) {
        M = chain(M, mats[i], r);
        ++bits;
      }
    const double sign = ((s - bits) % 2 == 0) ? 1.0 : -1.0;
    rep.value += sign * M[r];
  }
  rep.error_estimate = static_cast<double>(std::uint64_t{1} << s) * static_cast<double>(s) * err *
                       std::pow(mag, static_cast<double>(r));

  if (r == s) {
    rep.expected = 1.0;
    for (std::size_t i = 0; i < s; ++i) {
      rep.loop_integrals.push_back(mats[i][i * m + i + 1]);
      rep.expected *= rep.loop_integrals.back();
    }
  }
  rep.residual = std::abs(rep.value - rep.expected);
  return rep;
}

Complex apply_group_ring(const GroupRingElement& eta, const CoverFunction& f, const Point& x,
                         const CoverSpace& cover) {
  Complex s{};
  for (const auto& [g, c] : eta.terms()) s += static_cast<double>(c) * f(cover.act(g, x));
  return s;
}

// ---------------------------------------------------------------------------

Cocycle::Cocycle(const CoverSpace& cover, std::vector<CoverFunction> generator_values)
    : cover_(&cover), gens_(std::move(generator_values)) {
  if (gens_.size() != cover.rank()) throw DomainError("cocycle needs one function per generator");
}

Cocycle Cocycle::constant(const CoverSpace& cover, std::vector<Complex> values) {
  std::vector<CoverFunction> fs;
  for (Complex c : values) fs.push_back([c](const Point&) { return c; });
  return Cocycle(cover, std::move(fs));
}

Cocycle Cocycle::coboundary_of(const CoverSpace& cover, CoverFunction h) {
  std::vector<CoverFunction> fs;
  for (std::size_t i = 0; i < cover.rank(); ++i) {
    const GroupElement inv = generator(cover.rank(), i, -1);
    fs.push_back([h, inv, c = &cover](const Point& x) { return h(c->act(inv, x)) - h(x); });
  }
  return Cocycle(cover, std::move(fs));
}

Complex Cocycle::operator()(const GroupElement& g, const Point& x) const {
  require_rank(g.size(), gens_.size());
  Complex acc{};
  Point y = x;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const GroupElement up = generator(g.size(), i, 1);
    const GroupElement down = generator(g.size(), i, -1);
    for (std::int64_t k = 0; k < g[i]; ++k) {
      acc += gens_[i](y);
      y = cover_->act(down, y);
    }
    for (std::int64_t k = 0; k < -g[i]; ++k) {
      y = cover_->act(up, y);
      acc -= gens_[i](y);
    }
  }
  return acc;
}

double Cocycle::relation_residual(std::span<const Point> samples) const {
  const std::size_t k = gens_.size();
  std::vector<GroupElement> set;
  for (std::size_t i = 0; i < k; ++i) {
    set.push_back(generator(k, i, 1));
    set.push_back(generator(k, i, -1));
  }
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i; j < k; ++j) {
      set.push_back(group_multiply(generator(k, i, 1), generator(k, j, 1)));
      if (i != j) set.push_back(group_multiply(generator(k, i, 1), generator(k, j, -1)));
    }
  double worst = 0.0;
  for (const auto& g : set) {
    const GroupElement ginv = group_inverse(g);
    for (const auto& t : set) {
      const GroupElement gt = group_multiply(g, t);
      for (const auto& x : samples) {
        const double d = std::abs((*this)(gt, x) - (*this)(g, x) - (*this)(t, cover_->act(ginv, x)));
        worst = std::max(worst, d);
      }
    }
  }
  return worst;
}

CoverFunction solve_coboundary(const Cocycle& alpha, std::span<const Point> samples, double cocycle_tol) {
  const CoverSpace& cover = alpha.cover();
  const double rel = alpha.relation_residual(samples);
  if (!(rel <= cocycle_tol)) throw CocycleError("cocycle relation violated: residual " + std::to_string(rel));
  for (const auto& x : samples) {
    const double s = cover.partition_sum(x);
    if (!(std::abs(s - 1.0) <= 1e-10)) throw PartitionError("partition of unity sums to " + std::to_string(s));
  }
  return [alpha](const Point& x) {
    const CoverSpace& c = alpha.cover();
    Complex f{};
    for (const auto& t : c.partition_support(x)) f -= alpha(t, x) * c.partition(c.act(group_inverse(t), x));
    return f;
  };
}

double coboundary_residual(const Cocycle& alpha, const CoverFunction& f, const GroupElement& g,
                           std::span<const Point> samples) {
  const GroupElement ginv = group_inverse(g);
  double worst = 0.0;
  for (const auto& x : samples)
    worst = std::max(worst, std::abs(f(alpha.cover().act(ginv, x)) - f(x) - alpha(g, x)));
  return worst;
}

}  // namespace itint
