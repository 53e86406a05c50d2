#include "itint/geometry.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "itint/errors.hpp"

namespace itint {

namespace {

constexpr std::uint64_t kPrimes[] = {2, 3, 5, 7, 11, 13};

double radical_inverse(std::uint64_t k, std::uint64_t base) {
  double inv = 1.0 / static_cast<double>(base);
  double f = inv;
  double r = 0.0;
  while (k > 0) {
    r += f * static_cast<double>(k % base);
    k /= base;
    f *= inv;
  }
  return r;
}

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::string fmt_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

ChartDomain::ChartDomain(std::string name, std::size_t dim, Membership contains, Point box_lo, Point box_hi,
                         std::optional<Point> star_center)
    : name_(std::move(name)),
      dim_(dim),
      contains_(std::move(contains)),
      lo_(box_lo),
      hi_(box_hi),
      star_center_(std::move(star_center)) {
  if (dim_ == 0 || dim_ > kMaxDimension) throw DomainError("unsupported chart dimension");
  if (lo_.size() != dim_ || hi_.size() != dim_) throw DomainError("bounding box dimension mismatch");
  if (star_center_) {
    if (!this->contains(*star_center_)) throw DomainError(name_ + ": star center outside the domain");
    for (const Point& x : samples(512, 0))
      if (!segment_inside(*star_center_, x))
        throw DomainError(name_ + ": domain is not star-shaped about the given center");
  }
}

std::vector<Point> ChartDomain::samples(std::size_t count, std::uint64_t seed, double margin) const {
  std::uint64_t state = seed * 0x2545f4914f6cdd1dULL + 0x1234567ULL;
  Point shift(dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    shift[i] = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;

  std::vector<Point> out;
  out.reserve(count);
  const std::uint64_t max_attempts = 1000 * static_cast<std::uint64_t>(count) + 1000;
  for (std::uint64_t k = 1; out.size() < count; ++k) {
    if (k > max_attempts) throw DomainError(name_ + ": sampling box barely intersects the domain");
    Point x(dim_);
    for (std::size_t i = 0; i < dim_; ++i) {
      double u = radical_inverse(k, kPrimes[i]) + shift[i];
      u -= std::floor(u);
      x[i] = lo_[i] + u * (hi_[i] - lo_[i]);
    }
    if (!contains(x)) continue;
    bool interior = true;
    for (std::size_t i = 0; i < dim_ && interior; ++i) {
      Point y = x;
      y[i] += margin;
      Point z = x;
      z[i] -= margin;
      interior = contains(y) && contains(z);
    }
    if (interior) out.push_back(x);
  }
  return out;
}

bool ChartDomain::segment_inside(const Point& a, const Point& b, int checks) const {
  for (int k = 0; k < checks; ++k) {
    const double s = static_cast<double>(k) / static_cast<double>(checks - 1);
    if (!contains(a + s * (b - a))) return false;
  }
  return true;
}

void require_same_domain(const ChartDomain& a, const ChartDomain& b, const char* what) {
  if (!(a == b)) throw DomainError(std::string(what) + ": domain mismatch (" + a.name() + " vs " + b.name() + ")");
}

namespace domains {

DomainPtr annulus(double r_inner, double r_outer) {
  if (!(0.0 <= r_inner && r_inner < r_outer)) throw DomainError("annulus radii must satisfy 0 <= r1 < r2");
  return std::make_shared<ChartDomain>(
      "annulus[" + fmt_num(r_inner) + "," + fmt_num(r_outer) + "]", 2,
      [=](const Point& x) {
        const double r = std::hypot(x[0], x[1]);
        return r > r_inner && r < r_outer;
      },
      Point{-r_outer, -r_outer}, Point{r_outer, r_outer});
}

DomainPtr punctured_plane(double extent) {
  return std::make_shared<ChartDomain>(
      "punctured-plane", 2, [](const Point& x) { return x[0] != 0.0 || x[1] != 0.0; }, Point{-extent, -extent},
      Point{extent, extent});
}

DomainPtr twice_punctured_plane(double extent) {
  return std::make_shared<ChartDomain>(
      "twice-punctured-plane", 2,
      [](const Point& x) { return !((x[0] == -1.0 || x[0] == 1.0) && x[1] == 0.0); }, Point{-extent, -extent},
      Point{extent, extent});
}

DomainPtr disk(double radius, Point center) {
  if (!(radius > 0.0)) throw DomainError("disk radius must be positive");
  return std::make_shared<ChartDomain>(
      "disk[" + fmt_num(radius) + ";" + fmt_num(center[0]) + "," + fmt_num(center[1]) + "]", 2,
      [=](const Point& x) { return distance(x, center) < radius; }, center - Point{radius, radius},
      center + Point{radius, radius}, center);
}

DomainPtr rectangle(Point lo, Point hi) {
  if (lo.size() != hi.size()) throw DomainError("rectangle corners of different dimension");
  std::string name = "rectangle[";
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (!(lo[i] < hi[i])) throw DomainError("rectangle needs lo < hi");
    name += (i ? ";" : "") + fmt_num(lo[i]) + ":" + fmt_num(hi[i]);
  }
  name += "]";
  Point center = 0.5 * (lo + hi);
  return std::make_shared<ChartDomain>(
      name, lo.size(),
      [=](const Point& x) {
        for (std::size_t i = 0; i < lo.size(); ++i)
          if (!(x[i] > lo[i] && x[i] < hi[i])) return false;
        return true;
      },
      lo, hi, center);
}

DomainPtr plane(std::size_t dim, double extent, std::string name) {
  Point lo(dim), hi(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    lo[i] = -extent;
    hi[i] = extent;
  }
  if (name.empty()) name = "plane" + std::to_string(dim);
  return std::make_shared<ChartDomain>(std::move(name), dim, [](const Point&) { return true; }, lo, hi, Point(dim));
}

DomainPtr strip(double r_inner, double r_outer, double theta_extent) {
  if (!(0.0 <= r_inner && r_inner < r_outer)) throw DomainError("strip radii must satisfy 0 <= r1 < r2");
  return std::make_shared<ChartDomain>(
      "strip[" + fmt_num(r_inner) + "," + fmt_num(r_outer) + "]", 2,
      [=](const Point& x) { return x[1] > r_inner && x[1] < r_outer; }, Point{-theta_extent, r_inner},
      Point{theta_extent, r_outer});
}

}  // namespace domains

// ---------------------------------------------------------------------------

OneForm::OneForm(DomainPtr domain, Coefficients coefficients, Partials partials)
    : domain_(std::move(domain)), coefficients_(std::move(coefficients)), partials_(std::move(partials)) {
  if (!domain_) throw DomainError("form without a domain");
}

OneForm OneForm::zero(DomainPtr domain) {
  return OneForm(
      std::move(domain), [](const Point&, std::span<Complex> out) { std::fill(out.begin(), out.end(), Complex{}); },
      [](const Point&, std::span<Complex> out) { std::fill(out.begin(), out.end(), Complex{}); });
}

OneForm OneForm::coordinate(DomainPtr domain, std::size_t i) {
  if (i >= domain->dimension()) throw DomainError("coordinate index out of range");
  return OneForm(
      std::move(domain),
      [i](const Point&, std::span<Complex> out) {
        std::fill(out.begin(), out.end(), Complex{});
        out[i] = 1.0;
      },
      [](const Point&, std::span<Complex> out) { std::fill(out.begin(), out.end(), Complex{}); });
}

OneForm OneForm::from_expressions(DomainPtr domain, std::vector<Expression> coefficients) {
  const std::size_t n = domain->dimension();
  if (coefficients.size() != n) throw DomainError("need one coefficient expression per coordinate");
  std::vector<Expression> partials;
  partials.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) partials.push_back(coefficients[i].derivative(static_cast<int>(j)));
  return OneForm(
      std::move(domain),
      [cs = std::move(coefficients)](const Point& x, std::span<Complex> out) {
        for (std::size_t i = 0; i < cs.size(); ++i) out[i] = cs[i](x.coords());
      },
      [ps = std::move(partials)](const Point& x, std::span<Complex> out) {
        for (std::size_t k = 0; k < ps.size(); ++k) out[k] = ps[k](x.coords());
      });
}

OneForm OneForm::differential(DomainPtr domain, const Expression& f) {
  std::vector<Expression> grad;
  for (std::size_t j = 0; j < domain->dimension(); ++j) grad.push_back(f.derivative(static_cast<int>(j)));
  return from_expressions(std::move(domain), std::move(grad));
}

Complex OneForm::apply(const Point& x, const Point& v) const {
  std::array<Complex, kMaxDimension> a{};
  const std::size_t n = dimension();
  coefficients_(x, std::span<Complex>(a.data(), n));
  Complex s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * v[i];
  return s;
}

void OneForm::partials(const Point& x, std::span<Complex> out) const {
  if (!partials_) throw DomainError("form carries no analytic partials");
  partials_(x, out);
}

OneForm OneForm::scaled(Complex s) const {
  Partials p;
  if (partials_)
    p = [f = partials_, s](const Point& x, std::span<Complex> out) {
      f(x, out);
      for (auto& v : out) v *= s;
    };
  return OneForm(
      domain_,
      [f = coefficients_, s](const Point& x, std::span<Complex> out) {
        f(x, out);
        for (auto& v : out) v *= s;
      },
      std::move(p));
}

OneForm operator+(const OneForm& a, const OneForm& b) {
  require_same_domain(a.domain(), b.domain(), "form sum");
  const std::size_t n = a.dimension();
  OneForm::Partials p;
  if (a.partials_ && b.partials_)
    p = [fa = a.partials_, fb = b.partials_, n](const Point& x, std::span<Complex> out) {
      std::array<Complex, kMaxDimension * kMaxDimension> tmp{};
      fa(x, out);
      fb(x, std::span<Complex>(tmp.data(), n * n));
      for (std::size_t k = 0; k < n * n; ++k) out[k] += tmp[k];
    };
  return OneForm(
      a.domain_,
      [fa = a.coefficients_, fb = b.coefficients_, n](const Point& x, std::span<Complex> out) {
        std::array<Complex, kMaxDimension> tmp{};
        fa(x, out);
        fb(x, std::span<Complex>(tmp.data(), n));
        for (std::size_t k = 0; k < n; ++k) out[k] += tmp[k];
      },
      std::move(p));
}

// ---------------------------------------------------------------------------

TwoForm::TwoForm(DomainPtr domain, Components components)
    : domain_(std::move(domain)), components_(std::move(components)) {
  if (!domain_) throw DomainError("form without a domain");
}

TwoForm TwoForm::zero(DomainPtr domain) {
  return TwoForm(std::move(domain),
                 [](const Point&, std::span<Complex> out) { std::fill(out.begin(), out.end(), Complex{}); });
}

TwoForm TwoForm::from_expressions(DomainPtr domain, std::vector<Expression> components) {
  if (components.size() != component_count(domain->dimension()))
    throw DomainError("wrong number of 2-form components");
  return TwoForm(std::move(domain), [cs = std::move(components)](const Point& x, std::span<Complex> out) {
    for (std::size_t k = 0; k < cs.size(); ++k) out[k] = cs[k](x.coords());
  });
}

std::size_t TwoForm::index(std::size_t i, std::size_t j, std::size_t n) noexcept {
  // Row i (i < j) starts after sum_{k<i} (n-1-k) entries.
  return i * (2 * n - i - 1) / 2 + (j - i - 1);
}

Complex TwoForm::component(const Point& x, std::size_t i, std::size_t j) const {
  if (i == j) return 0.0;
  std::array<Complex, kMaxDimension * kMaxDimension> b{};
  const std::size_t n = dimension();
  components_(x, std::span<Complex>(b.data(), component_count(n)));
  return i < j ? b[index(i, j, n)] : -b[index(j, i, n)];
}

Complex TwoForm::apply(const Point& x, const Point& u, const Point& v) const {
  std::array<Complex, kMaxDimension * kMaxDimension> b{};
  const std::size_t n = dimension();
  components_(x, std::span<Complex>(b.data(), component_count(n)));
  Complex s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) s += b[index(i, j, n)] * (u[i] * v[j] - u[j] * v[i]);
  return s;
}

double TwoForm::norm_at(const Point& x) const {
  std::array<Complex, kMaxDimension * kMaxDimension> b{};
  const std::size_t m = component_count(dimension());
  components_(x, std::span<Complex>(b.data(), m));
  double r = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double a = std::abs(b[k]);
    if (std::isnan(a)) return a;
    r = std::max(r, a);
  }
  return r;
}

TwoForm TwoForm::scaled(Complex s) const {
  return TwoForm(domain_, [f = components_, s](const Point& x, std::span<Complex> out) {
    f(x, out);
    for (auto& v : out) v *= s;
  });
}

TwoForm operator+(const TwoForm& a, const TwoForm& b) {
  require_same_domain(a.domain(), b.domain(), "2-form sum");
  const std::size_t m = TwoForm::component_count(a.dimension());
  return TwoForm(a.domain_, [fa = a.components_, fb = b.components_, m](const Point& x, std::span<Complex> out) {
    std::array<Complex, kMaxDimension * kMaxDimension> tmp{};
    fa(x, out);
    fb(x, std::span<Complex>(tmp.data(), m));
    for (std::size_t k = 0; k < m; ++k) out[k] += tmp[k];
  });
}

// ---------------------------------------------------------------------------

TwoForm wedge(const OneForm& alpha, const OneForm& beta) {
  require_same_domain(alpha.domain(), beta.domain(), "wedge");
  const std::size_t n = alpha.dimension();
  return TwoForm(alpha.domain_ptr(), [alpha, beta, n](const Point& x, std::span<Complex> out) {
    std::array<Complex, kMaxDimension> a{}, b{};
    alpha.coefficients(x, std::span<Complex>(a.data(), n));
    beta.coefficients(x, std::span<Complex>(b.data(), n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) out[TwoForm::index(i, j, n)] = a[i] * b[j] - a[j] * b[i];
  });
}

TwoForm exterior_derivative(const OneForm& omega, double h) {
  const std::size_t n = omega.dimension();
  if (omega.has_partials()) {
    return TwoForm(omega.domain_ptr(), [omega, n](const Point& x, std::span<Complex> out) {
      std::array<Complex, kMaxDimension * kMaxDimension> p{};
      omega.partials(x, std::span<Complex>(p.data(), n * n));
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) out[TwoForm::index(i, j, n)] = p[j * n + i] - p[i * n + j];
    });
  }
  if (!(h > 0.0)) throw DomainError("finite-difference step must be positive");
  return TwoForm(omega.domain_ptr(), [omega, n, h](const Point& x, std::span<Complex> out) {
    // grad[j][i] = d a_i / d x_j
    std::array<std::array<Complex, kMaxDimension>, kMaxDimension> grad{};
    for (std::size_t j = 0; j < n; ++j) {
      Point xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      if (!omega.domain().contains(xp) || !omega.domain().contains(xm))
        throw DomainError("finite difference stencil leaves " + omega.domain().name());
      std::array<Complex, kMaxDimension> ap{}, am{};
      omega.coefficients(xp, std::span<Complex>(ap.data(), n));
      omega.coefficients(xm, std::span<Complex>(am.data(), n));
      for (std::size_t i = 0; i < n; ++i) grad[j][i] = (ap[i] - am[i]) / (2.0 * h);
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) out[TwoForm::index(i, j, n)] = grad[i][j] - grad[j][i];
  });
}

double max_norm(const TwoForm& beta, std::span<const Point> samples) {
  double r = 0.0;
  for (const Point& x : samples) {
    const double v = beta.norm_at(x);
    if (!std::isfinite(v)) return std::numeric_limits<double>::infinity();
    r = std::max(r, v);
  }
  return r;
}

ClosednessReport is_closed(const OneForm& omega, double tol, std::span<const Point> samples, double h) {
  const double residual = max_norm(exterior_derivative(omega, h), samples);
  return {residual <= tol, residual};
}

// ---------------------------------------------------------------------------

OneForm pull_back(const OneForm& omega, const Diffeomorphism& F) {
  require_same_domain(omega.domain(), *F.target, "pull_back");
  const std::size_t n = F.source->dimension();
  if (F.target->dimension() != n) throw DomainError("pull_back needs equal dimensions");
  return OneForm(F.source, [omega, F, n](const Point& x, std::span<Complex> out) {
    std::array<Complex, kMaxDimension> a{};
    std::array<double, kMaxDimension * kMaxDimension> jac{};
    omega.coefficients(F.map(x), std::span<Complex>(a.data(), n));
    F.jacobian(x, std::span<double>(jac.data(), n * n));
    for (std::size_t j = 0; j < n; ++j) {
      Complex s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += a[i] * jac[i * n + j];
      out[j] = s;
    }
  });
}

namespace diffeomorphisms {

Diffeomorphism identity(DomainPtr domain) {
  const std::size_t n = domain->dimension();
  return {"identity", domain, domain, [](const Point& x) { return x; },
          [n](const Point&, std::span<double> out) {
            std::fill(out.begin(), out.end(), 0.0);
            for (std::size_t i = 0; i < n; ++i) out[i * n + i] = 1.0;
          }};
}

Diffeomorphism rotation(DomainPtr domain, double angle) {
  if (domain->dimension() != 2) throw DomainError("rotation needs a planar domain");
  const double c = std::cos(angle), s = std::sin(angle);
  return {"rotation(" + fmt_num(angle) + ")", domain, domain,
          [c, s](const Point& x) { return Point{c * x[0] - s * x[1], s * x[0] + c * x[1]}; },
          [c, s](const Point&, std::span<double> out) {
            out[0] = c;
            out[1] = -s;
            out[2] = s;
            out[3] = c;
          }};
}

Diffeomorphism scaling(DomainPtr source, DomainPtr target, double factor) {
  if (!(factor > 0.0)) throw DomainError("scaling factor must be positive");
  const std::size_t n = source->dimension();
  return {"scaling(" + fmt_num(factor) + ")", std::move(source), std::move(target),
          [factor](const Point& x) { return factor * x; },
          [factor, n](const Point&, std::span<double> out) {
            std::fill(out.begin(), out.end(), 0.0);
            for (std::size_t i = 0; i < n; ++i) out[i * n + i] = factor;
          }};
}

}  // namespace diffeomorphisms

}  // namespace itint
