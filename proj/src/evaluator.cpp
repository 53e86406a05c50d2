#include "itint/evaluator.hpp"

#include <cmath>

#include "itint/errors.hpp"

namespace itint {

void Binding::bind(SymbolId id, OneForm form) {
  forms_.insert_or_assign(id, std::move(form));
}

const OneForm& Binding::at(SymbolId id) const {
  auto it = forms_.find(id);
  if (it == forms_.end()) throw UnboundSymbol("form symbol " + std::to_string(id) + " is not bound");
  return it->second;
}

namespace {

using Matrix = std::vector<Complex>;  // (r+1) x (r+1), row-major

Matrix identity_matrix(std::size_t r) {
  Matrix m((r + 1) * (r + 1), Complex{});
  for (std::size_t a = 0; a <= r; ++a) m[a * (r + 1) + a] = 1.0;
  return m;
}

// Upper-triangular product: (A B)[a][b] = sum_{a<=c<=b} A[a][c] B[c][b].
Matrix chain(const Matrix& A, const Matrix& B, std::size_t r) {
  const std::size_t s = r + 1;
  Matrix C(s * s, Complex{});
  for (std::size_t a = 0; a <= r; ++a)
    for (std::size_t b = a; b <= r; ++b) {
      Complex acc = 0.0;
      for (std::size_t c = a; c <= b; ++c) acc += A[a * s + c] * B[c * s + b];
      C[a * s + b] = acc;
    }
  return C;
}

// Pullback samples f_k(u_m) = omega_{w_k}(x(u_m)) . x'(u_m) on the 2n grid.
std::vector<std::vector<Complex>> pullbacks(const Curve& curve, const ChartDomain& domain, const Word& w,
                                            const Binding& binding, int m) {
  const std::size_t r = w.size();
  const std::size_t dim = domain.dimension();
  std::vector<Point> xs(static_cast<std::size_t>(m) + 1), vs(static_cast<std::size_t>(m) + 1);
  for (int i = 0; i <= m; ++i) {
    const double u = i == m ? 1.0 : static_cast<double>(i) / m;
    curve.evaluate(u, xs[static_cast<std::size_t>(i)], vs[static_cast<std::size_t>(i)]);
  }
  std::map<SymbolId, std::vector<Complex>> by_letter;
  for (SymbolId id : w) {
    if (by_letter.count(id)) continue;
    const OneForm& form = binding.at(id);
    require_same_domain(form.domain(), domain, "iterated integral");
    std::vector<Complex> f(static_cast<std::size_t>(m) + 1);
    std::array<Complex, kMaxDimension> a{};
    for (std::size_t i = 0; i < f.size(); ++i) {
      form.coefficients(xs[i], std::span<Complex>(a.data(), dim));
      Complex s = 0.0;
      for (std::size_t j = 0; j < dim; ++j) s += a[j] * vs[i][j];
      if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
        throw NonFiniteValue("non-finite integrand sample for symbol " + std::to_string(id));
      f[i] = s;
    }
    by_letter.emplace(id, std::move(f));
  }
  std::vector<std::vector<Complex>> out;
  out.reserve(r);
  for (SymbolId id : w) out.push_back(by_letter.at(id));
  return out;
}

// Trapezoid recursion on every other sample (stride 2) or every sample.
Matrix trapezoid(const std::vector<std::vector<Complex>>& f, std::size_t r, int intervals, int stride) {
  const std::size_t s = r + 1;
  Matrix prev = identity_matrix(r), cur = prev;
  const double half_h = 0.5 / intervals;
  for (int m = 0; m < intervals; ++m) {
    const std::size_t i0 = static_cast<std::size_t>(m * stride);
    const std::size_t i1 = static_cast<std::size_t>((m + 1) * stride);
    for (std::size_t a = 0; a < r; ++a)
      for (std::size_t b = a + 1; b <= r; ++b) {
        const auto& fb = f[b - 1];
        cur[a * s + b] = prev[a * s + b] + half_h * (prev[a * s + b - 1] * fb[i0] + cur[a * s + b - 1] * fb[i1]);
      }
    prev = cur;
  }
  return cur;
}

}  // namespace

ChenMatrix word_matrix(const SampledPath& p, const Word& w, const Binding& binding, const QuadratureOptions& opts) {
  if (opts.grid < 1) throw DomainError("quadrature grid must be positive");
  const std::size_t r = w.size();
  const std::size_t s = r + 1;
  Matrix coarse = identity_matrix(r), fine = coarse;
  for (const PathPiece& piece : p.pieces()) {
    if (r == 0) break;
    const auto f = pullbacks(piece.curve, p.domain(), w, binding, 2 * opts.grid);
    coarse = chain(coarse, trapezoid(f, r, opts.grid, 2), r);
    fine = chain(fine, trapezoid(f, r, 2 * opts.grid, 1), r);
  }
  ChenMatrix out;
  out.length = r;
  out.values.resize(s * s);
  out.errors.resize(s * s);
  for (std::size_t k = 0; k < s * s; ++k) {
    const Complex diff = fine[k] - coarse[k];
    if (opts.extrapolate) {
      out.values[k] = fine[k] + diff / 3.0;
      out.errors[k] = std::abs(diff) / 3.0;
    } else {
      out.values[k] = coarse[k];
      out.errors[k] = std::abs(diff) * 4.0 / 3.0;
    }
  }
  return out;
}

IteratedIntegralResult iterint(const SampledPath& p, const Word& w, const Binding& binding,
                               const QuadratureOptions& opts) {
  if (w.empty()) return {Complex(1.0, 0.0), 0.0, opts.grid};
  const ChenMatrix m = word_matrix(p, w, binding, opts);
  return {m.at(0, w.size()), m.error(0, w.size()), opts.grid};
}

IteratedIntegralResult eval_element(const SampledPath& p, const AlgebraElement& e, const Binding& binding,
                                    const QuadratureOptions& opts) {
  IteratedIntegralResult out{Complex{}, 0.0, opts.grid};
  for (const auto& [w, c] : e.terms()) {
    const auto r = iterint(p, w, binding, opts);
    out.value += c * r.value;
    out.richardson_error += std::abs(c) * r.richardson_error;
  }
  return out;
}

CheckResult compare(std::string name, const IteratedIntegralResult& lhs, const IteratedIntegralResult& rhs,
                    const Tolerance& tol) {
  CheckResult c;
  c.name = std::move(name);
  c.lhs = lhs.value;
  c.rhs = rhs.value;
  c.residual = std::abs(lhs.value - rhs.value);
  c.scale = std::abs(lhs.value) + std::abs(rhs.value);
  c.tolerance = tol.bound(c.scale);
  c.error_estimate = lhs.richardson_error + rhs.richardson_error;
  c.passed = c.residual <= c.tolerance;
  return c;
}

CheckResult check_reparametrization(const SampledPath& p, const Reparametrization& phi, const Word& w,
                                    const Binding& binding, const QuadratureOptions& opts, const Tolerance& tol) {
  return compare("reparametrization[" + phi.name + "]", iterint(reparametrize(p, phi), w, binding, opts),
                 iterint(p, w, binding, opts), tol);
}

SampledPath map_path(const SampledPath& p, const Diffeomorphism& F) {
  require_same_domain(p.domain(), *F.source, "map_path");
  const std::size_t n = p.dimension();
  std::vector<PathPiece> pieces;
  for (const PathPiece& piece : p.pieces()) {
    pieces.push_back({Curve::analytic(n,
                                      [curve = piece.curve, F, n](double u, Point& x, Point& v) {
                                        Point y, dy;
                                        curve.evaluate(u, y, dy);
                                        std::array<double, kMaxDimension * kMaxDimension> jac{};
                                        F.jacobian(y, std::span<double>(jac.data(), n * n));
                                        x = F.map(y);
                                        v = Point(n);
                                        for (std::size_t i = 0; i < n; ++i)
                                          for (std::size_t j = 0; j < n; ++j) v[i] += jac[i * n + j] * dy[j];
                                      }),
                      piece.t0, piece.t1});
  }
  return SampledPath(F.target, std::move(pieces));
}

CheckResult check_diffeo_invariance(const SampledPath& p, const Diffeomorphism& F, const Word& w,
                                    const Binding& binding, const QuadratureOptions& opts, const Tolerance& tol) {
  Binding pulled;
  for (SymbolId id : w)
    if (!pulled.contains(id)) pulled.bind(id, pull_back(binding.at(id), F));
  return compare("diffeomorphism[" + F.name + "]", iterint(map_path(p, F), w, binding, opts),
                 iterint(p, w, pulled, opts), tol);
}

CheckResult check_composition(const SampledPath& p, const SampledPath& q, const Word& w, const Binding& binding,
                              const QuadratureOptions& opts, const Tolerance& tol) {
  const SampledPath pq = compose(p, q);
  const auto lhs = iterint(pq, w, binding, opts);
  IteratedIntegralResult rhs{Complex{}, 0.0, opts.grid};
  for (const auto& [prefix, suffix] : deconcatenations(w)) {
    const auto a = iterint(p, prefix, binding, opts);
    const auto b = iterint(q, suffix, binding, opts);
    rhs.value += a.value * b.value;
    rhs.richardson_error += std::abs(a.value) * b.richardson_error + std::abs(b.value) * a.richardson_error;
  }
  return compare("composition", lhs, rhs, tol);
}

CheckResult check_shuffle(const SampledPath& p, const Word& w1, const Word& w2, const Binding& binding,
                          const QuadratureOptions& opts, const Tolerance& tol) {
  const auto a = iterint(p, w1, binding, opts);
  const auto b = iterint(p, w2, binding, opts);
  IteratedIntegralResult lhs{a.value * b.value,
                             std::abs(a.value) * b.richardson_error + std::abs(b.value) * a.richardson_error,
                             opts.grid};
  AlgebraElement sh = shuffle(AlgebraElement::word(w1), AlgebraElement::word(w2));
  return compare("shuffle", lhs, eval_element(p, sh, binding, opts), tol);
}

CheckResult check_reversal(const SampledPath& p, const Word& w, const Binding& binding, const QuadratureOptions& opts,
                           const Tolerance& tol) {
  const auto lhs = iterint(inverse(p), w, binding, opts);
  const auto [sign, reversed] = reverse_signed(w);
  auto rhs = iterint(p, reversed, binding, opts);
  rhs.value *= static_cast<double>(sign);
  return compare("reversal", lhs, rhs, tol);
}

bool ConvergenceReport::converges(double min_order, double floor) const {
  for (std::size_t k = 0; k < orders.size(); ++k) {
    if (residuals[k] <= floor) continue;
    if (!(orders[k] >= min_order) && residuals[k + 1] > floor) return false;
  }
  return true;
}

ConvergenceReport convergence_study(const std::function<double(int)>& residual_at_grid, int n0, int levels) {
  ConvergenceReport rep;
  int n = n0;
  for (int k = 0; k < levels; ++k, n *= 2) {
    rep.grids.push_back(n);
    rep.residuals.push_back(residual_at_grid(n));
  }
  for (std::size_t k = 0; k + 1 < rep.residuals.size(); ++k)
    rep.orders.push_back(std::log2(rep.residuals[k] / rep.residuals[k + 1]));
  return rep;
}

}  // namespace itint
