#include "itint/invariants.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "itint/errors.hpp"

namespace itint {

HigherInvariant::HigherInvariant(InvarianceCertificate certificate, Binding base_binding, const CoverSpace& cover,
                                 QuadratureOptions opts)
    : cert_(std::move(certificate)), binding_(std::move(base_binding)), cover_(&cover), opts_(opts) {
  if (!cert_.passed)
    throw CertificationError("element is not certified homotopy invariant (" + cert_.method + ", residual " +
                             std::to_string(cert_.residual) + ")");
  for (const auto& [w, c] : cert_.element.terms())
    for (SymbolId id : w) {
      if (!binding_.contains(id)) throw UnboundSymbol("symbol " + std::to_string(id) + " has no form bound");
      require_same_domain(binding_.at(id).domain(), *cover.base_domain(), "higher invariant");
    }
}

std::size_t HigherInvariant::degree() const noexcept {
  const int d = cert_.element.degree();
  return d < 0 ? 0 : static_cast<std::size_t>(d);
}

std::size_t HigherInvariant::KeyHash::operator()(const Key& k) const noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (long long v : k.q) h = (h ^ static_cast<std::uint64_t>(v)) * 0x100000001b3ULL;
  return static_cast<std::size_t>(h);
}

Complex HigherInvariant::operator()(const Point& x) const {
  Key key;
  for (std::size_t i = 0; i < x.size(); ++i) key.q[i] = std::llround(x[i] * 1e12);
  {
    std::lock_guard lock(mutex_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  const Complex v = evaluate_along(default_path(x)).value;
  std::lock_guard lock(mutex_);
  cache_.insert_or_assign(key, v);
  return v;
}

std::size_t HigherInvariant::cache_size() const {
  std::lock_guard lock(mutex_);
  return cache_.size();
}

namespace {

SampledPath axis_polyline(const DomainPtr& dom, const Point& from, const Point& to, bool reverse_order) {
  std::vector<Point> pts{from};
  Point cur = from;
  const std::size_t n = from.size();
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = reverse_order ? n - 1 - k : k;
    if (cur[i] == to[i]) continue;
    cur[i] = to[i];
    if (!dom->segment_inside(pts.back(), cur)) throw UnreachableError("no axis path to the target inside " + dom->name());
    pts.push_back(cur);
  }
  if (pts.size() == 1) return SampledPath::constant(dom, from);
  return SampledPath::polyline(dom, pts);
}

}  // namespace

SampledPath HigherInvariant::default_path(const Point& x) const {
  const auto& dom = cover_->cover_domain();
  if (!dom->contains(x)) throw DomainError("point outside " + dom->name());
  const Point& x0 = cover_->lift();
  if (x == x0) return SampledPath::constant(dom, x0);
  if (dom->segment_inside(x0, x)) return SampledPath::segment(dom, x0, x);
  return axis_polyline(dom, x0, x, false);
}

SampledPath HigherInvariant::alternative_path(const Point& x) const {
  const auto& dom = cover_->cover_domain();
  if (!dom->contains(x)) throw DomainError("point outside " + dom->name());
  return axis_polyline(dom, cover_->lift(), x, true);
}

IteratedIntegralResult HigherInvariant::evaluate_along(const SampledPath& cover_path) const {
  if (distance(cover_path.start(), cover_->lift()) > kEndpointTolerance)
    throw EndpointMismatch("cover path must start at the lift of the base point");
  if (cert_.element.terms().empty()) return {Complex{}, 0.0, opts_.grid};
  return eval_element(cover_->push_forward(cover_path), cert_.element, binding_, opts_);
}

CheckResult HigherInvariant::path_independence(const Point& x, const Tolerance& tol) const {
  CheckResult r = compare("path-independence", evaluate_along(default_path(x)), evaluate_along(alternative_path(x)), tol);
  r.tolerance = std::max(r.tolerance, 2.0 * r.error_estimate);
  r.passed = r.residual <= r.tolerance;
  return r;
}

// ---------------------------------------------------------------------------

std::vector<std::vector<GroupElement>> generator_tuples(std::size_t rank, std::size_t length) {
  std::vector<std::vector<GroupElement>> out;
  std::vector<std::size_t> idx(length, 0);
  while (true) {
    std::vector<GroupElement> t;
    for (std::size_t i : idx) t.push_back(generator(rank, i));
    out.push_back(std::move(t));
    // next non-decreasing index sequence
    std::size_t k = length;
    while (k > 0 && idx[k - 1] + 1 == rank) --k;
    if (k == 0) break;
    const std::size_t v = idx[k - 1] + 1;
    for (std::size_t j = k - 1; j < length; ++j) idx[j] = v;
  }
  return out;
}

namespace {

struct TupleMax {
  double magnitude = -1.0;
  std::vector<GroupElement> tuple;
  Point point;
  Complex value;
};

TupleMax max_over_tuples(const HigherInvariant& f, std::span<const Point> samples, std::size_t length) {
  const CoverSpace& cover = f.cover();
  const CoverFunction fn = f.function();
  TupleMax best;
  for (const auto& tuple : generator_tuples(cover.rank(), length)) {
    const GroupRingElement e = eta(tuple, cover.rank());
    for (const auto& x : samples) {
      const Complex v = apply_group_ring(e, fn, x, cover);
      if (std::abs(v) > best.magnitude) best = {std::abs(v), tuple, x, v};
    }
  }
  return best;
}

}  // namespace

OrderReport order_check(const HigherInvariant& f, std::span<const Point> samples, double tol,
                        std::optional<std::size_t> tuple_length) {
  if (samples.empty()) throw DomainError("order check needs sample points");
  OrderReport rep;
  rep.degree = f.degree();
  rep.tuple_length = tuple_length.value_or(rep.degree + 1);
  rep.tolerance = tol;
  rep.residual = max_over_tuples(f, samples, rep.tuple_length).magnitude;
  rep.vanishes = rep.residual <= tol;
  if (rep.tuple_length > 0) {
    TupleMax w = max_over_tuples(f, samples, rep.tuple_length - 1);
    rep.witness = std::move(w.tuple);
    rep.witness_point = w.point;
    rep.witness_value = w.value;
    rep.witness_magnitude = w.magnitude;
  }
  rep.exact = rep.vanishes && rep.tuple_length > 0 && rep.witness_magnitude > tol;
  return rep;
}

IteratedIntegralResult pair(const AlgebraElement& element, const GroupRingElement& eta, const Binding& base_binding,
                            const CoverSpace& cover, const QuadratureOptions& opts) {
  IteratedIntegralResult out{Complex{}, 0.0, opts.grid};
  for (const auto& [g, c] : eta.terms()) {
    const auto r = eval_element(base_loop(g, cover), element, base_binding, opts);
    out.value += static_cast<double>(c) * r.value;
    out.richardson_error += std::abs(static_cast<double>(c)) * r.richardson_error;
  }
  return out;
}

PairingReport chen_pairing(const std::vector<InvarianceCertificate>& elements, const std::vector<GroupRingElement>& etas,
                           const Binding& base_binding, const CoverSpace& cover, const QuadratureOptions& opts,
                           double rank_tolerance) {
  for (const auto& c : elements)
    if (!c.passed) throw CertificationError("pairing needs certified elements");
  PairingReport rep;
  Eigen::MatrixXcd M(static_cast<Eigen::Index>(etas.size()), static_cast<Eigen::Index>(elements.size()));
  for (std::size_t j = 0; j < etas.size(); ++j) {
    rep.values.emplace_back();
    rep.errors.emplace_back();
    for (std::size_t i = 0; i < elements.size(); ++i) {
      const auto r = pair(elements[i].element, etas[j], base_binding, cover, opts);
      rep.values.back().push_back(r.value);
      rep.errors.back().push_back(r.richardson_error);
      M(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = r.value;
    }
  }
  if (M.size() > 0) {
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(M);
    lu.setThreshold(rank_tolerance);
    rep.rank = static_cast<std::size_t>(lu.rank());
  }
  return rep;
}

KernelInclusionReport kernel_inclusion_check(const HigherInvariant& f, std::span<const Point> samples, double tol) {
  KernelInclusionReport rep;
  rep.degree = f.degree();
  rep.tolerance = tol;
  if (f.element().terms().empty()) {
    rep.included = true;
    return rep;
  }
  const CoverSpace& cover = f.cover();
  for (const auto& tuple : generator_tuples(cover.rank(), rep.degree)) {
    const auto r = pair(f.element(), eta(tuple, cover.rank()), f.binding(), cover, f.options());
    rep.precondition_residual = std::max(rep.precondition_residual, std::abs(r.value));
  }
  if (!(rep.precondition_residual <= tol))
    throw PreconditionError("element does not vanish on the J^" + std::to_string(rep.degree) +
                            " slice: max pairing " + std::to_string(rep.precondition_residual));
  for (std::size_t k = 1; k <= rep.degree; ++k)
    rep.residuals.push_back(max_over_tuples(f, samples, k).magnitude);
  rep.included = rep.degree == 0 || rep.residuals.back() <= tol;
  return rep;
}

}  // namespace itint
