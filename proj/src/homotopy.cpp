#include "itint/homotopy.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <mutex>
#include <numbers>
#include <unordered_map>

#include "itint/errors.hpp"

namespace itint {

namespace {

constexpr double kVanishingSum = 1e-14;

struct GaussRule {
  std::array<double, kPoincareNodes> nodes{};    // on [0,1]
  std::array<double, kPoincareNodes> weights{};  // sum to 1
};

// Newton iteration on P_n with the three-term recurrence.
const GaussRule& gauss_legendre() {
  static const GaussRule rule = [] {
    GaussRule g;
    constexpr int n = kPoincareNodes;
    for (int i = 0; i < n; ++i) {
      double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      const double w = 2.0 / ((1.0 - x * x) * dp * dp);
      g.nodes[static_cast<std::size_t>(i)] = 0.5 * (1.0 - x);
      g.weights[static_cast<std::size_t>(i)] = 0.5 * w;
    }
    return g;
  }();
  return rule;
}

struct PointKey {
  std::array<std::uint64_t, kMaxDimension> bits{};
  friend bool operator==(const PointKey&, const PointKey&) = default;
};

struct PointKeyHash {
  std::size_t operator()(const PointKey& k) const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (auto b : k.bits) h = (h ^ b) * 0x100000001b3ULL;
    return static_cast<std::size_t>(h);
  }
};

PointKey key_of(const Point& x) {
  PointKey k;
  for (std::size_t i = 0; i < x.size(); ++i) k.bits[i] = std::bit_cast<std::uint64_t>(x[i]);
  return k;
}

class PrimitiveCache {
 public:
  bool lookup(const Point& x, std::span<Complex> out) {
    std::lock_guard lock(mutex_);
    auto it = map_.find(key_of(x));
    if (it == map_.end()) return false;
    std::copy_n(it->second.begin(), out.size(), out.begin());
    return true;
  }
  void store(const Point& x, std::span<const Complex> values) {
    std::lock_guard lock(mutex_);
    if (map_.size() >= kCapacity) map_.clear();
    std::array<Complex, kMaxDimension> v{};
    std::copy(values.begin(), values.end(), v.begin());
    map_.insert_or_assign(key_of(x), v);
  }

 private:
  static constexpr std::size_t kCapacity = 1 << 18;
  std::mutex mutex_;
  std::unordered_map<PointKey, std::array<Complex, kMaxDimension>, PointKeyHash> map_;
};

}  // namespace

// ---------------------------------------------------------------------------

S2Report check_s2_condition(const AlgebraElement& element, const Binding& binding, std::span<const Point> samples,
                            double tol) {
  if (element.degree() > 2)
    throw ShapeError("the degree-2 condition needs an element of degree <= 2, got degree " +
                     std::to_string(element.degree()));
  S2Report rep;
  rep.tolerance = tol;
  rep.samples = samples.size();

  std::vector<std::pair<Complex, std::pair<SymbolId, SymbolId>>> pairs;
  std::vector<std::pair<Complex, SymbolId>> linear;
  for (const auto& [w, c] : element.terms()) {
    if (w.size() == 2) pairs.push_back({c, {w[0], w[1]}});
    if (w.size() == 1) linear.push_back({c, w[0]});
  }

  std::map<SymbolId, double> closed;
  for (const auto& [c, ab] : pairs)
    for (SymbolId id : {ab.first, ab.second}) {
      if (closed.count(id)) continue;
      const auto cr = is_closed(binding.at(id), tol, samples);
      closed.emplace(id, cr.residual);
      if (!cr.closed)
        throw CertificationError("form symbol " + std::to_string(id) + " is not closed (residual " +
                                 std::to_string(cr.residual) + ")");
    }
  rep.closedness.assign(closed.begin(), closed.end());

  if (pairs.empty() && linear.empty()) {
    rep.passed = true;
    return rep;
  }
  std::optional<TwoForm> total;
  auto add = [&](TwoForm t) { total = total ? *total + t : std::move(t); };
  for (const auto& [c, ab] : pairs) add(wedge(binding.at(ab.first), binding.at(ab.second)).scaled(c));
  for (const auto& [c, id] : linear) add(exterior_derivative(binding.at(id)).scaled(c));
  rep.residual = max_norm(*total, samples);
  rep.passed = rep.residual <= tol;
  return rep;
}

InvarianceCertificate certify_s2(const AlgebraElement& element, const Binding& binding,
                                 std::span<const Point> samples, double tol) {
  const S2Report rep = check_s2_condition(element, binding, samples, tol);
  return {element, element.degree() <= 0 ? "constant" : "s2-condition", rep.residual, tol, rep.passed};
}

// ---------------------------------------------------------------------------

OneForm poincare_primitive(const TwoForm& beta) {
  const auto& c = beta.domain().star_center();
  if (!c) throw DomainError(beta.domain().name() + " has no star center for the homotopy operator");
  return poincare_primitive(beta, *c);
}

OneForm poincare_primitive(const TwoForm& beta, const Point& center) {
  const std::size_t n = beta.dimension();
  if (center.size() != n) throw DomainError("star center dimension mismatch");
  auto cache = std::make_shared<PrimitiveCache>();
  return OneForm(beta.domain_ptr(), [beta, center, n, cache](const Point& x, std::span<Complex> out) {
    if (cache->lookup(x, out)) return;
    const GaussRule& g = gauss_legendre();
    const Point d = x - center;
    std::array<Complex, kMaxDimension> acc{};
    std::array<Complex, kMaxDimension * kMaxDimension> b{};
    const std::size_t m = TwoForm::component_count(n);
    for (std::size_t q = 0; q < g.nodes.size(); ++q) {
      const double t = g.nodes[q];
      const Point y = center + t * d;
      if (!beta.domain().contains(y))
        throw DomainError("homotopy segment leaves " + beta.domain().name());
      beta.components(y, std::span<Complex>(b.data(), m));
      const double wt = g.weights[q] * t;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = i + 1; k < n; ++k) {
          const Complex bik = b[TwoForm::index(i, k, n)];
          acc[k] += wt * bik * d[i];  // B_ik d_i
          acc[i] -= wt * bik * d[k];  // B_ki d_k
        }
    }
    std::copy_n(acc.begin(), n, out.begin());
    cache->store(x, std::span<const Complex>(acc.data(), n));
  });
}

// ---------------------------------------------------------------------------

const OneForm& DefiningSystem::form(std::size_t first, std::size_t last) const {
  if (first > last || last >= base_.size()) throw DomainError("defining system interval out of range");
  if (first == last) return base_[first];
  return auxiliary_.at({first, last});
}

double DefiningSystem::max_residual() const {
  double r = 0.0;
  for (const auto& e : residuals_) r = std::max(r, e.residual);
  return r;
}

DefiningSystem DefiningSystem::truncated(std::size_t k) const {
  if (k > base_.size()) throw DomainError("cannot truncate a defining system to more forms");
  DefiningSystem out;
  out.base_.assign(base_.begin(), base_.begin() + static_cast<std::ptrdiff_t>(k));
  for (const auto& [key, f] : auxiliary_)
    if (key.second < k) out.auxiliary_.emplace(key, f);
  for (const auto& e : residuals_)
    if (e.last < k) out.residuals_.push_back(e);
  out.tol_ = tol_;
  out.samples_ = samples_;
  return out;
}

DefiningSystem build_defining_system(const std::vector<OneForm>& forms, std::span<const Point> samples, double tol,
                                     double h) {
  if (forms.empty()) throw DomainError("defining system needs at least one form");
  const auto& domain = forms.front().domain_ptr();
  for (std::size_t i = 0; i < forms.size(); ++i) {
    require_same_domain(forms[i].domain(), *domain, "defining system");
    const auto cr = is_closed(forms[i], tol, samples, h);
    if (!cr.closed)
      throw CertificationError("input form " + std::to_string(i + 1) + " is not closed (residual " +
                               std::to_string(cr.residual) + ")");
  }

  DefiningSystem sys;
  sys.base_ = forms;
  sys.tol_ = tol;
  sys.samples_ = samples.size();
  const std::size_t s = forms.size();
  for (std::size_t k = 1; k < s; ++k) {
    for (std::size_t i = 0; i + k < s; ++i) {
      const std::size_t j = i + k;
      std::optional<TwoForm> sum;
      for (std::size_t m = i; m < j; ++m) {
        TwoForm w = wedge(sys.form(i, m), sys.form(m + 1, j));
        sum = sum ? *sum + w : std::move(w);
      }
      // A sum vanishing on every sample is solved by the zero form; this also
      // covers domains without a star center.
      OneForm aux = max_norm(*sum, samples) <= kVanishingSum ? OneForm::zero(domain)
                                                             : poincare_primitive(*sum).scaled(-1.0);
      const double residual = max_norm(*sum + exterior_derivative(aux, h), samples);
      sys.residuals_.push_back({i, j, residual});
      if (!(residual <= tol))
        throw CertificationError("defining-system equation for interval (" + std::to_string(i + 1) + ".." +
                                 std::to_string(j + 1) + ") violated: residual " + std::to_string(residual));
      sys.auxiliary_.emplace(std::make_pair(i, j), std::move(aux));
    }
  }
  return sys;
}

InvarianceCertificate defining_system_element(const DefiningSystem& system, std::span<const SymbolId> base_symbols,
                                              SymbolRegistry& registry, Binding& binding, const std::string& prefix) {
  const std::size_t s = system.size();
  if (base_symbols.size() != s) throw DomainError("need one symbol per base form");
  std::map<std::pair<std::size_t, std::size_t>, SymbolId> ids;
  for (std::size_t i = 0; i < s; ++i) {
    ids[{i, i}] = base_symbols[i];
    binding.bind(base_symbols[i], system.form(i, i));
  }
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = i + 1; j < s; ++j) {
      const FormSymbol sym = registry.intern(prefix + "_" + std::to_string(i + 1) + "_" + std::to_string(j + 1));
      ids[{i, j}] = sym.id;
      binding.bind(sym.id, system.form(i, j));
    }
  AlgebraElement e;
  // Bit k of `cuts` set: a block ends after position k.
  for (std::uint64_t cuts = 0; cuts < (std::uint64_t{1} << (s - 1)); ++cuts) {
    Word w;
    std::size_t start = 0;
    for (std::size_t k = 0; k < s; ++k) {
      if (k + 1 == s || ((cuts >> k) & 1U)) {
        w.push_back(ids.at({start, k}));
        start = k + 1;
      }
    }
    e.add_term(w, 1.0);
  }
  return {e, "defining-system", system.max_residual(), system.tolerance(), system.max_residual() <= system.tolerance()};
}

// ---------------------------------------------------------------------------

InvarianceReport empirical_invariance(const AlgebraElement& element, const Binding& binding, const PathFamily& family,
                                      std::span<const double> amplitudes, const QuadratureOptions& opts) {
  InvarianceReport rep;
  rep.base_value = eval_element(family.base(), element, binding, opts).value;
  for (double a : amplitudes) {
    const Complex v = eval_element(perturb(family, a), element, binding, opts).value;
    const double dev = std::abs(v - rep.base_value);
    rep.amplitudes.push_back(a);
    rep.deviations.push_back(dev);
    rep.max_deviation = std::max(rep.max_deviation, dev);
  }
  return rep;
}

std::vector<double> symmetric_amplitudes(std::size_t n, double max_amplitude) {
  std::vector<double> out;
  const std::size_t half = (n + 1) / 2;
  for (std::size_t k = half; k >= 1 && out.size() < n; --k)
    out.push_back(-max_amplitude * static_cast<double>(k) / static_cast<double>(half));
  for (std::size_t k = 1; k <= half && out.size() < n; ++k)
    out.push_back(max_amplitude * static_cast<double>(k) / static_cast<double>(half));
  return out;
}

}  // namespace itint
