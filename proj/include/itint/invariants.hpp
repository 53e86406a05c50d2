#pragma once

// Functions f(x) = int_{x~0}^x omega on the universal cover built from
// homotopy-invariant iterated integrals, their order as invariants of the
// deck group, and the pairing of such elements with the group ring.

#include <array>
#include <mutex>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "itint/cover.hpp"
#include "itint/evaluator.hpp"
#include "itint/homotopy.hpp"

namespace itint {

class HigherInvariant {
 public:
  // Throws CertificationError unless the certificate passed.
  HigherInvariant(InvarianceCertificate certificate, Binding base_binding, const CoverSpace& cover,
                  QuadratureOptions opts = {});

  HigherInvariant(const HigherInvariant&) = delete;
  HigherInvariant& operator=(const HigherInvariant&) = delete;

  const AlgebraElement& element() const noexcept { return cert_.element; }
  const InvarianceCertificate& certificate() const noexcept { return cert_; }
  const Binding& binding() const noexcept { return binding_; }
  const CoverSpace& cover() const noexcept { return *cover_; }
  const QuadratureOptions& options() const noexcept { return opts_; }
  // s = degree of the element (0 for constants and zero).
  std::size_t degree() const noexcept;
  std::size_t order_bound() const noexcept { return degree() + 1; }

  // f(x) along the default path, cached on x quantised to 1e-12.
  Complex operator()(const Point& x) const;
  CoverFunction function() const {
    return [this](const Point& x) { return (*this)(x); };
  }

  // Segment from x~0 to x, else an axis-by-axis polyline; UnreachableError
  // if neither stays in the cover domain.
  SampledPath default_path(const Point& x) const;
  // Polyline x~0 -> corner -> x moving one coordinate at a time.
  SampledPath alternative_path(const Point& x) const;

  // Integral of the element along pi o p; p must start at x~0.
  IteratedIntegralResult evaluate_along(const SampledPath& cover_path) const;

  // Default against alternative path at x; passes within
  // max(tol.bound(scale), 2 * quadrature error estimate).
  CheckResult path_independence(const Point& x, const Tolerance& tol = {}) const;

  std::size_t cache_size() const;

 private:
  struct Key {
    std::array<long long, kMaxDimension> q{};
    friend bool operator==(const Key&, const Key&) = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept;
  };

  InvarianceCertificate cert_;
  Binding binding_;
  const CoverSpace* cover_;
  QuadratureOptions opts_;
  mutable std::mutex mutex_;
  mutable std::unordered_map<Key, Complex, KeyHash> cache_;
};

// Multisets of generators of size `length` in lexicographic order; the
// group is abelian so these span J^length.
std::vector<std::vector<GroupElement>> generator_tuples(std::size_t rank, std::size_t length);

struct OrderReport {
  std::size_t degree = 0;
  std::size_t tuple_length = 0;  // degree + 1 unless overridden
  // max over tuples of tuple_length and samples of |eta(tuple) f(x)|
  double residual = 0.0;
  double tolerance = 0.0;
  bool vanishes = false;
  // Largest |eta(tuple) f(x)| over tuples one shorter.
  std::vector<GroupElement> witness;
  Point witness_point;
  Complex witness_value;
  double witness_magnitude = 0.0;
  // vanishes and the witness is above the tolerance: order exactly
  // tuple_length.
  bool exact = false;
};

OrderReport order_check(const HigherInvariant& f, std::span<const Point> samples, double tol,
                        std::optional<std::size_t> tuple_length = std::nullopt);

// sum_g c_g int_{alpha_g} omega over the base loops alpha_g.
IteratedIntegralResult pair(const AlgebraElement& element, const GroupRingElement& eta, const Binding& base_binding,
                            const CoverSpace& cover, const QuadratureOptions& opts = {});

struct PairingReport {
  // values[j][i] = int_{eta_j} omega_i: one row per eta, one column per
  // element.
  std::vector<std::vector<Complex>> values;
  std::vector<std::vector<double>> errors;
  std::size_t rank = 0;
};

// Throws CertificationError for an element whose certificate did not pass.
PairingReport chen_pairing(const std::vector<InvarianceCertificate>& elements, const std::vector<GroupRingElement>& etas,
                           const Binding& base_binding, const CoverSpace& cover, const QuadratureOptions& opts = {},
                           double rank_tolerance = 1e-9);

struct KernelInclusionReport {
  std::size_t degree = 0;
  // max |int_eta omega| over eta in the J^s slice.
  double precondition_residual = 0.0;
  // residuals[k-1] = max over tuples of length k and samples of
  // |eta(tuple) f(x)|, k = 1..s.
  std::vector<double> residuals;
  double tolerance = 0.0;
  bool included = false;
};

// Zero elements are trivially included. Otherwise the pairing with every
// eta of length s must vanish within `tol` (PreconditionError if not), and
// the report records whether eta f vanishes for tuples of length s.
KernelInclusionReport kernel_inclusion_check(const HigherInvariant& f, std::span<const Point> samples, double tol);

}  // namespace itint
