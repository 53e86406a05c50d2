#pragma once

// Certification of homotopy invariance for iterated integrals: the degree-2
// wedge condition, Massey defining systems built with the Poincare homotopy
// operator, and empirical checks under fixed-endpoint perturbations.

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "itint/evaluator.hpp"
#include "itint/geometry.hpp"
#include "itint/paths.hpp"
#include "itint/word_algebra.hpp"

namespace itint {

inline constexpr std::size_t kDefaultCertificationSamples = 512;

// An algebra element together with the evidence that its iterated integral
// only depends on the fixed-endpoint homotopy class of the path.
struct InvarianceCertificate {
  AlgebraElement element;
  std::string method;  // "constant", "s2-condition" or "defining-system"
  double residual = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct S2Report {
  // max over samples of |sum_i alpha_i ^ beta_i + d gamma|
  double residual = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::size_t samples = 0;
  // Closedness residual of every letter occurring in a length-2 word.
  std::vector<std::pair<SymbolId, double>> closedness;
};

// The element must have degree <= 2; its length-2 terms c.(a b) give the
// pairs (c alpha_a, beta_b), its length-1 part is gamma and its constant
// term is c. Throws ShapeError for degree > 2 and CertificationError when a
// pair form is not closed within `tol`.
S2Report check_s2_condition(const AlgebraElement& element, const Binding& binding, std::span<const Point> samples,
                            double tol);

// Runs check_s2_condition; the certificate records whether it passed.
InvarianceCertificate certify_s2(const AlgebraElement& element, const Binding& binding,
                                 std::span<const Point> samples, double tol);

inline constexpr int kPoincareNodes = 64;

// Homotopy operator on a star-shaped domain:
// K(beta)_x(v) = int_0^1 t beta_{c + t(x-c)}(x - c, v) dt, evaluated with
// 64-point Gauss-Legendre quadrature and memoised per point. d K(beta) =
// beta for every 2-form in dimension 2 (closed 2-forms in general).
OneForm poincare_primitive(const TwoForm& beta);
OneForm poincare_primitive(const TwoForm& beta, const Point& center);

struct EquationResidual {
  std::size_t first = 0;  // 0-based interval [first, last]
  std::size_t last = 0;
  double residual = 0.0;
};

// Forms omega_{i..j} for consecutive intervals with
// sum_{i<=m<j} omega_{i..m} ^ omega_{m+1..j} + d omega_{i..j} = 0,
// where omega_{i..i} is the i-th input form.
class DefiningSystem {
 public:
  std::size_t size() const noexcept { return base_.size(); }
  const std::vector<OneForm>& base_forms() const noexcept { return base_; }
  // 0-based closed interval; first == last returns a base form.
  const OneForm& form(std::size_t first, std::size_t last) const;
  const std::vector<EquationResidual>& residuals() const noexcept { return residuals_; }
  double max_residual() const;
  double tolerance() const noexcept { return tol_; }
  std::size_t samples() const noexcept { return samples_; }

  // The system for the first k base forms.
  DefiningSystem truncated(std::size_t k) const;

 private:
  friend DefiningSystem build_defining_system(const std::vector<OneForm>&, std::span<const Point>, double, double);

  std::vector<OneForm> base_;
  std::map<std::pair<std::size_t, std::size_t>, OneForm> auxiliary_;
  std::vector<EquationResidual> residuals_;
  double tol_ = 0.0;
  std::size_t samples_ = 0;
};

// Builds omega_{i..j} = -K(sum of wedges) level by level on the domain's
// star center and verifies every equation on the samples; a sum that
// vanishes on all samples gets the zero form. Throws CertificationError for
// a non-closed input or the first violated equation, DomainError when K is
// needed on a domain without star center.
DefiningSystem build_defining_system(const std::vector<OneForm>& forms, std::span<const Point> samples, double tol,
                                     double h = kDefaultFiniteDifferenceStep);

// Sum over all splittings of 1..s into consecutive blocks of the word of
// block forms. Auxiliary forms are registered as "<prefix>_<i>_<j>"
// (1-based) and bound in `binding`; base forms use `base_symbols`.
InvarianceCertificate defining_system_element(const DefiningSystem& system, std::span<const SymbolId> base_symbols,
                                              SymbolRegistry& registry, Binding& binding,
                                              const std::string& prefix = "m");

struct InvarianceReport {
  Complex base_value;
  std::vector<double> amplitudes;
  std::vector<double> deviations;
  double max_deviation = 0.0;
};

// max over amplitudes of |int_{perturbed} e - int_{base} e|.
InvarianceReport empirical_invariance(const AlgebraElement& element, const Binding& binding, const PathFamily& family,
                                      std::span<const double> amplitudes, const QuadratureOptions& opts = {});

// n amplitudes evenly spread over [-max, max] skipping zero.
std::vector<double> symmetric_amplitudes(std::size_t n, double max_amplitude);

}  // namespace itint
