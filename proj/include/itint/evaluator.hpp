#pragma once

// Numerical iterated integrals along sampled paths and the identity checks
// they satisfy (reparametrization, diffeomorphism, composition, shuffle,
// reversal).

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "itint/geometry.hpp"
#include "itint/paths.hpp"
#include "itint/word_algebra.hpp"

namespace itint {

// Assignment of 1-forms to form symbols.
class Binding {
 public:
  void bind(SymbolId id, OneForm form);
  const OneForm& at(SymbolId id) const;
  bool contains(SymbolId id) const { return forms_.count(id) != 0; }
  const std::map<SymbolId, OneForm>& forms() const noexcept { return forms_; }

 private:
  std::map<SymbolId, OneForm> forms_;
};

struct QuadratureOptions {
  // Trapezoid intervals per smooth path piece.
  int grid = 1024;
  // Report the Richardson-extrapolated value from grids N and 2N; otherwise
  // the plain trapezoid value on grid N.
  bool extrapolate = true;
};

struct IteratedIntegralResult {
  Complex value;
  // Estimated error of `value` from the N / 2N difference.
  double richardson_error = 0.0;
  int grid = 0;
};

// Integrals of all contiguous sub-words: entry (a, b) is the integral of
// letters a+1..b (a <= b); the diagonal is 1. Row 0 holds the prefixes and
// column r the suffixes.
struct ChenMatrix {
  std::size_t length = 0;
  std::vector<Complex> values;
  std::vector<double> errors;

  Complex at(std::size_t a, std::size_t b) const { return values[a * (length + 1) + b]; }
  double error(std::size_t a, std::size_t b) const { return errors[a * (length + 1) + b]; }
};

ChenMatrix word_matrix(const SampledPath& p, const Word& w, const Binding& binding, const QuadratureOptions& opts = {});

// Integral of w along p by the nested trapezoid recursion
// I_0 = 1, I_k(t) = int_0^t I_{k-1} f_k, f_k = omega_k(p) . p'. Pieces of a
// composite path are chained with the composition formula. The empty word
// gives exactly 1.
IteratedIntegralResult iterint(const SampledPath& p, const Word& w, const Binding& binding,
                               const QuadratureOptions& opts = {});

IteratedIntegralResult eval_element(const SampledPath& p, const AlgebraElement& e, const Binding& binding,
                                    const QuadratureOptions& opts = {});

// Pass when residual <= max(abs, rel * scale).
struct Tolerance {
  double abs = 1e-8;
  double rel = 1e-6;
  double bound(double scale) const { return std::max(abs, rel * scale); }
};

struct CheckResult {
  std::string name;
  Complex lhs;
  Complex rhs;
  double residual = 0.0;
  // Sum of the magnitudes of the compared quantities.
  double scale = 0.0;
  double tolerance = 0.0;
  // Quadrature error estimate carried by the two sides.
  double error_estimate = 0.0;
  bool passed = false;
};

CheckResult compare(std::string name, const IteratedIntegralResult& lhs, const IteratedIntegralResult& rhs,
                    const Tolerance& tol);

// |int_{p o phi} w - int_p w|
CheckResult check_reparametrization(const SampledPath& p, const Reparametrization& phi, const Word& w,
                                    const Binding& binding, const QuadratureOptions& opts = {},
                                    const Tolerance& tol = {});

// F o p as a path on F's target.
SampledPath map_path(const SampledPath& p, const Diffeomorphism& F);

// |int_{F o p} w - int_p F^*w|; `binding` holds forms on F's target.
CheckResult check_diffeo_invariance(const SampledPath& p, const Diffeomorphism& F, const Word& w,
                                    const Binding& binding, const QuadratureOptions& opts = {},
                                    const Tolerance& tol = {});

// |int_{pq} w - sum_j int_p w[0..j) int_q w[j..r)|
CheckResult check_composition(const SampledPath& p, const SampledPath& q, const Word& w, const Binding& binding,
                              const QuadratureOptions& opts = {}, const Tolerance& tol = {});

// |int_p w1 * int_p w2 - int_p (w1 shuffle w2)|
CheckResult check_shuffle(const SampledPath& p, const Word& w1, const Word& w2, const Binding& binding,
                          const QuadratureOptions& opts = {}, const Tolerance& tol = {});

// |int_{p^-1} w - (-1)^r int_p reversed(w)|
CheckResult check_reversal(const SampledPath& p, const Word& w, const Binding& binding,
                           const QuadratureOptions& opts = {}, const Tolerance& tol = {});

// Residuals at grids n0, 2 n0, 4 n0, ... and the observed orders
// log2(r_k / r_{k+1}).
struct ConvergenceReport {
  std::vector<int> grids;
  std::vector<double> residuals;
  std::vector<double> orders;

  // Every refinement step either shows order >= min_order or starts from a
  // residual already at or below `floor`.
  bool converges(double min_order, double floor) const;
};

ConvergenceReport convergence_study(const std::function<double(int)>& residual_at_grid, int n0, int levels = 3);

}  // namespace itint
