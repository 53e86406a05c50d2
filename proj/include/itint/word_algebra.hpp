#pragma once

// Words over 1-form symbols and their formal linear combinations: the
// tensor (concatenation) algebra and the shuffle algebra.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "itint/errors.hpp"
#include "itint/point.hpp"
#include "itint/rational.hpp"

namespace itint {

using SymbolId = std::uint32_t;

struct FormSymbol {
  SymbolId id = 0;
  std::string label;

  friend bool operator==(const FormSymbol& a, const FormSymbol& b) noexcept { return a.id == b.id; }
};

enum class CoefficientMode { exact, floating };

// Interns symbol labels. Ids are dense and assigned in interning order.
class SymbolRegistry {
 public:
  explicit SymbolRegistry(CoefficientMode mode = CoefficientMode::floating) : mode_(mode) {}

  FormSymbol intern(const std::string& label);
  std::optional<FormSymbol> find(const std::string& label) const;
  const std::string& label(SymbolId id) const;
  std::size_t size() const noexcept { return labels_.size(); }
  CoefficientMode mode() const noexcept { return mode_; }

 private:
  CoefficientMode mode_;
  std::vector<std::string> labels_;
  std::unordered_map<std::string, SymbolId> ids_;
};

// Letters are symbol ids; the empty word is the unit.
using Word = std::vector<SymbolId>;

// All (r,s)-shuffles of u and v, listed with multiplicity: the result has
// binomial(r+s, r) entries.
std::vector<Word> shuffle_words(const Word& u, const Word& v);

// The r+1 prefix/suffix splits (w[0..j), w[j..r)) for j = 0..r.
std::vector<std::pair<Word, Word>> deconcatenations(const Word& w);

struct SignedWord {
  int sign = 1;
  Word word;
};

// (-1)^r together with the letters of w in reverse order.
SignedWord reverse_signed(const Word& w);

std::string format_word(const Word& w, const SymbolRegistry& registry);

// Finite formal sum of words with coefficients in C (Rational or Complex).
// Terms are kept in lexicographic order of the id sequence; zero
// coefficients are never stored.
template <class C>
class BasicElement {
 public:
  using Coefficient = C;
  using TermMap = std::map<Word, C>;

  BasicElement() = default;

  static BasicElement unit() { return constant(C(1)); }
  static BasicElement constant(const C& c) { return word({}, c); }
  static BasicElement word(const Word& w, const C& c = C(1)) {
    BasicElement e;
    e.add_term(w, c);
    return e;
  }
  static BasicElement letter(SymbolId id, const C& c = C(1)) { return word(Word{id}, c); }

  const TermMap& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  std::size_t size() const noexcept { return terms_.size(); }

  // Longest word length; -1 for the zero element.
  int degree() const noexcept {
    int d = -1;
    for (const auto& [w, c] : terms_) d = std::max(d, static_cast<int>(w.size()));
    return d;
  }

  C coefficient(const Word& w) const {
    auto it = terms_.find(w);
    return it == terms_.end() ? C(0) : it->second;
  }

  void add_term(const Word& w, const C& c) {
    if (c == C(0)) return;
    auto [it, inserted] = terms_.try_emplace(w, c);
    if (!inserted) {
      it->second += c;
      if (it->second == C(0)) terms_.erase(it);
    }
  }

  // Terms of length exactly k.
  BasicElement homogeneous(int k) const {
    BasicElement e;
    for (const auto& [w, c] : terms_)
      if (static_cast<int>(w.size()) == k) e.terms_.emplace(w, c);
    return e;
  }

  BasicElement& operator+=(const BasicElement& o) {
    for (const auto& [w, c] : o.terms_) add_term(w, c);
    return *this;
  }
  BasicElement& operator-=(const BasicElement& o) {
    for (const auto& [w, c] : o.terms_) add_term(w, -c);
    return *this;
  }
  friend BasicElement operator+(BasicElement a, const BasicElement& b) { return a += b; }
  friend BasicElement operator-(BasicElement a, const BasicElement& b) { return a -= b; }
  friend BasicElement operator-(const BasicElement& a) { return BasicElement() - a; }

  friend BasicElement operator*(const C& s, const BasicElement& a) {
    BasicElement e;
    for (const auto& [w, c] : a.terms_) e.add_term(w, s * c);
    return e;
  }

  // Concatenation product of the tensor algebra.
  friend BasicElement operator*(const BasicElement& a, const BasicElement& b) {
    BasicElement e;
    for (const auto& [u, cu] : a.terms_)
      for (const auto& [v, cv] : b.terms_) {
        Word w = u;
        w.insert(w.end(), v.begin(), v.end());
        e.add_term(w, cu * cv);
      }
    return e;
  }

  friend bool operator==(const BasicElement&, const BasicElement&) = default;

 private:
  TermMap terms_;
};

using ExactElement = BasicElement<Rational>;
using AlgebraElement = BasicElement<Complex>;

// Bilinear extension of the word shuffle. Shared letters keep their
// multiplicity.
template <class C>
BasicElement<C> shuffle(const BasicElement<C>& a, const BasicElement<C>& b) {
  BasicElement<C> e;
  for (const auto& [u, cu] : a.terms())
    for (const auto& [v, cv] : b.terms()) {
      const C c = cu * cv;
      for (const Word& w : shuffle_words(u, v)) e.add_term(w, c);
    }
  return e;
}

AlgebraElement to_floating(const ExactElement& e);

// {"terms":[{"word":["a","b"],"re":...,"im":...}, ...]}; doubles round-trip
// bit-exactly.
nlohmann::json to_json(const AlgebraElement& e, const SymbolRegistry& registry);
// Labels not yet known to the registry are interned.
AlgebraElement element_from_json(const nlohmann::json& j, SymbolRegistry& registry);

std::string format_element(const AlgebraElement& e, const SymbolRegistry& registry);

}  // namespace itint
