#include "itint/word_algebra.hpp"

#include <sstream>

namespace itint {

FormSymbol SymbolRegistry::intern(const std::string& label) {
  if (label.empty()) throw ParseError("empty form symbol label");
  if (auto it = ids_.find(label); it != ids_.end()) return {it->second, label};
  const auto id = static_cast<SymbolId>(labels_.size());
  labels_.push_back(label);
  ids_.emplace(label, id);
  return {id, label};
}

std::optional<FormSymbol> SymbolRegistry::find(const std::string& label) const {
  if (auto it = ids_.find(label); it != ids_.end()) return FormSymbol{it->second, label};
  return std::nullopt;
}

const std::string& SymbolRegistry::label(SymbolId id) const {
  if (id >= labels_.size()) throw UnboundSymbol("unknown symbol id " + std::to_string(id));
  return labels_[id];
}

std::vector<Word> shuffle_words(const Word& u, const Word& v) {
  const std::size_t r = u.size();
  const std::size_t n = u.size() + v.size();
  std::vector<Word> out;
  // Enumerate the positions taken by u as an increasing index tuple.
  std::vector<std::size_t> pos(r);
  for (std::size_t i = 0; i < r; ++i) pos[i] = i;
  while (true) {
    Word w(n);
    std::size_t iu = 0, iv = 0;
    for (std::size_t k = 0; k < n; ++k) {
      if (iu < r && pos[iu] == k)
        w[k] = u[iu++];
      else
        w[k] = v[iv++];
    }
    out.push_back(std::move(w));
    // next combination
    std::size_t i = r;
    while (i > 0 && pos[i - 1] == n - r + i - 1) --i;
    if (i == 0) break;
    ++pos[i - 1];
    for (std::size_t j = i; j < r; ++j) pos[j] = pos[j - 1] + 1;
  }
  return out;
}

std::vector<std::pair<Word, Word>> deconcatenations(const Word& w) {
  std::vector<std::pair<Word, Word>> out;
  out.reserve(w.size() + 1);
  for (std::size_t j = 0; j <= w.size(); ++j)
    out.emplace_back(Word(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(j)),
                     Word(w.begin() + static_cast<std::ptrdiff_t>(j), w.end()));
  return out;
}

SignedWord reverse_signed(const Word& w) {
  return {w.size() % 2 == 0 ? 1 : -1, Word(w.rbegin(), w.rend())};
}

std::string format_word(const Word& w, const SymbolRegistry& registry) {
  if (w.empty()) return "1";
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) s += '.';
    s += registry.label(w[i]);
  }
  return s;
}

AlgebraElement to_floating(const ExactElement& e) {
  AlgebraElement out;
  for (const auto& [w, c] : e.terms()) out.add_term(w, Complex(c.to_double(), 0.0));
  return out;
}

nlohmann::json to_json(const AlgebraElement& e, const SymbolRegistry& registry) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [w, c] : e.terms()) {
    nlohmann::json letters = nlohmann::json::array();
    for (SymbolId id : w) letters.push_back(registry.label(id));
    terms.push_back({{"word", std::move(letters)}, {"re", c.real()}, {"im", c.imag()}});
  }
  return {{"terms", std::move(terms)}};
}

AlgebraElement element_from_json(const nlohmann::json& j, SymbolRegistry& registry) {
  if (!j.is_object() || !j.contains("terms") || !j.at("terms").is_array())
    throw ParseError("algebra element JSON needs a \"terms\" array");
  AlgebraElement e;
  for (const auto& t : j.at("terms")) {
    Word w;
    for (const auto& letter : t.at("word")) w.push_back(registry.intern(letter.get<std::string>()).id);
    const double re = t.value("re", 0.0);
    const double im = t.value("im", 0.0);
    e.add_term(w, Complex(re, im));
  }
  return e;
}

std::string format_element(const AlgebraElement& e, const SymbolRegistry& registry) {
  if (e.is_zero()) return "0";
  std::ostringstream os;
  os.precision(17);
  bool first = true;
  for (const auto& [w, c] : e.terms()) {
    if (!first) os << " + ";
    first = false;
    if (c.imag() == 0.0)
      os << c.real();
    else
      os << "(" << c.real() << (c.imag() < 0 ? "" : "+") << c.imag() << "i)";
    os << "*" << format_word(w, registry);
  }
  return os.str();
}

}  // namespace itint
