#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "itint/word_algebra.hpp"

using namespace itint;

namespace {

std::size_t binomial(std::size_t n, std::size_t k) {
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

Word random_word(std::mt19937_64& rng, std::size_t max_len, SymbolId alphabet) {
  std::uniform_int_distribution<std::size_t> len(0, max_len);
  std::uniform_int_distribution<SymbolId> letter(0, alphabet - 1);
  Word w(len(rng));
  for (auto& l : w) l = letter(rng);
  return w;
}

ExactElement random_element(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> coeff(-3, 3);
  ExactElement e;
  for (int i = 0; i < 3; ++i) e.add_term(random_word(rng, 3, 3), Rational(coeff(rng), 1 + (i % 2)));
  return e;
}

}  // namespace

TEST_CASE("registry interns labels densely") {
  SymbolRegistry reg;
  CHECK(reg.intern("a").id == 0);
  CHECK(reg.intern("b").id == 1);
  CHECK(reg.intern("a").id == 0);
  CHECK(reg.size() == 2);
  CHECK(reg.label(1) == "b");
  CHECK_FALSE(reg.find("c").has_value());
}

TEST_CASE("shuffle of ab and c") {
  const Word ab{0, 1}, c{2};
  const auto ws = shuffle_words(ab, c);
  const std::multiset<Word> got(ws.begin(), ws.end());
  const std::multiset<Word> want{{0, 1, 2}, {0, 2, 1}, {2, 0, 1}};
  CHECK(got == want);
}

TEST_CASE("shuffle keeps multiplicity of repeated letters") {
  const Word a{0};
  const auto ws = shuffle_words(a, a);
  CHECK(ws.size() == 2);
  ExactElement e = shuffle(ExactElement::letter(0), ExactElement::letter(0));
  CHECK(e.coefficient({0, 0}) == Rational(2));
}

TEST_CASE("shuffle count is binomial") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const Word u = random_word(rng, 4, 3), v = random_word(rng, 4, 3);
    CHECK(shuffle_words(u, v).size() == binomial(u.size() + v.size(), u.size()));
  }
}

TEST_CASE("empty word is the shuffle unit") {
  const Word w{0, 1, 1};
  const auto ws = shuffle_words(w, {});
  REQUIRE(ws.size() == 1);
  CHECK(ws[0] == w);
}

TEST_CASE("shuffle is commutative and associative") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const ExactElement a = random_element(rng), b = random_element(rng), c = random_element(rng);
    CHECK(shuffle(a, b) == shuffle(b, a));
    CHECK(shuffle(shuffle(a, b), c) == shuffle(a, shuffle(b, c)));
  }
}

TEST_CASE("concatenation is associative and distributes") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 30; ++trial) {
    const ExactElement a = random_element(rng), b = random_element(rng), c = random_element(rng);
    CHECK((a * b) * c == a * (b * c));
    CHECK(a * (b + c) == a * b + a * c);
    CHECK(ExactElement::unit() * a == a);
  }
}

TEST_CASE("deconcatenations split at every position") {
  const Word w{0, 1, 2};
  const auto d = deconcatenations(w);
  REQUIRE(d.size() == 4);
  for (std::size_t j = 0; j < d.size(); ++j) {
    CHECK(d[j].first.size() == j);
    Word joined = d[j].first;
    joined.insert(joined.end(), d[j].second.begin(), d[j].second.end());
    CHECK(joined == w);
  }
}

TEST_CASE("signed reversal") {
  const SignedWord r = reverse_signed({0, 1, 2});
  CHECK(r.sign == -1);
  CHECK(r.word == Word{2, 1, 0});
  CHECK(reverse_signed({}).sign == 1);
  CHECK(reverse_signed({3, 4}).sign == 1);
}

TEST_CASE("zero coefficients are dropped") {
  ExactElement e = ExactElement::letter(0, Rational(1, 2));
  e.add_term({0}, Rational(-1, 2));
  CHECK(e.is_zero());
  CHECK(e.degree() == -1);
  CHECK((ExactElement::letter(1) - ExactElement::letter(1)).is_zero());
}

TEST_CASE("homogeneous parts and degree") {
  ExactElement e = ExactElement::unit() + ExactElement::word({0, 1}) + ExactElement::letter(2, Rational(3));
  CHECK(e.degree() == 2);
  CHECK(e.homogeneous(1) == ExactElement::letter(2, Rational(3)));
  CHECK(e.homogeneous(0) == ExactElement::unit());
}

TEST_CASE("rational arithmetic stays reduced and reports overflow") {
  CHECK(Rational(2, 4) == Rational(1, 2));
  CHECK(Rational(1, 3) + Rational(1, 6) == Rational(1, 2));
  CHECK(Rational(1, -2).den() > 0);
  CHECK_THROWS_AS(Rational(1, 0), ArithmeticError);
  const Rational big(INT64_MAX);
  CHECK_THROWS_AS(big * big, ArithmeticError);
}

TEST_CASE("json round trip is bit exact") {
  SymbolRegistry reg;
  const SymbolId a = reg.intern("a").id, b = reg.intern("b").id;
  AlgebraElement e = AlgebraElement::word({a, b}, Complex(0.1, -1.0 / 3.0));
  e.add_term({}, Complex(2.0 / 7.0, 0.0));
  SymbolRegistry other;
  const AlgebraElement back = element_from_json(to_json(e, reg), other);
  CHECK(to_json(back, other) == to_json(e, reg));
  CHECK(back.coefficient({other.find("a")->id, other.find("b")->id}) == Complex(0.1, -1.0 / 3.0));
}

TEST_CASE("exact to floating conversion") {
  const AlgebraElement f = to_floating(ExactElement::letter(0, Rational(1, 4)));
  CHECK(f.coefficient({0}) == Complex(0.25, 0.0));
}
