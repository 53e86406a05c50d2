#include "itint/expression.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>

#include "itint/errors.hpp"

namespace itint {

enum class Op { constant, variable, add, sub, mul, div, pow, neg, sin, cos, tan, exp, log, sqrt, atan2 };

struct Expression::Node {
  Op op = Op::constant;
  double value = 0.0;
  int var = 0;
  std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

NodePtr leaf(double v) {
  auto n = std::make_shared<Expression::Node>();
  n->op = Op::constant;
  n->value = v;
  return n;
}

NodePtr var_node(int i) {
  auto n = std::make_shared<Expression::Node>();
  n->op = Op::variable;
  n->var = i;
  return n;
}

bool is_const(const NodePtr& n, double v) { return n->op == Op::constant && n->value == v; }
bool is_const(const NodePtr& n) { return n->op == Op::constant; }

double apply(Op op, double a, double b) {
  switch (op) {
    case Op::add: return a + b;
    case Op::sub: return a - b;
    case Op::mul: return a * b;
    case Op::div: return a / b;
    case Op::pow: return std::pow(a, b);
    case Op::neg: return -a;
    case Op::sin: return std::sin(a);
    case Op::cos: return std::cos(a);
    case Op::tan: return std::tan(a);
    case Op::exp: return std::exp(a);
    case Op::log: return std::log(a);
    case Op::sqrt: return std::sqrt(a);
    case Op::atan2: return std::atan2(a, b);
    default: return 0.0;
  }
}

// Node constructors with light constant folding so derivative trees stay small.
NodePtr make(Op op, NodePtr a, NodePtr b = nullptr) {
  const bool ca = is_const(a);
  const bool cb = b && is_const(b);
  if (ca && (!b || cb)) return leaf(apply(op, a->value, b ? b->value : 0.0));
  switch (op) {
    case Op::add:
      if (is_const(a, 0.0)) return b;
      if (is_const(b, 0.0)) return a;
      break;
    case Op::sub:
      if (is_const(b, 0.0)) return a;
      if (is_const(a, 0.0)) return make(Op::neg, b);
      break;
    case Op::mul:
      if (is_const(a, 0.0) || is_const(b, 0.0)) return leaf(0.0);
      if (is_const(a, 1.0)) return b;
      if (is_const(b, 1.0)) return a;
      break;
    case Op::div:
      if (is_const(a, 0.0)) return leaf(0.0);
      if (is_const(b, 1.0)) return a;
      break;
    case Op::pow:
      if (is_const(b, 1.0)) return a;
      if (is_const(b, 0.0)) return leaf(1.0);
      break;
    case Op::neg:
      if (a->op == Op::neg) return a->a;
      break;
    default:
      break;
  }
  auto n = std::make_shared<Expression::Node>();
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

double eval(const Expression::Node& n, std::span<const double> vars) {
  switch (n.op) {
    case Op::constant: return n.value;
    case Op::variable: return vars[static_cast<std::size_t>(n.var)];
    default: return apply(n.op, eval(*n.a, vars), n.b ? eval(*n.b, vars) : 0.0);
  }
}

NodePtr diff(const NodePtr& n, int v) {
  const auto& a = n->a;
  const auto& b = n->b;
  switch (n->op) {
    case Op::constant: return leaf(0.0);
    case Op::variable: return leaf(n->var == v ? 1.0 : 0.0);
    case Op::add: return make(Op::add, diff(a, v), diff(b, v));
    case Op::sub: return make(Op::sub, diff(a, v), diff(b, v));
    case Op::neg: return make(Op::neg, diff(a, v));
    case Op::mul: return make(Op::add, make(Op::mul, diff(a, v), b), make(Op::mul, a, diff(b, v)));
    case Op::div:
      return make(Op::div, make(Op::sub, make(Op::mul, diff(a, v), b), make(Op::mul, a, diff(b, v))),
                  make(Op::mul, b, b));
    case Op::pow: {
      if (is_const(b)) {
        return make(Op::mul, make(Op::mul, b, make(Op::pow, a, leaf(b->value - 1.0))), diff(a, v));
      }
      // d(a^b) = a^b (b' log a + b a'/a)
      return make(Op::mul, n,
                  make(Op::add, make(Op::mul, diff(b, v), make(Op::log, a)),
                       make(Op::div, make(Op::mul, b, diff(a, v)), a)));
    }
    case Op::sin: return make(Op::mul, make(Op::cos, a), diff(a, v));
    case Op::cos: return make(Op::neg, make(Op::mul, make(Op::sin, a), diff(a, v)));
    case Op::tan:
      return make(Op::div, diff(a, v), make(Op::mul, make(Op::cos, a), make(Op::cos, a)));
    case Op::exp: return make(Op::mul, n, diff(a, v));
    case Op::log: return make(Op::div, diff(a, v), a);
    case Op::sqrt: return make(Op::div, diff(a, v), make(Op::mul, leaf(2.0), n));
    case Op::atan2: {
      // atan2(y, x): (x dy - y dx) / (x^2 + y^2)
      auto den = make(Op::add, make(Op::mul, a, a), make(Op::mul, b, b));
      return make(Op::div, make(Op::sub, make(Op::mul, b, diff(a, v)), make(Op::mul, a, diff(b, v))), den);
    }
  }
  return leaf(0.0);
}

const char* op_name(Op op) {
  switch (op) {
    case Op::sin: return "sin";
    case Op::cos: return "cos";
    case Op::tan: return "tan";
    case Op::exp: return "exp";
    case Op::log: return "log";
    case Op::sqrt: return "sqrt";
    case Op::atan2: return "atan2";
    case Op::add: return "+";
    case Op::sub: return "-";
    case Op::mul: return "*";
    case Op::div: return "/";
    case Op::pow: return "^";
    default: return "?";
  }
}

void print(std::ostream& os, const Expression::Node& n) {
  switch (n.op) {
    case Op::constant: os << n.value; return;
    case Op::variable: os << "x" << (n.var + 1); return;
    case Op::neg: os << "(-"; print(os, *n.a); os << ")"; return;
    case Op::add: case Op::sub: case Op::mul: case Op::div: case Op::pow:
      os << "(";
      print(os, *n.a);
      os << op_name(n.op);
      print(os, *n.b);
      os << ")";
      return;
    case Op::atan2:
      os << "atan2(";
      print(os, *n.a);
      os << ",";
      print(os, *n.b);
      os << ")";
      return;
    default:
      os << op_name(n.op) << "(";
      print(os, *n.a);
      os << ")";
  }
}

class Parser {
 public:
  Parser(std::string_view text, const Expression::VariableNames& vars) : s_(text), vars_(vars) {}

  NodePtr parse() {
    NodePtr n = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg + " at column " + std::to_string(pos_ + 1) + " in '" + std::string(s_) + "'");
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr n = term();
    while (true) {
      if (eat('+'))
        n = make(Op::add, n, term());
      else if (eat('-'))
        n = make(Op::sub, n, term());
      else
        return n;
    }
  }
  NodePtr term() {
    NodePtr n = unary();
    while (true) {
      if (eat('*'))
        n = make(Op::mul, n, unary());
      else if (eat('/'))
        n = make(Op::div, n, unary());
      else
        return n;
    }
  }
  NodePtr unary() {
    if (eat('-')) return make(Op::neg, unary());
    if (eat('+')) return unary();
    return power();
  }
  NodePtr power() {
    NodePtr base = primary();
    if (eat('^')) return make(Op::pow, base, unary());
    return base;
  }
  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr n = expr();
      if (!eat(')')) fail("expected ')'");
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail("unexpected '" + std::string(1, c) + "'");
  }
  NodePtr number() {
    const std::string rest(s_.substr(pos_));
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(rest, &used);
    } catch (const std::exception&) {
      fail("malformed number");
    }
    pos_ += used;
    return leaf(v);
  }
  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    const std::string name(s_.substr(start, pos_ - start));
    skip();
    if (pos_ < s_.size() && s_[pos_] == '(') {
      ++pos_;
      NodePtr a = expr();
      NodePtr b;
      if (name == "atan2") {
        if (!eat(',')) fail("atan2 needs two arguments");
        b = expr();
      }
      if (!eat(')')) fail("expected ')' after arguments of " + name);
      static const std::pair<const char*, Op> fns[] = {{"sin", Op::sin},   {"cos", Op::cos}, {"tan", Op::tan},
                                                       {"exp", Op::exp},   {"log", Op::log}, {"sqrt", Op::sqrt},
                                                       {"atan2", Op::atan2}};
      for (const auto& [fname, op] : fns)
        if (name == fname) return make(op, a, b);
      fail("unknown function '" + name + "'");
    }
    if (name == "pi") return leaf(std::numbers::pi);
    if (name == "e") return leaf(std::numbers::e);
    for (std::size_t i = 0; i < vars_.size(); ++i)
      for (const auto& spelling : vars_[i])
        if (spelling == name) return var_node(static_cast<int>(i));
    fail("unknown variable '" + name + "'");
  }

  std::string_view s_;
  const Expression::VariableNames& vars_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression Expression::parse(std::string_view text, const VariableNames& variables) {
  return Expression(Parser(text, variables).parse());
}

Expression Expression::constant(double c) { return Expression(leaf(c)); }
Expression Expression::variable(int index) { return Expression(var_node(index)); }

Expression::VariableNames Expression::coordinate_names(std::size_t dim) {
  static const char* aliases[] = {"x", "y", "z"};
  VariableNames names(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    names[i].push_back("x" + std::to_string(i + 1));
    if (i < 3) names[i].emplace_back(aliases[i]);
  }
  return names;
}

double Expression::operator()(std::span<const double> vars) const { return eval(*root_, vars); }

Expression Expression::derivative(int var) const { return Expression(diff(root_, var)); }

bool Expression::is_constant() const { return root_->op == Op::constant; }

std::string Expression::str() const {
  std::ostringstream os;
  os.precision(17);
  print(os, *root_);
  return os.str();
}

}  // namespace itint
