#pragma once

// Closed-form scalar expressions used by the form, path and cover
// registries: + - * / ^, sin cos tan exp log sqrt atan2, numeric literals,
// the constants pi and e, and named variables. Expressions can be
// differentiated symbolically, which is how registry forms get analytic
// partial derivatives.

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace itint {

class Expression {
 public:
  // variables[i] lists the accepted spellings of variable i.
  using VariableNames = std::vector<std::vector<std::string>>;

  static Expression parse(std::string_view text, const VariableNames& variables);
  static Expression constant(double c);
  static Expression variable(int index);

  // Spellings x1..xn plus x, y, z aliases for the first three coordinates.
  static VariableNames coordinate_names(std::size_t dim);

  double operator()(std::span<const double> vars) const;
  Expression derivative(int var) const;
  bool is_constant() const;
  std::string str() const;

  struct Node;

 private:
  explicit Expression(std::shared_ptr<const Node> root) : root_(std::move(root)) {}
  std::shared_ptr<const Node> root_;
};

}  // namespace itint
