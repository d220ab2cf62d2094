#pragma once

// Small expression language for inline instances: numbers, variables
// p, x, p1.., x1.., operators + - * and ^n (integer n <= 4), parentheses and
// the functions abs, sqrt_abs, min, max. Polynomial degree is capped at 4.

#include <memory>
#include <string>
#include <vector>

#include "varistab/metric.hpp"

namespace varistab {

class Expr {
 public:
  /// Throws ContractViolation with the offending position on syntax errors,
  /// unknown names, variables outside the declared dimensions or degree > 4.
  static Expr parse(const std::string& text, std::size_t p_dim, std::size_t x_dim);

  double operator()(const Vector& p, const Vector& x) const;
  /// Polynomial degree bound (abs, min, max and sqrt_abs keep the degree of
  /// their arguments).
  int degree() const;
  const std::string& text() const { return text_; }

  struct Node;

 private:
  std::shared_ptr<const Node> root_;
  std::string text_;
};

/// Central-difference x-Jacobian of a vector of expressions.
Matrix expr_jacobian(const std::vector<Expr>& rows, const Vector& p, const Vector& x, double h = 1e-6);

}  // namespace varistab
