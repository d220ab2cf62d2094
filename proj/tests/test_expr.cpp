#include <doctest.h>

#include <cmath>

#include "varistab/errors.hpp"
#include "varistab/expr.hpp"

using namespace varistab;

TEST_CASE("evaluation") {
  CHECK(Expr::parse("x - p", 1, 1)({2}, {5}) == doctest::Approx(3));
  CHECK(Expr::parse("2*x^2 + -3*p + 1", 1, 1)({1}, {2}) == doctest::Approx(6));
  CHECK(Expr::parse("abs(x1 - x2)", 1, 2)({0}, {1, 4}) == doctest::Approx(3));
  CHECK(Expr::parse("sqrt_abs(p)", 1, 1)({-4}, {0}) == doctest::Approx(2));
  CHECK(Expr::parse("max(x, -2*x, 0.5)", 1, 1)({0}, {-1}) == doctest::Approx(2));
  CHECK(Expr::parse("min(x, p)", 1, 1)({-1}, {1}) == doctest::Approx(-1));
  CHECK(Expr::parse("(x + p)*(x - p)", 1, 1)({1}, {3}) == doctest::Approx(8));
  CHECK(Expr::parse("1.5e-1", 1, 1)({0}, {0}) == doctest::Approx(0.15));
}

TEST_CASE("degree tracking and the degree cap") {
  CHECK(Expr::parse("x^2*p^2", 1, 1).degree() == 4);
  CHECK(Expr::parse("abs(x)^3", 1, 1).degree() == 3);
  CHECK(Expr::parse("7", 1, 1).degree() == 0);
  CHECK_THROWS_AS(Expr::parse("x^5", 1, 1), ContractViolation);
  CHECK_THROWS_AS(Expr::parse("x^3*x^2", 1, 1), ContractViolation);
  CHECK_THROWS_AS(Expr::parse("(x*x)^3", 1, 1), ContractViolation);
}

TEST_CASE("syntax and name errors carry a position") {
  CHECK_THROWS_AS(Expr::parse("x +", 1, 1), ContractViolation);
  CHECK_THROWS_AS(Expr::parse("exp(x)", 1, 1), ContractViolation);
  CHECK_THROWS_AS(Expr::parse("x3", 1, 2), ContractViolation);
  CHECK_THROWS_AS(Expr::parse("x0", 1, 1), ContractViolation);
  CHECK_THROWS_AS(Expr::parse("min(x)", 1, 1), ContractViolation);
  CHECK_THROWS_AS(Expr::parse("abs(x, p)", 1, 1), ContractViolation);
  try {
    Expr::parse("x + ) ", 1, 1);
  } catch (const ContractViolation& e) {
    CHECK(std::string(e.what()).find("position 4") != std::string::npos);
  }
}

TEST_CASE("finite-difference Jacobian") {
  const std::vector<Expr> rows{Expr::parse("x1*x2 - p", 1, 2), Expr::parse("x1^3", 1, 2)};
  const Matrix j = expr_jacobian(rows, {0}, {2, 3});
  CHECK(j[0][0] == doctest::Approx(3).epsilon(1e-6));
  CHECK(j[0][1] == doctest::Approx(2).epsilon(1e-6));
  CHECK(j[1][0] == doctest::Approx(12).epsilon(1e-6));
  CHECK(j[1][1] == doctest::Approx(0).epsilon(1e-6));
}
