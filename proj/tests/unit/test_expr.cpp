#include <doctest.h>

#include <array>
#include <cmath>

#include "piola/expr.hpp"

using namespace piola;

namespace {
double at(const Expr& e, double a, double b) {
  const std::array<double, 2> p{a, b};
  return eval(e, p);
}
}  // namespace

TEST_CASE("parse respects precedence and associativity") {
  CHECK(at(parse("1 + 2 * 3", 2), 0, 0) == 7.0);
  CHECK(at(parse("(1 + 2) * 3", 2), 0, 0) == 9.0);
  CHECK(at(parse("8 / 4 / 2", 2), 0, 0) == 1.0);
  CHECK(at(parse("5 - 3 - 1", 2), 0, 0) == 1.0);
  // Unary minus binds to the atom before '^' applies.
  CHECK(at(parse("-x0^2", 2), 3, 0) == 9.0);
  CHECK(at(parse("-(x0^2)", 2), 3, 0) == -9.0);
  CHECK(at(parse("2*x1^3", 2), 0, 2) == 16.0);
  CHECK(at(parse("x0^-2", 2), 2, 0) == doctest::Approx(0.25));
  CHECK(at(parse("1.5e-1 + x1", 2), 0, 1) == doctest::Approx(1.15));
}

TEST_CASE("elementary functions evaluate like <cmath>") {
  CHECK(at(parse("sin(x0)*cos(x1)", 2), 0.3, 0.7) == std::sin(0.3) * std::cos(0.7));
  CHECK(at(parse("exp(x0) + log(x1)", 2), 0.3, 0.7) == std::exp(0.3) + std::log(0.7));
  CHECK(at(parse("sqrt(x0*x0 + x1*x1)", 2), 3, 4) == 5.0);
}

TEST_CASE("parse errors carry the offset") {
  try {
    parse("x0 + * x1", 2);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 5);
  }
  CHECK_THROWS_AS(parse("x2", 2), ParseError);
  CHECK_THROWS_AS(parse("tan(x0)", 2), ParseError);
  CHECK_THROWS_AS(parse("(x0", 2), ParseError);
  CHECK_THROWS_AS(parse("x0^1.5", 2), ParseError);
  CHECK_THROWS_AS(parse("", 2), ParseError);
}

TEST_CASE("domain errors at evaluation") {
  CHECK_THROWS_AS(at(parse("log(x0)", 2), -1, 0), EvalError);
  CHECK_THROWS_AS(at(parse("sqrt(x0)", 2), -1, 0), EvalError);
  CHECK_THROWS_AS(at(parse("1/x0", 2), 0, 0), EvalError);
}

TEST_CASE("unparse round-trips to the identical tree") {
  for (const char* text : {"x0 + 0.3*sin(x1)", "-(x0 - x1)^3 / (1 + x0^2)", "exp(-x1)*sqrt(2 + cos(x0))", "x0^-2 - -x1",
                           "4/(1 + x0^2 + x1^2)^2", "1e-300 + 0.1"}) {
    const Expr e = parse(text, 2);
    CHECK(parse(unparse(e), 2) == e);
  }
}

TEST_CASE("symbolic derivative agrees with dual evaluation and central differences") {
  const Expr e = parse("sin(x0*x1) + x0^3/(2 + cos(x1)) + exp(-x0)*sqrt(1 + x1^2) - log(3 + x0)", 2);
  const std::array<double, 2> p{0.4, -0.9};
  for (int var = 0; var < 2; ++var) {
    const Expr de = diff(e, var);
    std::array<double, 2> dir{0, 0};
    dir[static_cast<std::size_t>(var)] = 1;
    const Dual d = eval_dual(e, p, dir);
    CHECK(d.value == eval(e, p));
    CHECK(eval(de, p) == doctest::Approx(d.deriv).epsilon(1e-14));
    const double h = 1e-5;
    auto q = p;
    q[static_cast<std::size_t>(var)] += h;
    const double fp = eval(e, q);
    q[static_cast<std::size_t>(var)] -= 2 * h;
    const double fm = eval(e, q);
    CHECK(eval(de, p) == doctest::Approx((fp - fm) / (2 * h)).epsilon(1e-8));
  }
}

TEST_CASE("derivatives prune zero subtrees") {
  CHECK(diff(parse("x0^2 + 3", 2), 1).is_constant(0.0));
  CHECK(diff(parse("sin(x1)", 2), 0).is_constant(0.0));
  CHECK(parse("x0*x1", 2).max_var_index() == 1);
  CHECK(parse("2 + 3", 2).max_var_index() == -1);
}
