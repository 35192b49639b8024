#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "piola/dual.hpp"

namespace piola {

enum class ExprKind { Const, Var, Add, Sub, Mul, Div, Neg, Pow, Sin, Cos, Exp, Log, Sqrt };

namespace detail {
struct Node;
struct ExprAccess;
}

/// Immutable scalar expression over chart coordinates x0, x1, ...
///
/// Nodes are shared, so copying an Expr is cheap and subtrees produced by
/// `diff` reuse the original tree.
class Expr {
 public:
  Expr();  // the constant 0

  static Expr constant(double value);
  static Expr variable(int index);
  static Expr unary(ExprKind kind, Expr operand);
  static Expr binary(ExprKind kind, Expr lhs, Expr rhs);
  static Expr power(Expr base, int exponent);

  ExprKind kind() const;
  double const_value() const;  // Const only
  int var_index() const;       // Var only
  int exponent() const;        // Pow only
  Expr lhs() const;  // operand of unary nodes, left child of binary nodes and Pow
  Expr rhs() const;  // right child of binary nodes

  bool is_constant(double v) const;
  /// Highest variable index referenced, or -1 for closed expressions.
  int max_var_index() const;
  std::size_t node_count() const;

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  friend struct detail::ExprAccess;
  explicit Expr(std::shared_ptr<const detail::Node> node);
  std::shared_ptr<const detail::Node> node_;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr pow(const Expr& base, int exponent);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr exp(const Expr& a);
Expr log(const Expr& a);
Expr sqrt(const Expr& a);

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t offset, const std::string& message);
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses an infix expression over x0..x{dim-1}.
///
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := unary ('^' integer)?
///   unary  := '-'? atom
///   atom   := number | ident | func '(' expr ')' | '(' expr ')'
///   ident  := 'x' digits
///   func   := sin | cos | exp | log | sqrt
///
/// The exponent integer may carry a leading '-'.
Expr parse(std::string_view text, int dim);

/// Renders an expression that parses back to the identical tree.
std::string unparse(const Expr& e);

double eval(const Expr& e, std::span<const double> point);

/// Evaluates over dual numbers: the derivative component is the directional
/// derivative of `e` along `direction`.
Dual eval_dual(const Expr& e, std::span<const double> point, std::span<const double> direction);

/// Evaluates with an arbitrary dual seed per coordinate.
Dual eval_dual(const Expr& e, std::span<const Dual> point);

/// Exact symbolic partial derivative with respect to coordinate `var`.
/// Zero subtrees are pruned; no other simplification is performed.
Expr diff(const Expr& e, int var);

}  // namespace piola
