#include "piola/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <string>
#include <system_error>
#include <vector>

namespace piola {

namespace detail {
struct Node {
  ExprKind kind = ExprKind::Const;
  double value = 0.0;
  int integer = 0;  // variable index or exponent
  std::shared_ptr<const Node> a;
  std::shared_ptr<const Node> b;
};
}  // namespace detail

using detail::Node;
using NodePtr = std::shared_ptr<const Node>;

namespace {

const char* func_name(ExprKind k) {
  switch (k) {
    case ExprKind::Sin: return "sin";
    case ExprKind::Cos: return "cos";
    case ExprKind::Exp: return "exp";
    case ExprKind::Log: return "log";
    case ExprKind::Sqrt: return "sqrt";
    default: return nullptr;
  }
}

bool is_unary(ExprKind k) { return k == ExprKind::Neg || func_name(k) != nullptr; }

bool is_binary(ExprKind k) {
  return k == ExprKind::Add || k == ExprKind::Sub || k == ExprKind::Mul || k == ExprKind::Div;
}

NodePtr make_node(ExprKind kind, double value, int integer, NodePtr a, NodePtr b) {
  return std::make_shared<const Node>(Node{kind, value, integer, std::move(a), std::move(b)});
}

const NodePtr& zero_node() {
  static const NodePtr node = make_node(ExprKind::Const, 0.0, 0, nullptr, nullptr);
  return node;
}

}  // namespace

// ---------------------------------------------------------------------------
// Construction and inspection

Expr::Expr() : node_(zero_node()) {}
Expr::Expr(std::shared_ptr<const detail::Node> node) : node_(std::move(node)) {}

Expr Expr::constant(double value) {
  if (value == 0.0) return Expr();
  return Expr(make_node(ExprKind::Const, value, 0, nullptr, nullptr));
}

Expr Expr::variable(int index) {
  if (index < 0) throw std::invalid_argument("variable index must be non-negative");
  return Expr(make_node(ExprKind::Var, 0.0, index, nullptr, nullptr));
}

Expr Expr::unary(ExprKind kind, Expr operand) {
  if (!is_unary(kind)) throw std::invalid_argument("Expr::unary: not a unary kind");
  return Expr(make_node(kind, 0.0, 0, std::move(operand.node_), nullptr));
}

Expr Expr::binary(ExprKind kind, Expr lhs, Expr rhs) {
  if (!is_binary(kind)) throw std::invalid_argument("Expr::binary: not a binary kind");
  return Expr(make_node(kind, 0.0, 0, std::move(lhs.node_), std::move(rhs.node_)));
}

Expr Expr::power(Expr base, int exponent) {
  return Expr(make_node(ExprKind::Pow, 0.0, exponent, std::move(base.node_), nullptr));
}

ExprKind Expr::kind() const { return node_->kind; }
double Expr::const_value() const { return node_->value; }
int Expr::var_index() const { return node_->integer; }
int Expr::exponent() const { return node_->integer; }
Expr Expr::lhs() const { return Expr(node_->a); }
Expr Expr::rhs() const { return Expr(node_->b); }

bool Expr::is_constant(double v) const { return node_->kind == ExprKind::Const && node_->value == v; }

namespace {
int max_var(const Node& n) {
  switch (n.kind) {
    case ExprKind::Const: return -1;
    case ExprKind::Var: return n.integer;
    default: {
      int m = n.a ? max_var(*n.a) : -1;
      if (n.b) m = std::max(m, max_var(*n.b));
      return m;
    }
  }
}

std::size_t count_nodes(const Node& n) {
  std::size_t c = 1;
  if (n.a) c += count_nodes(*n.a);
  if (n.b) c += count_nodes(*n.b);
  return c;
}

bool same_tree(const Node* x, const Node* y) {
  if (x == y) return true;
  if (!x || !y) return false;
  if (x->kind != y->kind) return false;
  switch (x->kind) {
    case ExprKind::Const: return x->value == y->value;
    case ExprKind::Var: return x->integer == y->integer;
    case ExprKind::Pow: return x->integer == y->integer && same_tree(x->a.get(), y->a.get());
    default: return same_tree(x->a.get(), y->a.get()) && same_tree(x->b.get(), y->b.get());
  }
}
}  // namespace

int Expr::max_var_index() const { return max_var(*node_); }
std::size_t Expr::node_count() const { return count_nodes(*node_); }
bool operator==(const Expr& a, const Expr& b) { return same_tree(a.node_.get(), b.node_.get()); }

Expr operator+(const Expr& a, const Expr& b) { return Expr::binary(ExprKind::Add, a, b); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::binary(ExprKind::Sub, a, b); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::binary(ExprKind::Mul, a, b); }
Expr operator/(const Expr& a, const Expr& b) { return Expr::binary(ExprKind::Div, a, b); }
Expr operator-(const Expr& a) { return Expr::unary(ExprKind::Neg, a); }
Expr pow(const Expr& base, int exponent) { return Expr::power(base, exponent); }
Expr sin(const Expr& a) { return Expr::unary(ExprKind::Sin, a); }
Expr cos(const Expr& a) { return Expr::unary(ExprKind::Cos, a); }
Expr exp(const Expr& a) { return Expr::unary(ExprKind::Exp, a); }
Expr log(const Expr& a) { return Expr::unary(ExprKind::Log, a); }
Expr sqrt(const Expr& a) { return Expr::unary(ExprKind::Sqrt, a); }

// ---------------------------------------------------------------------------
// Parsing

ParseError::ParseError(std::size_t offset, const std::string& message)
    : std::runtime_error(message + " at offset " + std::to_string(offset)), offset_(offset) {}

namespace {

class Parser {
 public:
  Parser(std::string_view text, int dim) : text_(text), dim_(dim) {}

  Expr run() {
    Expr e = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(pos_, msg); }
  [[noreturn]] void fail_at(std::size_t at, const std::string& msg) const { throw ParseError(at, msg); }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= text_.size()) fail(std::string("expected '") + c + "' but reached end of input");
      fail(std::string("expected '") + c + "'");
    }
  }

  Expr expr() {
    Expr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = lhs + term();
      } else if (accept('-')) {
        lhs = lhs - term();
      } else {
        return lhs;
      }
    }
  }

  Expr term() {
    Expr lhs = factor();
    for (;;) {
      if (accept('*')) {
        lhs = lhs * factor();
      } else if (accept('/')) {
        lhs = lhs / factor();
      } else {
        return lhs;
      }
    }
  }

  Expr factor() {
    Expr base = unary();
    if (accept('^')) {
      skip_ws();
      const std::size_t start = pos_;
      bool negative = false;
      if (pos_ < text_.size() && text_[pos_] == '-') {
        negative = true;
        ++pos_;
      }
      const std::size_t digits = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (pos_ == digits) fail_at(start, "expected integer exponent");
      int n = 0;
      auto [ptr, ec] = std::from_chars(text_.data() + digits, text_.data() + pos_, n);
      if (ec != std::errc()) fail_at(start, "exponent out of range");
      return pow(base, negative ? -n : n);
    }
    return base;
  }

  Expr unary() {
    if (accept('-')) return -atom();
    return atom();
  }

  Expr atom() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr inner = expr();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  Expr number() {
    const std::size_t start = pos_;
    auto is_digit = [&](std::size_t i) {
      return i < text_.size() && std::isdigit(static_cast<unsigned char>(text_[i]));
    };
    while (is_digit(pos_)) ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (is_digit(pos_)) ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) ++look;
      if (is_digit(look)) {
        pos_ = look;
        while (is_digit(pos_)) ++pos_;
      }
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (ec != std::errc() || ptr != text_.data() + pos_) fail_at(start, "malformed number");
    return Expr::constant(value);
  }

  Expr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    const std::string_view name = text_.substr(start, pos_ - start);

    static constexpr std::pair<std::string_view, ExprKind> funcs[] = {
        {"sin", ExprKind::Sin}, {"cos", ExprKind::Cos}, {"exp", ExprKind::Exp},
        {"log", ExprKind::Log}, {"sqrt", ExprKind::Sqrt}};
    for (const auto& [fname, kind] : funcs) {
      if (name == fname) {
        expect('(');
        Expr arg = expr();
        expect(')');
        return Expr::unary(kind, arg);
      }
    }

    if (name.size() >= 2 && name[0] == 'x' &&
        std::all_of(name.begin() + 1, name.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); })) {
      int index = 0;
      auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), index);
      if (ec != std::errc() || index >= dim_) fail_at(start, "variable index out of range");
      return Expr::variable(index);
    }
    fail_at(start, "unknown identifier '" + std::string(name) + "'");
  }

  std::string_view text_;
  int dim_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse(std::string_view text, int dim) {
  if (dim < 0) throw std::invalid_argument("parse: negative dimension");
  return Parser(text, dim).run();
}

// ---------------------------------------------------------------------------
// Unparsing

namespace {

void write_number(std::string& out, double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

void write(std::string& out, const Node& n) {
  switch (n.kind) {
    case ExprKind::Const:
      // A leading minus would parse as Neg, so negative literals are bracketed
      // as a subtraction from zero. diff never emits them.
      if (std::signbit(n.value)) {
        out += "(0-";
        write_number(out, -n.value);
        out += ")";
      } else {
        write_number(out, n.value);
      }
      return;
    case ExprKind::Var:
      out += 'x';
      out += std::to_string(n.integer);
      return;
    case ExprKind::Neg:
      out += "-(";
      write(out, *n.a);
      out += ")";
      return;
    case ExprKind::Pow:
      out += "(";
      write(out, *n.a);
      out += ")^";
      out += std::to_string(n.integer);
      return;
    case ExprKind::Add:
    case ExprKind::Sub:
    case ExprKind::Mul:
    case ExprKind::Div: {
      static constexpr char ops[] = {'+', '-', '*', '/'};
      const char op = ops[static_cast<int>(n.kind) - static_cast<int>(ExprKind::Add)];
      out += "(";
      write(out, *n.a);
      out += ' ';
      out += op;
      out += ' ';
      write(out, *n.b);
      out += ")";
      return;
    }
    default:
      out += func_name(n.kind);
      out += "(";
      write(out, *n.a);
      out += ")";
      return;
  }
}

std::string unparse_node(const Node& n) {
  std::string out;
  write(out, n);
  return out;
}

}  // namespace

namespace detail {
struct ExprAccess {
  static const Node& node(const Expr& e) { return *e.node_; }
  static Expr wrap(NodePtr n) { return Expr(std::move(n)); }
};
}  // namespace detail

using detail::ExprAccess;

std::string unparse(const Expr& e) { return unparse_node(ExprAccess::node(e)); }

// ---------------------------------------------------------------------------
// Evaluation

namespace {

template <class S>
S evaluate(const Node& n, std::span<const S> p) {
  using std::cos;
  using std::exp;
  using std::log;
  using std::sin;
  using std::sqrt;
  switch (n.kind) {
    case ExprKind::Const: return S(n.value);
    case ExprKind::Var:
      if (static_cast<std::size_t>(n.integer) >= p.size())
        throw EvalError("variable x" + std::to_string(n.integer) + " outside point of dimension " +
                        std::to_string(p.size()));
      return p[static_cast<std::size_t>(n.integer)];
    case ExprKind::Add: return evaluate(*n.a, p) + evaluate(*n.b, p);
    case ExprKind::Sub: return evaluate(*n.a, p) - evaluate(*n.b, p);
    case ExprKind::Mul: return evaluate(*n.a, p) * evaluate(*n.b, p);
    case ExprKind::Div: {
      const S den = evaluate(*n.b, p);
      if (value_of(den) == 0.0) throw EvalError("division by zero in " + unparse_node(n));
      return evaluate(*n.a, p) / den;
    }
    case ExprKind::Neg: return -evaluate(*n.a, p);
    case ExprKind::Pow: {
      const S base = evaluate(*n.a, p);
      if (n.integer < 0 && value_of(base) == 0.0)
        throw EvalError("division by zero in " + unparse_node(n));
      return ipow(base, n.integer);
    }
    case ExprKind::Sin: return sin(evaluate(*n.a, p));
    case ExprKind::Cos: return cos(evaluate(*n.a, p));
    case ExprKind::Exp: return exp(evaluate(*n.a, p));
    case ExprKind::Log: {
      const S arg = evaluate(*n.a, p);
      if (!(value_of(arg) > 0.0)) throw EvalError("log of non-positive value in " + unparse_node(n));
      return log(arg);
    }
    case ExprKind::Sqrt: {
      const S arg = evaluate(*n.a, p);
      if (value_of(arg) < 0.0) throw EvalError("sqrt of negative value in " + unparse_node(n));
      return sqrt(arg);
    }
  }
  throw EvalError("corrupt expression node");
}

}  // namespace

double eval(const Expr& e, std::span<const double> point) {
  return evaluate<double>(ExprAccess::node(e), point);
}

Dual eval_dual(const Expr& e, std::span<const Dual> point) {
  return evaluate<Dual>(ExprAccess::node(e), point);
}

Dual eval_dual(const Expr& e, std::span<const double> point, std::span<const double> direction) {
  if (point.size() != direction.size()) throw std::invalid_argument("eval_dual: point/direction size mismatch");
  std::vector<Dual> seeded(point.size());
  for (std::size_t i = 0; i < point.size(); ++i) seeded[i] = Dual(point[i], direction[i]);
  return evaluate<Dual>(ExprAccess::node(e), std::span<const Dual>(seeded));
}

// ---------------------------------------------------------------------------
// Symbolic differentiation

namespace {

Expr add(const Expr& a, const Expr& b) {
  if (a.is_constant(0.0)) return b;
  if (b.is_constant(0.0)) return a;
  return a + b;
}

Expr sub(const Expr& a, const Expr& b) {
  if (b.is_constant(0.0)) return a;
  if (a.is_constant(0.0)) return -b;
  return a - b;
}

Expr mul(const Expr& a, const Expr& b) {
  if (a.is_constant(0.0) || b.is_constant(0.0)) return Expr();
  if (a.is_constant(1.0)) return b;
  if (b.is_constant(1.0)) return a;
  return a * b;
}

// Integer coefficient kept non-negative as a literal so unparse stays parseable.
Expr scale(int n, const Expr& e) {
  if (n == 0) return Expr();
  Expr s = mul(Expr::constant(static_cast<double>(n < 0 ? -n : n)), e);
  return n < 0 ? -s : s;
}

}  // namespace

Expr diff(const Expr& e, int var) {
  if (var < 0) throw std::invalid_argument("diff: negative variable index");
  switch (e.kind()) {
    case ExprKind::Const: return Expr();
    case ExprKind::Var: return e.var_index() == var ? Expr::constant(1.0) : Expr();
    case ExprKind::Add: return add(diff(e.lhs(), var), diff(e.rhs(), var));
    case ExprKind::Sub: return sub(diff(e.lhs(), var), diff(e.rhs(), var));
    case ExprKind::Mul: {
      const Expr a = e.lhs(), b = e.rhs();
      return add(mul(diff(a, var), b), mul(a, diff(b, var)));
    }
    case ExprKind::Div: {
      const Expr a = e.lhs(), b = e.rhs();
      const Expr da = diff(a, var), db = diff(b, var);
      Expr first = da.is_constant(0.0) ? Expr() : da / b;
      Expr second = db.is_constant(0.0) ? Expr() : mul(a, db) / pow(b, 2);
      return sub(first, second);
    }
    case ExprKind::Neg: {
      const Expr d = diff(e.lhs(), var);
      return d.is_constant(0.0) ? d : -d;
    }
    case ExprKind::Pow: {
      const int n = e.exponent();
      const Expr d = diff(e.lhs(), var);
      if (n == 0 || d.is_constant(0.0)) return Expr();
      if (n == 1) return d;
      const Expr reduced = (n - 1 == 1) ? e.lhs() : pow(e.lhs(), n - 1);
      return scale(n, mul(reduced, d));
    }
    case ExprKind::Sin: return mul(cos(e.lhs()), diff(e.lhs(), var));
    case ExprKind::Cos: {
      const Expr d = diff(e.lhs(), var);
      return d.is_constant(0.0) ? d : -mul(sin(e.lhs()), d);
    }
    case ExprKind::Exp: return mul(e, diff(e.lhs(), var));
    case ExprKind::Log: {
      const Expr d = diff(e.lhs(), var);
      return d.is_constant(0.0) ? d : d / e.lhs();
    }
    case ExprKind::Sqrt: {
      const Expr d = diff(e.lhs(), var);
      return d.is_constant(0.0) ? d : d / mul(Expr::constant(2.0), e);
    }
  }
  throw std::logic_error("diff: corrupt expression node");
}

}  // namespace piola
