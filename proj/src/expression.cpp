#include "regbf/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

#include "regbf/errors.hpp"

namespace regbf {

enum class Op { Const, Var, Neg, Add, Sub, Mul, Div, Pow, Sqrt, Atan, Exp, Abs, Tanh, Log };

struct Expression::Node {
  Op op;
  double value{0.0};
  int index{0};
  int lhs{-1};
  int rhs{-1};
};

namespace {

struct Dual {
  double v;
  double d;
};

Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.d + b.d}; }
Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.d - b.d}; }
Dual operator*(Dual a, Dual b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
Dual operator/(Dual a, Dual b) { return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)}; }

double lift(double v, double) { return v; }
Dual lift(double v, Dual) { return {v, 0.0}; }

double fneg(double a) { return -a; }
Dual fneg(Dual a) { return {-a.v, -a.d}; }
double fsqrt(double a) { return std::sqrt(a); }
Dual fsqrt(Dual a) {
  const double r = std::sqrt(a.v);
  return {r, a.d / (2.0 * r)};
}
double fatan(double a) { return std::atan(a); }
Dual fatan(Dual a) { return {std::atan(a.v), a.d / (1.0 + a.v * a.v)}; }
double fexp(double a) { return std::exp(a); }
Dual fexp(Dual a) {
  const double e = std::exp(a.v);
  return {e, e * a.d};
}
double fabs_(double a) { return std::abs(a); }
Dual fabs_(Dual a) { return {std::abs(a.v), a.v >= 0.0 ? a.d : -a.d}; }
double ftanh(double a) { return std::tanh(a); }
Dual ftanh(Dual a) {
  const double t = std::tanh(a.v);
  return {t, (1.0 - t * t) * a.d};
}
double flog(double a) { return std::log(a); }
Dual flog(Dual a) { return {std::log(a.v), a.d / a.v}; }

double fpow(double a, double b) { return std::pow(a, b); }
Dual fpow(Dual a, Dual b) {
  const double p = std::pow(a.v, b.v);
  double d = 0.0;
  if (a.d != 0.0) d += b.v * std::pow(a.v, b.v - 1.0) * a.d;
  if (b.d != 0.0) d += p * std::log(a.v) * b.d;
  return {p, d};
}

template <class T>
T eval_node(const std::vector<Expression::Node>& nodes, int i, std::span<const T> vars) {
  const auto& n = nodes[static_cast<std::size_t>(i)];
  const T zero = lift(0.0, T{});
  switch (n.op) {
    case Op::Const: return lift(n.value, zero);
    case Op::Var: return vars[static_cast<std::size_t>(n.index)];
    case Op::Neg: return fneg(eval_node(nodes, n.lhs, vars));
    case Op::Add: return eval_node(nodes, n.lhs, vars) + eval_node(nodes, n.rhs, vars);
    case Op::Sub: return eval_node(nodes, n.lhs, vars) - eval_node(nodes, n.rhs, vars);
    case Op::Mul: return eval_node(nodes, n.lhs, vars) * eval_node(nodes, n.rhs, vars);
    case Op::Div: return eval_node(nodes, n.lhs, vars) / eval_node(nodes, n.rhs, vars);
    case Op::Pow: return fpow(eval_node(nodes, n.lhs, vars), eval_node(nodes, n.rhs, vars));
    case Op::Sqrt: return fsqrt(eval_node(nodes, n.lhs, vars));
    case Op::Atan: return fatan(eval_node(nodes, n.lhs, vars));
    case Op::Exp: return fexp(eval_node(nodes, n.lhs, vars));
    case Op::Abs: return fabs_(eval_node(nodes, n.lhs, vars));
    case Op::Tanh: return ftanh(eval_node(nodes, n.lhs, vars));
    case Op::Log: return flog(eval_node(nodes, n.lhs, vars));
  }
  return zero;
}

class Parser {
 public:
  Parser(std::string_view text, const std::vector<std::string>& vars, std::vector<Expression::Node>& out)
      : text_(text), vars_(vars), nodes_(out) {}

  int parse() {
    const int root = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    return root;
  }

 private:
  std::string_view text_;
  const std::vector<std::string>& vars_;
  std::vector<Expression::Node>& nodes_;
  std::size_t pos_{0};

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

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

  int push(Expression::Node n) {
    nodes_.push_back(n);
    return static_cast<int>(nodes_.size()) - 1;
  }

  int expr() {
    int lhs = term();
    for (;;) {
      if (accept('+')) lhs = push({Op::Add, 0.0, 0, lhs, term()});
      else if (accept('-')) lhs = push({Op::Sub, 0.0, 0, lhs, term()});
      else return lhs;
    }
  }

  int term() {
    int lhs = unary();
    for (;;) {
      if (accept('*')) lhs = push({Op::Mul, 0.0, 0, lhs, unary()});
      else if (accept('/')) lhs = push({Op::Div, 0.0, 0, lhs, unary()});
      else return lhs;
    }
  }

  int unary() {
    if (accept('-')) return push({Op::Neg, 0.0, 0, unary(), -1});
    if (accept('+')) return unary();
    return power();
  }

  int power() {
    const int base = primary();
    if (accept('^')) return push({Op::Pow, 0.0, 0, base, unary()});
    return base;
  }

  int primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      const int inner = expr();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  int number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) ++pos_;
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t q = pos_ + 1;
      if (q < text_.size() && (text_[q] == '+' || text_[q] == '-')) ++q;
      if (q < text_.size() && std::isdigit(static_cast<unsigned char>(text_[q]))) {
        pos_ = q;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      }
    }
    const std::string lit(text_.substr(start, pos_ - start));
    char* end = nullptr;
    const double v = std::strtod(lit.c_str(), &end);
    if (end != lit.c_str() + lit.size()) {
      pos_ = start;
      fail("malformed number '" + lit + "'");
    }
    return push({Op::Const, v, 0, -1, -1});
  }

  int identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    const std::string name(text_.substr(start, pos_ - start));
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      if (vars_[i] == name) return push({Op::Var, 0.0, static_cast<int>(i), -1, -1});
    }
    Op op;
    if (name == "sqrt") op = Op::Sqrt;
    else if (name == "atan") op = Op::Atan;
    else if (name == "exp") op = Op::Exp;
    else if (name == "abs") op = Op::Abs;
    else if (name == "tanh") op = Op::Tanh;
    else if (name == "log") op = Op::Log;
    else if (name == "pi") return push({Op::Const, M_PI, 0, -1, -1});
    else {
      pos_ = start;
      fail("unknown identifier '" + name + "'");
    }
    if (!accept('(')) fail("expected '(' after " + name);
    const int arg = expr();
    if (!accept(')')) fail("expected ')'");
    return push({op, 0.0, 0, arg, -1});
  }
};

}  // namespace

Expression Expression::parse(std::string_view text, std::vector<std::string> variables) {
  Expression e;
  e.text_ = std::string(text);
  e.variables_ = std::move(variables);
  auto nodes = std::make_shared<std::vector<Node>>();
  Parser p(e.text_, e.variables_, *nodes);
  e.root_ = p.parse();
  e.nodes_ = std::move(nodes);
  return e;
}

double Expression::eval(std::span<const double> vars) const {
  if (vars.size() != variables_.size()) throw ConfigError("expression variable count mismatch");
  return eval_node<double>(*nodes_, root_, vars);
}

std::pair<double, double> Expression::eval_with_derivative(std::span<const double> vars,
                                                           std::size_t wrt) const {
  if (vars.size() != variables_.size()) throw ConfigError("expression variable count mismatch");
  std::vector<Dual> dv(vars.size());
  for (std::size_t i = 0; i < vars.size(); ++i) dv[i] = {vars[i], i == wrt ? 1.0 : 0.0};
  const Dual r = eval_node<Dual>(*nodes_, root_, std::span<const Dual>(dv));
  return {r.v, r.d};
}

}  // namespace regbf
