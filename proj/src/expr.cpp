#include "dcu/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

#include "dcu/errors.hpp"

namespace dcu {

namespace {

struct Parser {
  const std::string& src;
  std::size_t pos = 0;
  Expr out;

  explicit Parser(const std::string& s) : src(s) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw InputError("expression error at position " + std::to_string(pos) +
                     ": " + what + " in '" + src + "'");
  }

  void skip_ws() {
    while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
  }

  bool eat(char c) {
    skip_ws();
    if (pos < src.size() && src[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos < src.size() ? src[pos] : '\0';
  }

  int push(Expr::Node n) {
    out.nodes.push_back(n);
    return static_cast<int>(out.nodes.size()) - 1;
  }

  int parse_expr() {
    int lhs = parse_term();
    for (;;) {
      if (eat('+')) {
        lhs = push({Expr::Op::Add, 0.0, lhs, parse_term()});
      } else if (eat('-')) {
        lhs = push({Expr::Op::Sub, 0.0, lhs, parse_term()});
      } else {
        return lhs;
      }
    }
  }

  int parse_term() {
    int lhs = parse_factor();
    for (;;) {
      if (eat('*')) {
        lhs = push({Expr::Op::Mul, 0.0, lhs, parse_factor()});
      } else if (eat('/')) {
        lhs = push({Expr::Op::Div, 0.0, lhs, parse_factor()});
      } else {
        return lhs;
      }
    }
  }

  // '^' binds tighter than unary minus (-x^2 == -(x^2)) and is
  // right-associative; the exponent may carry its own sign (x^-2)
  int parse_factor() {
    if (eat('-')) return push({Expr::Op::Neg, 0.0, parse_factor(), -1});
    return parse_power();
  }

  int parse_power() {
    const int base = parse_primary();
    if (eat('^')) {
      return push({Expr::Op::Pow, 0.0, base, parse_factor()});
    }
    return base;
  }

  int parse_primary() {
    skip_ws();
    if (pos >= src.size()) fail("unexpected end of input");
    const char c = src[pos];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* start = src.c_str() + pos;
      char* end = nullptr;
      const double v = std::strtod(start, &end);
      if (end == start) fail("bad numeric literal");
      pos += static_cast<std::size_t>(end - start);
      return push({Expr::Op::Lit, v, -1, -1});
    }
    if (c == '(') {
      ++pos;
      const int inner = parse_expr();
      if (!eat(')')) fail("missing ')'");
      return inner;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos;
      while (pos < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_')) {
        ++pos;
      }
      const std::string name = src.substr(start, pos - start);
      if (name == "x") return push({Expr::Op::VarX, 0.0, -1, -1});
      if (name == "t") return push({Expr::Op::VarT, 0.0, -1, -1});
      if (name == "pi") return push({Expr::Op::Lit, 3.14159265358979323846, -1, -1});
      if (name == "e") return push({Expr::Op::Lit, 2.71828182845904523536, -1, -1});
      Expr::Op op;
      int arity = 1;
      if (name == "abs") {
        op = Expr::Op::Abs;
      } else if (name == "exp") {
        op = Expr::Op::Exp;
      } else if (name == "ln") {
        op = Expr::Op::Ln;
      } else if (name == "min") {
        op = Expr::Op::Min;
        arity = 2;
      } else if (name == "max") {
        op = Expr::Op::Max;
        arity = 2;
      } else {
        fail("unknown identifier '" + name + "'");
      }
      if (!eat('(')) fail("expected '(' after '" + name + "'");
      const int a = parse_expr();
      int b = -1;
      if (arity == 2) {
        if (!eat(',')) fail("expected ',' in '" + name + "'");
        b = parse_expr();
      }
      if (!eat(')')) fail("missing ')'");
      return push({op, 0.0, a, b});
    }
    fail(std::string("unexpected character '") + c + "'");
  }
};

double eval_node(const std::vector<Expr::Node>& nodes, int id, double x, double t) {
  const Expr::Node& n = nodes[static_cast<std::size_t>(id)];
  switch (n.op) {
    case Expr::Op::Lit: return n.lit;
    case Expr::Op::VarX: return x;
    case Expr::Op::VarT: return t;
    case Expr::Op::Add: return eval_node(nodes, n.a, x, t) + eval_node(nodes, n.b, x, t);
    case Expr::Op::Sub: return eval_node(nodes, n.a, x, t) - eval_node(nodes, n.b, x, t);
    case Expr::Op::Mul: return eval_node(nodes, n.a, x, t) * eval_node(nodes, n.b, x, t);
    case Expr::Op::Div: return eval_node(nodes, n.a, x, t) / eval_node(nodes, n.b, x, t);
    case Expr::Op::Pow: return std::pow(eval_node(nodes, n.a, x, t), eval_node(nodes, n.b, x, t));
    case Expr::Op::Neg: return -eval_node(nodes, n.a, x, t);
    case Expr::Op::Abs: return std::fabs(eval_node(nodes, n.a, x, t));
    case Expr::Op::Exp: return std::exp(eval_node(nodes, n.a, x, t));
    case Expr::Op::Ln: return std::log(eval_node(nodes, n.a, x, t));
    case Expr::Op::Min:
      return std::min(eval_node(nodes, n.a, x, t), eval_node(nodes, n.b, x, t));
    case Expr::Op::Max:
      return std::max(eval_node(nodes, n.a, x, t), eval_node(nodes, n.b, x, t));
  }
  return 0.0;
}

}  // namespace

double Expr::eval(double x, double t) const {
  return eval_node(nodes, root, x, t);
}

bool Expr::uses_t() const {
  for (const Node& n : nodes) {
    if (n.op == Op::VarT) return true;
  }
  return false;
}

Expr parse_expression(const std::string& src) {
  Parser p(src);
  p.out.source = src;
  p.out.root = p.parse_expr();
  p.skip_ws();
  if (p.pos != src.size()) p.fail("trailing input");
  return p.out;
}

}  // namespace dcu
