#pragma once

#include <string>
#include <vector>

namespace dcu {

// Arithmetic over the two variables x and t: +, -, *, /, ^ (right
// associative), unary minus, abs/exp/ln/max/min, numeric literals. Total on
// its domain; evaluation never runs user code. Parse errors carry the
// offending position.
struct Expr {
  enum class Op {
    Lit, VarX, VarT,
    Add, Sub, Mul, Div, Pow, Neg,
    Abs, Exp, Ln, Min, Max,
  };
  struct Node {
    Op op;
    double lit = 0.0;
    int a = -1;
    int b = -1;
  };

  std::vector<Node> nodes;
  int root = -1;
  std::string source;

  double eval(double x, double t) const;
  bool uses_t() const;
};

Expr parse_expression(const std::string& src);

}  // namespace dcu
