#pragma once

#include <cctype>

#include "wg/geometry.hpp"

namespace wg {

/// Arithmetic expressions in x and y for user-defined problem data:
/// +, -, *, /, ^, sin, cos, exp, sqrt, atan2, constants pi and e.
class Expression {
 public:
  static Expression parse(const std::string& text) {
    Expression ex;
    Parser p{text, 0, &ex.nodes_};
    ex.root_ = p.parse_expr();
    p.skip_ws();
    if (p.pos != text.size())
      throw std::runtime_error("expression: unexpected input at position " +
                               std::to_string(p.pos) + " in '" + text + "'");
    return ex;
  }

  double eval(Vec2 p) const { return eval_node(root_, p); }

  std::function<double(Vec2)> as_function() const {
    Expression copy = *this;
    return [copy](Vec2 p) { return copy.eval(p); };
  }

 private:
  enum class Op { number, var_x, var_y, add, sub, mul, div, pow, neg, sin, cos, exp, sqrt, atan2 };

  struct Node {
    Op op;
    double value = 0.0;
    int a = -1;
    int b = -1;
  };

  std::vector<Node> nodes_;
  int root_ = -1;

  double eval_node(int id, Vec2 p) const {
    const Node& n = nodes_[id];
    switch (n.op) {
      case Op::number: return n.value;
      case Op::var_x: return p.x;
      case Op::var_y: return p.y;
      case Op::add: return eval_node(n.a, p) + eval_node(n.b, p);
      case Op::sub: return eval_node(n.a, p) - eval_node(n.b, p);
      case Op::mul: return eval_node(n.a, p) * eval_node(n.b, p);
      case Op::div: return eval_node(n.a, p) / eval_node(n.b, p);
      case Op::pow: return std::pow(eval_node(n.a, p), eval_node(n.b, p));
      case Op::neg: return -eval_node(n.a, p);
      case Op::sin: return std::sin(eval_node(n.a, p));
      case Op::cos: return std::cos(eval_node(n.a, p));
      case Op::exp: return std::exp(eval_node(n.a, p));
      case Op::sqrt: return std::sqrt(eval_node(n.a, p));
      case Op::atan2: return std::atan2(eval_node(n.a, p), eval_node(n.b, p));
    }
    return 0.0;
  }

  struct Parser {
    const std::string& text;
    std::size_t pos;
    std::vector<Node>* nodes;

    void skip_ws() {
      while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    bool consume(char c) {
      skip_ws();
      if (pos < text.size() && text[pos] == c) {
        ++pos;
        return true;
      }
      return false;
    }

    [[noreturn]] void error(const std::string& what) {
      throw std::runtime_error("expression: " + what + " at position " + std::to_string(pos) +
                               " in '" + text + "'");
    }

    int add_node(Node n) {
      nodes->push_back(n);
      return static_cast<int>(nodes->size()) - 1;
    }

    int parse_expr() {
      int lhs = parse_term();
      while (true) {
        skip_ws();
        if (consume('+'))
          lhs = add_node({Op::add, 0.0, lhs, parse_term()});
        else if (consume('-'))
          lhs = add_node({Op::sub, 0.0, lhs, parse_term()});
        else
          return lhs;
      }
    }

    int parse_term() {
      int lhs = parse_unary();
      while (true) {
        skip_ws();
        if (consume('*'))
          lhs = add_node({Op::mul, 0.0, lhs, parse_unary()});
        else if (consume('/'))
          lhs = add_node({Op::div, 0.0, lhs, parse_unary()});
        else
          return lhs;
      }
    }

    int parse_unary() {
      skip_ws();
      if (consume('-')) return add_node({Op::neg, 0.0, parse_unary(), -1});
      if (consume('+')) return parse_unary();
      return parse_power();
    }

    int parse_power() {
      int base = parse_primary();
      skip_ws();
      if (consume('^')) return add_node({Op::pow, 0.0, base, parse_unary()});
      return base;
    }

    int parse_primary() {
      skip_ws();
      if (pos >= text.size()) error("unexpected end of input");
      char c = text[pos];
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        std::size_t used = 0;
        double v = std::stod(text.substr(pos), &used);
        pos += used;
        return add_node({Op::number, v, -1, -1});
      }
      if (c == '(') {
        ++pos;
        int e = parse_expr();
        if (!consume(')')) error("missing ')'");
        return e;
      }
      if (std::isalpha(static_cast<unsigned char>(c))) {
        std::size_t start = pos;
        while (pos < text.size() &&
               std::isalnum(static_cast<unsigned char>(text[pos])))
          ++pos;
        std::string ident = text.substr(start, pos - start);
        if (ident == "x") return add_node({Op::var_x, 0.0, -1, -1});
        if (ident == "y") return add_node({Op::var_y, 0.0, -1, -1});
        if (ident == "pi") return add_node({Op::number, M_PI, -1, -1});
        if (ident == "e") return add_node({Op::number, M_E, -1, -1});
        Op fn;
        if (ident == "sin")
          fn = Op::sin;
        else if (ident == "cos")
          fn = Op::cos;
        else if (ident == "exp")
          fn = Op::exp;
        else if (ident == "sqrt")
          fn = Op::sqrt;
        else if (ident == "atan2")
          fn = Op::atan2;
        else
          error("unknown identifier '" + ident + "'");
        if (!consume('(')) error("expected '(' after '" + ident + "'");
        int a = parse_expr();
        int b = -1;
        if (fn == Op::atan2) {
          if (!consume(',')) error("atan2 needs two arguments");
          b = parse_expr();
        }
        if (!consume(')')) error("missing ')'");
        return add_node({fn, 0.0, a, b});
      }
      error(std::string("unexpected character '") + c + "'");
    }
  };
};

}  // namespace wg
