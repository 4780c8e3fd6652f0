// Copyright 2026 the damctl authors
// SPDX-License-Identifier: Apache-2.0

#include "damctl/expression.hpp"

#include <cctype>
#include <cmath>
#include <vector>

namespace damctl {

struct Expression::Node {
  enum class Kind { constant, var_x1, var_x2, var_t, add, sub, mul, div, pow, neg, sin, cos, exp };
  Kind kind;
  double value = 0.0;
  std::shared_ptr<const Node> lhs, rhs;
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make(Node::Kind kind, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

NodePtr make_const(double v) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::constant;
  n->value = v;
  return n;
}

class Parser {
public:
  explicit Parser(const std::string& text) : text_(text) {}

  NodePtr run() {
    NodePtr e = parse_sum();
    skip_ws();
    if (pos_ != text_.size())
      throw ExpressionError("unexpected input at position " + std::to_string(pos_) + " in '" +
                            text_ + "'");
    return e;
  }

private:
  const std::string& text_;
  size_t pos_ = 0;

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool consume(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  NodePtr parse_sum() {
    NodePtr e = parse_product();
    for (;;) {
      if (consume('+')) {
        e = make(Node::Kind::add, e, parse_product());
      } else if (consume('-')) {
        e = make(Node::Kind::sub, e, parse_product());
      } else {
        return e;
      }
    }
  }

  NodePtr parse_product() {
    NodePtr e = parse_unary();
    for (;;) {
      if (consume('*')) {
        e = make(Node::Kind::mul, e, parse_unary());
      } else if (consume('/')) {
        e = make(Node::Kind::div, e, parse_unary());
      } else {
        return e;
      }
    }
  }

  NodePtr parse_unary() {
    if (consume('-')) return make(Node::Kind::neg, parse_unary());
    if (consume('+')) return parse_unary();
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_atom();
    if (consume('^')) return make(Node::Kind::pow, base, parse_unary());
    return base;
  }

  NodePtr parse_atom() {
    skip_ws();
    if (pos_ >= text_.size()) throw ExpressionError("unexpected end of expression: '" + text_ + "'");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = parse_sum();
      if (!consume(')')) throw ExpressionError("missing ')' in '" + text_ + "'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_name();
    throw ExpressionError(std::string("unexpected character '") + c + "' in '" + text_ + "'");
  }

  NodePtr parse_number() {
    size_t end = pos_;
    while (end < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[end])) || text_[end] == '.' ||
            text_[end] == 'e' || text_[end] == 'E' ||
            ((text_[end] == '+' || text_[end] == '-') && end > pos_ &&
             (text_[end - 1] == 'e' || text_[end - 1] == 'E'))))
      ++end;
    const std::string tok = text_.substr(pos_, end - pos_);
    try {
      const double v = std::stod(tok);
      pos_ = end;
      return make_const(v);
    } catch (const std::exception&) {
      throw ExpressionError("bad number '" + tok + "' in '" + text_ + "'");
    }
  }

  NodePtr parse_name() {
    size_t end = pos_;
    while (end < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[end])) ||
                                  text_[end] == '_'))
      ++end;
    const std::string name = text_.substr(pos_, end - pos_);
    pos_ = end;
    if (name == "x1" || name == "x") return make(Node::Kind::var_x1);
    if (name == "x2" || name == "y") return make(Node::Kind::var_x2);
    if (name == "t") return make(Node::Kind::var_t);
    if (name == "pi") return make_const(3.14159265358979323846);
    if (name == "sin" || name == "cos" || name == "exp") {
      if (!consume('(')) throw ExpressionError(name + " needs parentheses in '" + text_ + "'");
      NodePtr arg = parse_sum();
      if (!consume(')')) throw ExpressionError("missing ')' after " + name);
      if (name == "sin") return make(Node::Kind::sin, arg);
      if (name == "cos") return make(Node::Kind::cos, arg);
      return make(Node::Kind::exp, arg);
    }
    throw ExpressionError("unknown identifier '" + name + "' in '" + text_ + "'");
  }
};

double eval(const Node& n, double x1, double x2, double t) {
  switch (n.kind) {
    case Node::Kind::constant: return n.value;
    case Node::Kind::var_x1: return x1;
    case Node::Kind::var_x2: return x2;
    case Node::Kind::var_t: return t;
    case Node::Kind::add: return eval(*n.lhs, x1, x2, t) + eval(*n.rhs, x1, x2, t);
    case Node::Kind::sub: return eval(*n.lhs, x1, x2, t) - eval(*n.rhs, x1, x2, t);
    case Node::Kind::mul: return eval(*n.lhs, x1, x2, t) * eval(*n.rhs, x1, x2, t);
    case Node::Kind::div: return eval(*n.lhs, x1, x2, t) / eval(*n.rhs, x1, x2, t);
    case Node::Kind::pow: return std::pow(eval(*n.lhs, x1, x2, t), eval(*n.rhs, x1, x2, t));
    case Node::Kind::neg: return -eval(*n.lhs, x1, x2, t);
    case Node::Kind::sin: return std::sin(eval(*n.lhs, x1, x2, t));
    case Node::Kind::cos: return std::cos(eval(*n.lhs, x1, x2, t));
    case Node::Kind::exp: return std::exp(eval(*n.lhs, x1, x2, t));
  }
  throw ExpressionError("corrupt expression tree");
}

}  // namespace

Expression Expression::parse(const std::string& text) {
  Expression e;
  e.root_ = Parser(text).run();
  e.text_ = text;
  return e;
}

double Expression::operator()(double x1, double x2, double t) const {
  if (!root_) throw ExpressionError("empty expression");
  return eval(*root_, x1, x2, t);
}

}  // namespace damctl
