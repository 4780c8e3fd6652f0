// Copyright 2026 the damctl authors
// SPDX-License-Identifier: Apache-2.0

#ifndef DAMCTL_EXPRESSION_HPP
#define DAMCTL_EXPRESSION_HPP

#include <memory>
#include <stdexcept>
#include <string>

namespace damctl {

class ExpressionError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Arithmetic over (x1, x2, t) with + - * / ^, unary minus, parentheses and
/// the functions sin, cos, exp. Aliases x, y for x1, x2. Parsed once,
/// evaluated per point.
class Expression {
public:
  Expression() = default;
  static Expression parse(const std::string& text);

  double operator()(double x1, double x2, double t = 0.0) const;
  bool empty() const { return root_ == nullptr; }
  const std::string& text() const { return text_; }

  struct Node;

private:
  std::shared_ptr<const Node> root_;
  std::string text_;
};

}  // namespace damctl

#endif
