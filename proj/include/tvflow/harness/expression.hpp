// Copyright 2026 The tvflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "tvflow/error.hpp"

// Closed-form data in configs. Grammar:
//
//   expr   := term (('+' | '-') term)*
//   term   := unary (('*' | '/') unary)*
//   unary  := '-' unary | atom
//   atom   := number | 'x' | 'y' | 't' | '(' expr ')'
//           | 'abs' '(' expr ')' | 'step' '(' expr ')'
//           | ('min' | 'max') '(' expr ',' expr ')'
//
// step(s) is 1 for s >= 0 and 0 otherwise.

namespace tvflow::harness {

class ExpressionError : public Error {
 public:
  ExpressionError(const std::string& text, std::size_t position, const std::string& what);
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

class Expression {
 public:
  struct Node;

  /// Throws ExpressionError with the offending character position.
  static Expression parse(std::string_view text);

  double operator()(double x, double y = 0.0, double t = 0.0) const;
  const std::string& text() const { return text_; }
  bool uses_time() const { return uses_time_; }
  bool uses_y() const { return uses_y_; }

 private:
  Expression(std::string text, std::shared_ptr<const Node> root, bool uses_time, bool uses_y)
      : text_(std::move(text)), root_(std::move(root)), uses_time_(uses_time), uses_y_(uses_y) {}

  std::string text_;
  std::shared_ptr<const Node> root_;
  bool uses_time_ = false;
  bool uses_y_ = false;
};

}  // namespace tvflow::harness
