// Copyright 2026 The tvflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "tvflow/harness/expression.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <vector>

namespace tvflow::harness {

ExpressionError::ExpressionError(const std::string& text, std::size_t position, const std::string& what)
    : Error("expression \"" + text + "\" at position " + std::to_string(position) + ": " + what),
      position_(position) {}

struct Expression::Node {
  enum class Kind { constant, x, y, t, neg, add, sub, mul, div, abs, step, min, max };
  Kind kind = Kind::constant;
  double value = 0.0;
  std::shared_ptr<const Node> a, b;

  double eval(double x, double y, double t) const {
    switch (kind) {
      case Kind::constant: return value;
      case Kind::x: return x;
      case Kind::y: return y;
      case Kind::t: return t;
      case Kind::neg: return -a->eval(x, y, t);
      case Kind::add: return a->eval(x, y, t) + b->eval(x, y, t);
      case Kind::sub: return a->eval(x, y, t) - b->eval(x, y, t);
      case Kind::mul: return a->eval(x, y, t) * b->eval(x, y, t);
      case Kind::div: return a->eval(x, y, t) / b->eval(x, y, t);
      case Kind::abs: return std::abs(a->eval(x, y, t));
      case Kind::step: return a->eval(x, y, t) >= 0.0 ? 1.0 : 0.0;
      case Kind::min: return std::min(a->eval(x, y, t), b->eval(x, y, t));
      case Kind::max: return std::max(a->eval(x, y, t), b->eval(x, y, t));
    }
    return 0.0;
  }
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make(Node::Kind kind, NodePtr a = nullptr, NodePtr b = nullptr, double value = 0.0) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->a = std::move(a);
  n->b = std::move(b);
  n->value = value;
  return n;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

  bool uses_time = false;
  bool uses_y = false;

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ExpressionError(std::string(s_), pos_, what); }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = make(Node::Kind::add, lhs, term());
      } else if (accept('-')) {
        lhs = make(Node::Kind::sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = make(Node::Kind::mul, lhs, unary());
      } else if (accept('/')) {
        lhs = make(Node::Kind::div, lhs, unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Node::Kind::neg, unary());
    return atom();
  }

  NodePtr atom() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return name();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  NodePtr number() {
    double v = 0.0;
    const char* first = s_.data() + pos_;
    const auto [end, ec] = std::from_chars(first, s_.data() + s_.size(), v);
    if (ec != std::errc() || !std::isfinite(v)) fail("malformed number");
    pos_ += static_cast<std::size_t>(end - first);
    return make(Node::Kind::constant, nullptr, nullptr, v);
  }

  NodePtr name() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    const std::string_view id = s_.substr(start, pos_ - start);
    if (id == "x") return make(Node::Kind::x);
    if (id == "y") {
      uses_y = true;
      return make(Node::Kind::y);
    }
    if (id == "t") {
      uses_time = true;
      return make(Node::Kind::t);
    }
    Node::Kind kind;
    int arity = 1;
    if (id == "abs") {
      kind = Node::Kind::abs;
    } else if (id == "step") {
      kind = Node::Kind::step;
    } else if (id == "min") {
      kind = Node::Kind::min;
      arity = 2;
    } else if (id == "max") {
      kind = Node::Kind::max;
      arity = 2;
    } else {
      pos_ = start;
      fail("unknown name '" + std::string(id) + "'");
    }
    expect('(');
    NodePtr a = expr();
    NodePtr b;
    if (arity == 2) {
      expect(',');
      b = expr();
    }
    expect(')');
    return make(kind, a, b);
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression Expression::parse(std::string_view text) {
  Parser p(text);
  NodePtr root = p.parse();
  return Expression(std::string(text), std::move(root), p.uses_time, p.uses_y);
}

double Expression::operator()(double x, double y, double t) const { return root_->eval(x, y, t); }

}  // namespace tvflow::harness
