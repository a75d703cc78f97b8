// Copyright 2026 The tvflow Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "tvflow/harness/expression.hpp"

using tvflow::harness::Expression;
using tvflow::harness::ExpressionError;

TEST_CASE("precedence and associativity") {
  CHECK(Expression::parse("1 + 2 * 3")(0) == 7.0);
  CHECK(Expression::parse("(1 + 2) * 3")(0) == 9.0);
  CHECK(Expression::parse("8 / 4 / 2")(0) == 1.0);
  CHECK(Expression::parse("5 - 3 - 1")(0) == 1.0);
  CHECK(Expression::parse("-x * 2")(3) == -6.0);
  CHECK(Expression::parse("--x")(3) == 3.0);
  CHECK(Expression::parse("2 * -x")(3) == -6.0);
  CHECK(Expression::parse("1e-3 * x")(2) == doctest::Approx(2e-3));
  CHECK(Expression::parse(".5")(0) == 0.5);
}

TEST_CASE("coordinates, time and functions") {
  const auto e = Expression::parse("x + 10*y + 100*t");
  CHECK(e(1, 2, 3) == 321.0);
  CHECK(e.uses_time());
  CHECK(e.uses_y());
  CHECK_FALSE(Expression::parse("x").uses_time());
  CHECK(Expression::parse("abs(x - 1)")(0.25) == 0.75);
  CHECK(Expression::parse("min(x, 2)")(5) == 2.0);
  CHECK(Expression::parse("max(x, 2)")(5) == 5.0);
  CHECK(Expression::parse("step(x)")(0) == 1.0);
  CHECK(Expression::parse("step(x)")(-1e-300) == 0.0);
  const auto plateau = Expression::parse("step(x-0.25)*step(0.75-x)");
  CHECK(plateau(0.5) == 1.0);
  CHECK(plateau(0.1) == 0.0);
  CHECK(plateau(0.9) == 0.0);
}

TEST_CASE("malformed expressions report the position") {
  const auto position = [](const char* s) {
    try {
      Expression::parse(s);
    } catch (const ExpressionError& e) {
      return static_cast<long>(e.position());
    }
    return -1L;
  };
  CHECK(position("x +") == 3);
  CHECK(position("sin(x)") == 0);
  CHECK(position("x y") == 2);
  CHECK(position("min(x)") == 5);
  CHECK(position("(x") == 2);
  CHECK(position("x $ 1") == 2);
  CHECK(position("") == 0);
  CHECK(position("z") == 0);
}
