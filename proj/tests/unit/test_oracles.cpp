// Copyright 2026 The tvflow Authors
// SPDX-License-Identifier: Apache-2.0

// Self-checks of the test oracles against each other, independent of the library.

#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles/chain_problem.hpp"
#include "oracles/rof_chain.hpp"

TEST_CASE("chain DP agrees with the dual proximal-gradient oracle") {
  std::mt19937_64 rng(50);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + trial % 7;
    const double alpha = 0.05 + 0.1 * (trial % 4);
    std::vector<double> y(n);
    for (double& v : y) v = d(rng);
    const double left = d(rng), right = d(rng);
    const auto u = oracle::rof_dirichlet(y, alpha, left, right);
    // divided by alpha: TV(u) + sum (u^2 / (2 alpha) - y u / alpha) + const, on unit cells
    oracle::ChainProblem p;
    p.h = 1.0;
    p.lambda = 1.0 / alpha;
    p.left = left;
    p.right = right;
    for (double v : y) {
      p.f.push_back(-v / alpha);
      p.g.push_back(0.0);
    }
    const auto ref = oracle::dual_fista(p, std::vector<double>(n + 1, 0.0));
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(u[i] - ref[i]) <= 1e-8);
  }
}

TEST_CASE("chain DP: plateau loses 2 alpha / width per step") {
  std::vector<double> y(16, 0.0);
  for (int i = 4; i < 12; ++i) y[i] = 1.0;
  const auto u = oracle::rof_dirichlet(y, 0.1, 0.0, 0.0);
  for (int i = 4; i < 12; ++i) CHECK(u[i] == doctest::Approx(1.0 - 2.0 * 0.1 / 8.0));
  CHECK(u[0] == 0.0);
  CHECK(u[15] == 0.0);
}

TEST_CASE("proximal-gradient primal oracle is stable across starts") {
  oracle::ChainProblem p;
  p.h = 0.125;
  p.mu = 0.3;
  p.lambda = 0.5;
  p.left = 0.0;
  p.right = 1.0;
  p.f.assign(8, 0.2);
  p.g.assign(8, 0.5);
  const auto r = oracle::multi_start_minimum(p, 5, 1);
  CHECK(r.worst - r.best <= 1e-11);
}

TEST_CASE("brute force and dual search agree on a small LP") {
  oracle::ChainProblem p;
  p.h = 0.25;
  p.left = 0.0;
  p.right = 1.0;
  p.f = {0.4, -0.4, 0.4, -0.4};
  p.g = {0.0, 0.0, 0.0, 0.0};
  const double primal = oracle::brute_force_min(p, {0.0, 1.0});
  const double dual = oracle::dual_search(p);
  CHECK(primal == doctest::Approx(dual).epsilon(1e-5));
}
