// Copyright 2026 The tvflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <vector>

// Exact 1D total-variation denoising with fixed end values by dynamic
// programming over the chain (Johnson's method). Minimizes
//
//   1/2 sum (u_i - y_i)^2 + alpha (|u_0 - left| + sum |u_{i+1} - u_i| + |right - u_{n-1}|).
//
// The derivative of the forward message is nondecreasing piecewise linear and
// is carried exactly as a list of knots; minimizing over the predecessor
// clamps it to [-alpha, alpha].

namespace oracle {

class PiecewiseDerivative {
 public:
  PiecewiseDerivative() { knots_.push_back({0.0, 0.0, 0.0}); }

  void add_identity_minus(double y) {
    for (auto& k : knots_) {
      k.left += k.x - y;
      k.right += k.x - y;
    }
    slope_left_ += 1.0;
    slope_right_ += 1.0;
  }

  // Adds the derivative of alpha |x - b|.
  void add_jump(double b, double alpha) {
    insert(b);
    for (auto& k : knots_) {
      if (k.x < b) {
        k.left -= alpha;
        k.right -= alpha;
      } else if (k.x > b) {
        k.left += alpha;
        k.right += alpha;
      } else {
        k.left -= alpha;
        k.right += alpha;
      }
    }
  }

  // Smallest x with D(x-) <= c <= D(x+); D must reach c.
  double crossing(double c) const {
    const Knot& first = knots_.front();
    if (first.left > c) {
      if (!(slope_left_ > 0.0)) throw std::logic_error("derivative does not reach level");
      return first.x + (c - first.left) / slope_left_;
    }
    for (std::size_t i = 0; i < knots_.size(); ++i) {
      const Knot& k = knots_[i];
      if (k.left <= c && c <= k.right) return k.x;
      const bool last = i + 1 == knots_.size();
      const double next_value = last ? 0.0 : knots_[i + 1].left;
      if (!last && k.right < c && c < next_value) {
        const Knot& n = knots_[i + 1];
        return k.x + (c - k.right) * (n.x - k.x) / (n.left - k.right);
      }
      if (last) {
        if (!(slope_right_ > 0.0)) throw std::logic_error("derivative does not reach level");
        return k.x + (c - k.right) / slope_right_;
      }
    }
    throw std::logic_error("unreachable");
  }

  // D <- clamp(D, -alpha, alpha); returns the two crossing points.
  std::pair<double, double> clamp(double alpha) {
    const double lo = crossing(-alpha);
    const double hi = crossing(alpha);
    insert(lo);
    insert(hi);
    for (auto& k : knots_) {
      k.left = std::clamp(k.left, -alpha, alpha);
      k.right = std::clamp(k.right, -alpha, alpha);
    }
    slope_left_ = 0.0;
    slope_right_ = 0.0;
    return {lo, hi};
  }

 private:
  struct Knot {
    double x, left, right;
  };

  double value(double x) const {
    const Knot& first = knots_.front();
    if (x < first.x) return first.left + slope_left_ * (x - first.x);
    for (std::size_t i = 0; i + 1 < knots_.size(); ++i) {
      const Knot& a = knots_[i];
      const Knot& b = knots_[i + 1];
      if (x < b.x) return a.right + (b.left - a.right) * (x - a.x) / (b.x - a.x);
    }
    const Knot& last = knots_.back();
    return last.right + slope_right_ * (x - last.x);
  }

  void insert(double x) {
    auto it = std::lower_bound(knots_.begin(), knots_.end(), x, [](const Knot& k, double v) { return k.x < v; });
    if (it != knots_.end() && it->x == x) return;
    const double v = value(x);
    knots_.insert(it, Knot{x, v, v});
  }

  std::vector<Knot> knots_;
  double slope_left_ = 0.0;
  double slope_right_ = 0.0;
};

inline std::vector<double> rof_dirichlet(const std::vector<double>& y, double alpha, double left, double right) {
  const std::size_t n = y.size();
  if (n == 0) return {};
  PiecewiseDerivative d;
  d.add_jump(left, alpha);
  std::vector<std::pair<double, double>> windows;
  for (std::size_t i = 0; i < n; ++i) {
    d.add_identity_minus(y[i]);
    if (i + 1 < n) windows.push_back(d.clamp(alpha));
  }
  d.add_jump(right, alpha);
  std::vector<double> u(n);
  u[n - 1] = d.crossing(0.0);
  for (std::size_t i = n - 1; i-- > 0;) u[i] = std::clamp(u[i + 1], windows[i].first, windows[i].second);
  return u;
}

}  // namespace oracle
