#pragma once

// Test-only reference computations. Nothing here calls into the code paths
// being checked.

#include <cmath>
#include <functional>
#include <numbers>
#include <utility>
#include <vector>

namespace oracle {

/// exp(1 - x - e^{-x}) written out independently of the library.
inline double p1(double x) { return std::exp(1.0 - x - std::exp(-x)); }

/// Plain bisection; f(lo) and f(hi) must differ in sign.
inline double bisect(const std::function<double(double)>& f, double lo, double hi,
                     double tol = 1e-14) {
  double flo = f(lo);
  for (int it = 0; it < 400 && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Level crossing of the exact P_1.
inline double p1_front(double level) {
  return bisect([level](double x) { return p1(x) - level; }, 0.0, 50.0);
}

/// Length of the longest path starting at vertex 0, by enumerating every path
/// with an explicit stack.
inline int longest_path_brute_force(const std::vector<std::vector<int>>& out) {
  int best = 0;
  std::vector<std::pair<int, int>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [v, len] = stack.back();
    stack.pop_back();
    if (len > best) best = len;
    for (int w : out[static_cast<std::size_t>(v)]) stack.emplace_back(w, len + 1);
  }
  return best;
}

/// Direct O(M^2) evaluation of one recursion step with the composite
/// trapezoid rule applied to P itself (not its complement).
inline std::vector<double> direct_trapezoid_step(const std::vector<double>& prev,
                                                 double delta) {
  std::vector<double> next(prev.size());
  for (std::size_t i = 0; i < prev.size(); ++i) {
    double integral = 0.0;
    for (std::size_t j = 1; j <= i; ++j) integral += 0.5 * delta * (prev[j - 1] + prev[j]);
    next[i] = std::exp(-static_cast<double>(i) * delta + integral);
  }
  return next;
}

}  // namespace oracle
