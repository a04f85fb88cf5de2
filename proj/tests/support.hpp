#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "monge/problem.hpp"

namespace monge::test {

/// Uniform source on [6, 8], target [0, 5]: limit tent on [3, 5] peaked at 4.
inline MongeProblemSpec tent_spec(double alpha = 1.0) {
  MongeProblemSpec s;
  s.assumption = Assumption::I;
  s.source = {6.0, 8.0};
  s.target = {0.0, 5.0};
  s.alpha = alpha;
  s.density = SourceDensity::uniform(s.source);
  return s;
}

inline ApproxParams params(double eps, int n = 2001) {
  ApproxParams p;
  p.epsilon = eps;
  p.grid_n = n;
  return p;
}

/// Composite Simpson rule on n (even) panels; independent of the library quadrature.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

/// Plain bisection; independent of the library root finder.
inline double bisect(const std::function<double(double)>& f, double lo, double hi, int iters = 200) {
  double flo = f(lo);
  for (int i = 0; i < iters; ++i) {
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

}  // namespace monge::test
