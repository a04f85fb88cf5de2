#pragma once

#include <functional>
#include <span>
#include <vector>

#include "monge/problem.hpp"

namespace monge {

using ScalarFn = std::function<double(double)>;

/// Bracketed root of a continuous function (TOMS 748, bisection-safe).
/// Returns a point of the final bracket, whose width is <= tol.
/// Throws NoSignChange when f(lo) and f(hi) share a sign, MaxIterations
/// after 200 iterations.
double solve_root(const ScalarFn& f, double lo, double hi, double tol);

inline constexpr int kMaxRootIterations = 200;
inline constexpr int kMaxQuadratureDepth = 60;

/// Globally adaptive Gauss-Kronrod (7/15) quadrature. Subdivides the piece
/// with the largest error estimate until the summed estimate is below
/// tol * max(1, |result|). Throws MaxDepth when a piece would need more than
/// 60 bisections.
double integrate(const ScalarFn& f, double l, double r, double tol);

/// Same, split at the given points first. `points` must be sorted; entries
/// outside (l, r) are ignored. Use it to place kinks on piece boundaries.
double integrate(const ScalarFn& f, double l, double r, std::span<const double> points, double tol);

/// Interpolant through monotone data. With derivatives supplied, cubic
/// Hermite limited by Fritsch-Carlson; without them, PCHIP slopes. Never
/// leaves [min(values), max(values)] on any cell.
class MonotoneProfile {
 public:
  enum class Direction { Increasing, Decreasing };
  enum class Interpolation { Cubic, Linear };

  MonotoneProfile(std::vector<double> nodes, std::vector<double> values,
                  std::vector<double> derivatives = {}, Interpolation interp = Interpolation::Cubic);

  double operator()(double y) const;
  double derivative(double y) const;

  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& values() const { return values_; }
  Interval domain() const { return {nodes_.front(), nodes_.back()}; }
  Direction direction() const { return direction_; }
  double min_value() const;
  double max_value() const;

 private:
  std::size_t cell(double y) const;

  std::vector<double> nodes_;
  std::vector<double> values_;
  std::vector<double> slopes_;
  Interpolation interp_;
  Direction direction_ = Direction::Increasing;
};

/// Profile whose node k holds the integral of f over [l, y_k] on a uniform
/// grid of n nodes. Throws NegativeIntegrand if f < -1e-12 at a node.
MonotoneProfile cumulative(const ScalarFn& f, double l, double r, int n, double tol = 1e-14);

/// y with p(y) = target, |p(y) - target| <= 1e-10 max(1, |target|).
/// Throws OutOfRange if target lies outside the value range by > 1e-12.
double invert_profile(const MonotoneProfile& p, double target);

/// Chebyshev-Lobatto points on [lo, hi], ascending, endpoints exact.
std::vector<double> chebyshev_lobatto(double lo, double hi, int n);

/// Uniform grid of n nodes on [lo, hi] with exact endpoints.
std::vector<double> uniform_grid(double lo, double hi, int n);

}  // namespace monge
