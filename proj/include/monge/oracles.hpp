#pragma once

#include <cmath>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "monge/problem.hpp"

namespace monge {

/// Limit density as eps -> 0: slopes +-alpha, width 2/sqrt(alpha), peak
/// sqrt(alpha), flush against d (Assumption I) or c (Assumption II).
struct TentDensity {
  Interval support;
  double alpha = 1.0;

  double peak_location() const { return 0.5 * (support.lo + support.hi); }
  double height() const { return std::sqrt(alpha); }
  double operator()(double y) const;
  double slope(double y) const;
  double cdf(double y) const;
  double mean() const { return peak_location(); }
};

TentDensity tent_limit_density(const MongeProblemSpec& spec);

/// Density sampled on n uniform nodes over the target interval.
struct GridDensity {
  std::vector<double> y;
  std::vector<double> u;
  double h = 0.0;
  double alpha = 1.0;
  /// NaN for the expectation optimizer.
  double epsilon = std::numeric_limits<double>::quiet_NaN();
  double objective = 0.0;
  /// Newton steps taken.
  int iterations = 0;
  /// Objective at each centred point of the barrier path.
  std::vector<double> history;

  int n() const { return static_cast<int>(y.size()); }
  double mass() const;
  double max_slope() const;
  double min_value() const;
};

/// Violations of the grid constraints: trapezoidal mass 1 within 1e-10,
/// slopes within alpha (1 + 1e-10), u >= 0, zero end values.
std::vector<std::string> grid_violations(const GridDensity& g);

/// Maximizes (I) or minimizes (II) h sum y_i u_i over grid densities.
/// Throws CapacityError if no strictly feasible density exists.
GridDensity discrete_expectation_optimizer(const MongeProblemSpec& spec, int n);

/// Minimizes h sum_i [H((u_{i+1} - u_i)/h) - |y_i| u_i] over grid densities.
/// Requires n >= 101 and epsilon >= 1e-3.
GridDensity discrete_primal_minimizer(const MongeProblemSpec& spec, double epsilon, int n);

/// Discrete objective h sum_i [H((u_{i+1} - u_i)/h) - |y_i| u_i].
double discrete_primal_objective(const GridDensity& g, double epsilon);

/// Reflection y -> -y of both intervals and the density; swaps I and II.
MongeProblemSpec mirror_transform(const MongeProblemSpec& spec);

/// `stem`.csv with columns y,u and `stem`.json with objective, n, epsilon,
/// alpha, iterations.
void write_fixture(const std::filesystem::path& stem, const GridDensity& g);
GridDensity read_fixture(const std::filesystem::path& stem);

}  // namespace monge
