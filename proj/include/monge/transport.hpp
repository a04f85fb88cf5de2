#pragma once

#include <memory>
#include <string_view>
#include <vector>

#include "monge/duality.hpp"
#include "monge/numerics.hpp"

namespace monge {

enum class MapVariant { Increasing, Decreasing };
std::string_view to_string(MapVariant v);

/// F(x) = integral of the source density from a to x, exact on each cell of
/// the piecewise-linear density.
MonotoneProfile source_cdf(const MongeProblemSpec& spec);

/// Target CDF sampled on the solution nodes, with the density as derivative.
/// Pointwise exact values come from DensitySolution::cdf.
MonotoneProfile target_cdf(const DensitySolution& solution);

/// s(x) = G^{-1}(F(x)) (increasing) or G^{-1}(1 - F(x)) (decreasing), with G
/// the target CDF from the left support endpoint.
class TransportMapSolution {
 public:
  TransportMapSolution(std::shared_ptr<const DensitySolution> solution, MapVariant variant, int samples);

  MapVariant variant() const { return variant_; }
  Assumption assumption() const { return solution_->spec().assumption; }
  const DensitySolution& solution() const { return *solution_; }
  const MongeProblemSpec& spec() const { return solution_->spec(); }
  Interval domain() const { return spec().source; }

  /// Map value computed by direct inversion.
  double operator()(double x) const;
  /// Level of the target CDF that x is sent to: F(x) or 1 - F(x).
  double level(double x) const;

  /// Chebyshev-Lobatto samples over [a, b] and the map at them.
  const std::vector<double>& sample_x() const { return x_; }
  const std::vector<double>& sample_s() const { return s_; }
  /// Monotone interpolant of the samples.
  const MonotoneProfile& profile() const { return profile_; }

  double cost() const { return cost_; }

 private:
  std::shared_ptr<const DensitySolution> solution_;
  MapVariant variant_;
  MonotoneProfile source_;
  std::vector<double> x_, s_;
  MonotoneProfile profile_;
  double cost_ = 0.0;
};

TransportMapSolution build_map(std::shared_ptr<const DensitySolution> solution, MapVariant variant,
                               int samples = 2001);

/// Integral of |x - s(x)| f(x) over the source interval.
double transport_cost(const TransportMapSolution& map, double quad_tol = 1e-12);
double transport_cost(const ScalarFn& map, const MongeProblemSpec& spec, double quad_tol = 1e-12);

/// sup over n_probe Chebyshev-Lobatto points of |G(s(x)) - F(x)|
/// (1 - F(x) for the decreasing variant).
double pushforward_residual(const TransportMapSolution& map, int n_probe = 1000);
double pushforward_residual(const ScalarFn& map, MapVariant variant, const DensitySolution& solution,
                            int n_probe = 1000);

/// Mean of the source density.
double source_mean(const MongeProblemSpec& spec);

}  // namespace monge
