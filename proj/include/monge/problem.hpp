#pragma once

#include <string>
#include <vector>

namespace monge {

/// Closed interval [lo, hi].
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  bool contains(double x) const { return x >= lo && x <= hi; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Which side of the target the source sits on.
///   I:  0 <= c < d < a < b  (mass moves left, expectation is maximized)
///   II: a < b < c < d <= 0  (mass moves right, expectation is minimized)
enum class Assumption { I, II };

std::string to_string(Assumption a);

/// Source density f+ on [a, b].
///
/// Every kind is stored as a continuous piecewise-linear function on its
/// nodes, so the cumulative distribution is piecewise quadratic and can be
/// evaluated and inverted in closed form on each cell.
class SourceDensity {
 public:
  enum class Kind { Uniform, PiecewiseLinear, Tabulated };

  static SourceDensity uniform(Interval support);
  static SourceDensity piecewise_linear(std::vector<double> nodes, std::vector<double> values);
  static SourceDensity tabulated(std::vector<double> nodes, std::vector<double> values);

  Kind kind() const { return kind_; }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& values() const { return values_; }
  Interval support() const { return {nodes_.front(), nodes_.back()}; }

  /// f+(x); zero outside the support.
  double operator()(double x) const;
  /// Exact integral of the piecewise-linear density over its support.
  double mass() const;
  /// Exact integral of x f+(x) over the support.
  double first_moment() const;
  double min_value() const;

  /// Same density scaled by `factor`.
  SourceDensity scaled(double factor) const;
  /// Density of -X when X has this density.
  SourceDensity reflected() const;

 private:
  SourceDensity(Kind kind, std::vector<double> nodes, std::vector<double> values);

  Kind kind_;
  std::vector<double> nodes_;
  std::vector<double> values_;
};

std::string to_string(SourceDensity::Kind k);

struct MongeProblemSpec {
  Interval source;
  Interval target;
  Assumption assumption = Assumption::I;
  double alpha = 1.0;  ///< bound on |u_y|
  SourceDensity density = SourceDensity::uniform({0.0, 1.0});
};

struct ApproxParams {
  double epsilon = 1e-2;
  int grid_n = 2001;
  double root_tol = 1e-12;
  double quad_tol = 1e-10;
};

/// Throws MongeError(InvalidSpec) naming the offending field.
void check_params(const ApproxParams& params);

struct ValidationReport {
  std::vector<std::string> violations;
  bool valid() const { return violations.empty(); }
};

/// Ordering, finiteness and density checks. Capacity of the target interval
/// is a separate question answered by check_capacity().
ValidationReport validate_spec(const MongeProblemSpec& spec);

/// Rescale to unit mass. Throws NonPositiveDensity if the density is negative
/// anywhere, vanishes on a whole cell, or has no mass.
SourceDensity normalize_density(const SourceDensity& density);

/// Tolerance on |mass(f+) - 1| accepted without renormalization.
inline constexpr double kDensityMassTol = 1e-8;

}  // namespace monge
