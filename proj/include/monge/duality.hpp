#pragma once

#include <vector>

#include "monge/problem.hpp"

namespace monge {

// ---------------------------------------------------------------------------
// Dual algebraic equation
//
// With lambda = exp((v^2 - alpha^2) / (2 eps)) the stress is theta = lambda v
// and theta^2 = E(lambda) = lambda^2 (alpha^2 + 2 eps ln lambda). All lambda
// arithmetic runs on l = ln lambda so that eps down to 1e-6 stays
// representable.
// ---------------------------------------------------------------------------

/// E(lambda) for lambda in [exp(-alpha^2/(2 eps)), 1].
double eval_E(double lambda, double alpha, double epsilon);

/// E expressed through l = ln lambda: exp(2 l) (alpha^2 + 2 eps l).
double eval_E_log(double log_lambda, double alpha, double epsilon);

/// l in [-alpha^2/(2 eps), 0] with E(exp(l)) = theta_sq.
double invert_E(double theta_sq, double alpha, double epsilon);

/// Slope v with v exp((v^2 - alpha^2)/(2 eps)) = theta, for |theta| <= alpha.
double slope_from_theta(double theta, double alpha, double epsilon);

/// ln lambda at a critical pair. For |theta| <= alpha this is invert_E; past
/// alpha the slope bound is active, the slope sits at +-alpha and lambda is
/// the multiplier |theta| / alpha > 1.
double critical_log_lambda(double theta, double alpha, double epsilon);

/// Slope at a critical pair: slope_from_theta inside [-alpha, alpha],
/// saturated at +-alpha outside.
double critical_slope(double theta, double alpha, double epsilon);

// ---------------------------------------------------------------------------
// Dual field on a support
// ---------------------------------------------------------------------------

/// Stress theta(y) = r - y^2/2 under Assumption I, y^2/2 - r under II.
double stress(Assumption assumption, double r, double y);

/// Points of `support` where theta = 0 or |theta| = alpha, ascending.
std::vector<double> stress_breakpoints(Assumption assumption, double r, double alpha, Interval support);

/// Closed-form dual field of the critical pair on a fixed support.
struct DualField {
  Assumption assumption = Assumption::I;
  double alpha = 1.0;
  double epsilon = 1e-2;
  Interval support;
  double constant = 0.0;  ///< C (Assumption I) or D (Assumption II)

  double theta(double y) const { return stress(assumption, constant, y); }
  double log_lambda(double y) const;
  double slope(double y) const;
  /// Location of theta = 0.
  double peak() const;
  std::vector<double> breakpoints() const { return stress_breakpoints(assumption, constant, alpha, support); }
};

// ---------------------------------------------------------------------------
// Free support and integration constant
// ---------------------------------------------------------------------------

/// Integral of the critical slope over `support` with constant r; equals
/// the density at the far endpoint when anchored at the near one. Increasing
/// in r under Assumption I, decreasing under II.
double boundary_residual(double r, Interval support, const MongeProblemSpec& spec, double epsilon,
                         double quad_tol = 1e-13);

/// Unique r with boundary_residual(r) = 0, inside (s^2/2, d^2/2) for support
/// [s, d] (Assumption I) or (t^2/2, c^2/2) for [c, t] (Assumption II).
double solve_constant(Interval support, const MongeProblemSpec& spec, double epsilon, double tol,
                      double quad_tol = 1e-13);

/// Mass of the density built on [endpoint, d] (I) or [c, endpoint] (II),
/// with the constant re-solved for that support.
double total_mass(double endpoint, const MongeProblemSpec& spec, const ApproxParams& params);

/// True iff the widest admissible support carries more than unit mass.
bool check_capacity(const MongeProblemSpec& spec, const ApproxParams& params);

/// Approximate minimum target width, 2/sqrt(alpha), that can hold unit mass.
double capacity_width(double alpha);

/// p*(d) under Assumption I, q*(c) under II. Throws CapacityError if the
/// target is too narrow.
double solve_support(const MongeProblemSpec& spec, const ApproxParams& params);

// ---------------------------------------------------------------------------
// Assembled density
// ---------------------------------------------------------------------------

class DensitySolution {
 public:
  DensitySolution(MongeProblemSpec spec, ApproxParams params, DualField dual);

  const MongeProblemSpec& spec() const { return spec_; }
  const ApproxParams& params() const { return params_; }
  const DualField& dual() const { return dual_; }
  double epsilon() const { return params_.epsilon; }
  double alpha() const { return spec_.alpha; }
  Interval support() const { return dual_.support; }
  double constant() const { return dual_.constant; }
  /// p* (Assumption I) or q* (Assumption II).
  double support_endpoint() const;

  /// Uniform nodes over the support, endpoints included.
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& density_values() const { return u_; }
  const std::vector<double>& cdf_values() const { return cdf_; }

  double mass() const { return cdf_.back(); }
  double expectation() const { return expectation_; }

  /// Density; zero outside the support.
  double density(double y) const;
  /// Derivative of the density; zero outside the support.
  double slope(double y) const;
  /// Integral of the density from the left support endpoint to y.
  double cdf(double y) const;
  /// Smallest y in the support with cdf(y) = q (q clamped to [0, mass]).
  double inverse_cdf(double q) const;

  /// Kinks of the density and its derivative inside the support.
  std::vector<double> breakpoints() const { return dual_.breakpoints(); }

 private:
  std::size_t cell(double y) const;

  MongeProblemSpec spec_;
  ApproxParams params_;
  DualField dual_;
  std::vector<double> nodes_, u_, cdf_;
  std::vector<double> breaks_;
  double expectation_ = 0.0;
};

/// Full construction: support, constant, sampled density. Throws
/// InvalidSpec, CapacityError or propagated solver errors.
DensitySolution assemble_density(const MongeProblemSpec& spec, const ApproxParams& params);

}  // namespace monge
