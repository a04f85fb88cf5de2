#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "monge/duality.hpp"
#include "monge/numerics.hpp"

namespace monge {

/// A density candidate on `domain`: value, derivative, and the points where
/// either may fail to be smooth. Outside `domain` the profile is zero.
struct Profile {
  Interval domain;
  ScalarFn value;
  ScalarFn slope;
  std::vector<double> breaks;
};

/// Piecewise-linear profile through (nodes, values).
Profile linear_profile(std::vector<double> nodes, std::vector<double> values);

/// The assembled density as a profile on its support.
Profile solution_profile(const DensitySolution& solution);

enum class EnergyConvention { Support, FullTarget };
std::string_view to_string(EnergyConvention c);

/// H(gamma) = eps exp((gamma^2 - alpha^2) / (2 eps)).
double penalty(double gamma, double alpha, double epsilon);

/// Conjugate of eps e^xi restricted to xi <= 0, at zeta = eps lambda:
/// eps lambda (ln lambda - 1) for lambda <= 1, -eps beyond.
double conjugate_penalty(double log_lambda, double epsilon);

/// Dual integrand at stress theta and ln lambda = l:
/// -theta^2/(2 lambda) - alpha^2 lambda / 2 - conjugate_penalty(l).
double dual_integrand(double theta, double log_lambda, double alpha, double epsilon);

/// Integral of H(u_y) - |y| u over u.domain.
double primal_energy(const Profile& u, double alpha, double epsilon, double quad_tol = 1e-10);

/// Primal energy of the assembled density. FullTarget adds the constant
/// contribution H(0) |target \ support| of the zero extension.
double primal_energy(const DensitySolution& solution, EnergyConvention convention = EnergyConvention::Support);

/// Dual energy at the critical multiplier of `dual`, over its support.
double dual_energy(const DualField& dual, double quad_tol = 1e-10);

/// Dual energy for an arbitrary multiplier profile y -> ln lambda(y).
/// Throws DomainError if ln lambda is not finite somewhere.
double dual_energy(const DualField& dual, const ScalarFn& log_lambda, double quad_tol = 1e-10,
                   std::span<const double> extra_breaks = {});

/// Total complementary energy: integral of Phi(u) zeta - Psi*(zeta) - |y| u
/// with Phi(u) = (u_y^2 - alpha^2)/(2 eps), zeta = eps lambda, over u.domain.
double total_complementary(const Profile& u, const DualField& dual, const ScalarFn& log_lambda,
                           double quad_tol = 1e-10);
/// Same at the critical multiplier.
double total_complementary(const Profile& u, const DualField& dual, double quad_tol = 1e-10);
/// Same for the assembled density at its own critical multiplier.
double total_complementary(const DensitySolution& solution);

struct EnergyReport {
  double primal = 0.0;
  double dual = 0.0;
  double xi_total = 0.0;
  double gap_primal_dual = 0.0;
  double gap_primal_xi = 0.0;
  double gap_xi_dual = 0.0;
  EnergyConvention convention = EnergyConvention::Support;
  /// primal under FullTarget minus primal under Support.
  double full_target_offset = 0.0;
  double mass_error = 0.0;
  /// max(sup |u_y| - alpha, 0).
  double slope_excess = 0.0;
  /// max(-min u, 0).
  double negativity = 0.0;

  double relative_gap() const;
};

EnergyReport duality_gap(const DensitySolution& solution);

struct Perturbation {
  ScalarFn value;
  ScalarFn derivative;
  std::vector<double> breaks;
};

struct ProbeSample {
  double t = 0.0;
  bool feasible = false;     ///< |u_y + t phi'| <= alpha and u + t phi >= 0 at the checked points
  double primal_diff = 0.0;  ///< I[u + t phi] - I[u]; 0 when not feasible
  double dual_diff = 0.0;    ///< I_d[zeta (1 + t rho)] - I_d[zeta]
};

struct ProbeReport {
  std::vector<ProbeSample> samples;
  /// min primal_diff over feasible samples (0 if none).
  double min_primal_diff() const;
  /// max dual_diff over all samples.
  double max_dual_diff() const;
  int feasible_count() const;
};

/// First-difference probes of both energies around the critical pair.
/// `phi` must vanish at the support endpoints (InvalidPerturbation beyond
/// 1e-12). The dual is perturbed multiplicatively, zeta (1 + t rho), with
/// rho = phi / sup|phi| and the factor clipped to stay positive.
ProbeReport second_variation_probe(const DensitySolution& solution, const Perturbation& phi,
                                   std::span<const double> t_values);

/// Dual difference I_d[c zeta] - I_d[zeta] for a constant factor c > 0.
double scaled_dual_difference(const DualField& dual, double factor, double quad_tol = 1e-10);

/// Perturbations around `solution` that keep the constraints for the
/// returned step: zero-mass sums of smooth bumps placed where the slope
/// bound is inactive. Deterministic in `seed`.
struct FeasibleProbe {
  Perturbation phi;
  double t = 0.0;
};
std::vector<FeasibleProbe> random_feasible_probes(const DensitySolution& solution, int count, std::uint64_t seed);

/// max over 1000 points, log-spaced in lambda on [exp(-alpha^2/(2 eps)), 1],
/// of |E(lambda) - (alpha^2 - 2 eps) lambda^2 - 2 eps lambda^3|.
double taylor_remainder_check(double alpha, double epsilon, int n_grid = 1000);

/// Closed-form remainder 2 eps lambda^2 (ln lambda + 1 - lambda).
double taylor_remainder(double log_lambda, double epsilon);

/// Integral of y u over u.domain. Throws NotADensity if the mass is off by
/// more than 1e-6.
double expectation(const Profile& u, double quad_tol = 1e-12);

/// Integral of u over u.domain.
double profile_mass(const Profile& u, double quad_tol = 1e-12);

}  // namespace monge
