#pragma once

#include <span>
#include <string>
#include <vector>

#include "monge/problem.hpp"

namespace monge {

inline constexpr double kEpsilonFloor = 1e-6;

struct SweepRow {
  double epsilon = 0.0;
  /// "ok", or the error code that stopped the row.
  std::string status = "ok";
  std::string message;
  double constant = 0.0;
  double support_endpoint = 0.0;
  double mass_err = 0.0;
  double sup_slope = 0.0;
  double expectation = 0.0;
  double primal = 0.0;
  double dual = 0.0;
  double gap = 0.0;
  double dist_tent = 0.0;
  double ms = 0.0;

  bool ok() const { return status == "ok"; }
};

/// Sup distance between the assembled density and the tent limit on the
/// 2001-node uniform grid over the target.
inline constexpr int kTentGridNodes = 2001;

/// One row per epsilon, in input order. Failures are recorded in the row.
std::vector<SweepRow> epsilon_sweep(const MongeProblemSpec& spec, std::span<const double> epsilons,
                                    const ApproxParams& base);

struct ConvergenceReport {
  int rows = 0;
  int rows_ok = 0;
  /// Least-squares slope of ln dist_tent against ln epsilon.
  double order = 0.0;
  bool order_defined = false;
  /// Along decreasing epsilon: dist_tent nonincreasing within 1e-3.
  bool distance_monotone = false;
  /// Along decreasing epsilon: strictly monotone in one direction.
  bool endpoint_monotone = false;
  bool expectation_monotone = false;
  double max_abs_gap = 0.0;
  std::vector<std::string> flags;
};

/// Throws InsufficientRows with fewer than two successful rows.
ConvergenceReport convergence_report(std::span<const SweepRow> rows);

}  // namespace monge
