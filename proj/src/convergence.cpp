#include "monge/convergence.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "monge/duality.hpp"
#include "monge/energy.hpp"
#include "monge/error.hpp"
#include "monge/numerics.hpp"
#include "monge/oracles.hpp"

namespace monge {

namespace {

SweepRow run_row(const MongeProblemSpec& spec, double eps, const ApproxParams& base) {
  SweepRow row;
  row.epsilon = eps;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    if (!(eps >= kEpsilonFloor)) {
      std::ostringstream os;
      os << "epsilon " << eps << " below the floor " << kEpsilonFloor;
      fail(ErrorCode::DomainError, os.str());
    }
    ApproxParams p = base;
    p.epsilon = eps;
    const DensitySolution s = assemble_density(spec, p);
    const EnergyReport e = duality_gap(s);
    row.constant = s.constant();
    row.support_endpoint = s.support_endpoint();
    row.mass_err = s.mass() - 1.0;
    for (double y : s.nodes()) row.sup_slope = std::max(row.sup_slope, std::abs(s.slope(y)));
    row.expectation = s.expectation();
    row.primal = e.primal;
    row.dual = e.dual;
    row.gap = e.gap_primal_dual;
    const TentDensity tent = tent_limit_density(spec);
    for (double y : uniform_grid(spec.target.lo, spec.target.hi, kTentGridNodes)) {
      row.dist_tent = std::max(row.dist_tent, std::abs(s.density(y) - tent(y)));
    }
  } catch (const MongeError& e) {
    row.status = std::string(to_string(e.code()));
    row.message = e.what();
  }
  row.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return row;
}

// +1 strictly increasing, -1 strictly decreasing, 0 otherwise.
int strict_direction(const std::vector<double>& v) {
  bool inc = true, dec = true;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] > v[i - 1])) inc = false;
    if (!(v[i] < v[i - 1])) dec = false;
  }
  return inc ? 1 : dec ? -1 : 0;
}

}  // namespace

std::vector<SweepRow> epsilon_sweep(const MongeProblemSpec& spec, std::span<const double> epsilons,
                                    const ApproxParams& base) {
  std::vector<SweepRow> rows;
  rows.reserve(epsilons.size());
  for (double e : epsilons) rows.push_back(run_row(spec, e, base));
  return rows;
}

ConvergenceReport convergence_report(std::span<const SweepRow> rows) {
  ConvergenceReport r;
  r.rows = static_cast<int>(rows.size());
  std::vector<SweepRow> ok;
  for (const auto& row : rows) {
    if (row.ok()) ok.push_back(row);
  }
  r.rows_ok = static_cast<int>(ok.size());
  if (ok.size() < 2) {
    std::ostringstream os;
    os << ok.size() << " successful rows; a convergence report needs at least 2";
    fail(ErrorCode::InsufficientRows, os.str());
  }
  if (r.rows_ok < r.rows) r.flags.push_back("failed_rows");
  std::stable_sort(ok.begin(), ok.end(), [](const auto& a, const auto& b) { return a.epsilon > b.epsilon; });
  for (std::size_t i = 1; i < ok.size(); ++i) {
    if (ok[i].epsilon == ok[i - 1].epsilon) {
      r.flags.push_back("duplicate_epsilon");
      break;
    }
  }

  std::vector<double> lx, ly;
  for (const auto& row : ok) {
    if (row.dist_tent > 0.0) {
      lx.push_back(std::log(row.epsilon));
      ly.push_back(std::log(row.dist_tent));
    }
  }
  const double n = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i] / n;
    my += ly[i] / n;
  }
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (lx.size() >= 2 && sxx > 0.0) {
    r.order = sxy / sxx;
    r.order_defined = true;
  } else {
    r.flags.push_back("order_undefined");
  }

  r.distance_monotone = true;
  for (std::size_t i = 1; i < ok.size(); ++i) {
    if (ok[i].dist_tent > ok[i - 1].dist_tent + 1e-3) r.distance_monotone = false;
  }
  std::vector<double> ends, means;
  for (const auto& row : ok) {
    ends.push_back(row.support_endpoint);
    means.push_back(row.expectation);
    r.max_abs_gap = std::max(r.max_abs_gap, std::abs(row.gap));
  }
  r.endpoint_monotone = strict_direction(ends) != 0;
  r.expectation_monotone = strict_direction(means) != 0;
  return r;
}

}  // namespace monge
