#include "monge/energy.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <sstream>

#include "monge/error.hpp"

namespace monge {

namespace {

std::vector<double> merged(std::vector<double> a, std::span<const double> b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

// |y| u integrates to |E[Y]| because the target lies on one side of 0.
double weighted_mass(const DensitySolution& s) { return std::abs(s.expectation()); }

double uniform01(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

}  // namespace

Profile linear_profile(std::vector<double> nodes, std::vector<double> values) {
  if (nodes.size() < 2 || nodes.size() != values.size()) {
    fail(ErrorCode::DomainError, "linear profile needs >= 2 nodes with matching values");
  }
  auto data = std::make_shared<const std::pair<std::vector<double>, std::vector<double>>>(std::move(nodes),
                                                                                           std::move(values));
  const auto& xs = data->first;
  const Interval dom{xs.front(), xs.back()};
  auto cell = [data](double y) {
    const auto& x = data->first;
    auto it = std::upper_bound(x.begin(), x.end(), y);
    std::size_t k = static_cast<std::size_t>(it - x.begin());
    return k == 0 ? std::size_t{0} : std::min(k - 1, x.size() - 2);
  };
  Profile p;
  p.domain = dom;
  p.value = [data, cell, dom](double y) {
    if (y < dom.lo || y > dom.hi) return 0.0;
    const auto& [x, v] = *data;
    const std::size_t k = cell(y);
    const double w = (y - x[k]) / (x[k + 1] - x[k]);
    return (1.0 - w) * v[k] + w * v[k + 1];
  };
  p.slope = [data, cell, dom](double y) {
    if (y < dom.lo || y > dom.hi) return 0.0;
    const auto& [x, v] = *data;
    const std::size_t k = cell(y);
    return (v[k + 1] - v[k]) / (x[k + 1] - x[k]);
  };
  p.breaks.assign(xs.begin() + 1, xs.end() - 1);
  return p;
}

Profile solution_profile(const DensitySolution& solution) {
  const DensitySolution* s = &solution;
  return Profile{solution.support(), [s](double y) { return s->density(y); },
                 [s](double y) { return s->slope(y); }, solution.breakpoints()};
}

std::string_view to_string(EnergyConvention c) {
  return c == EnergyConvention::Support ? "support" : "full_target";
}

double penalty(double gamma, double alpha, double epsilon) {
  return epsilon * std::exp((gamma * gamma - alpha * alpha) / (2.0 * epsilon));
}

double conjugate_penalty(double log_lambda, double epsilon) {
  if (log_lambda > 0.0) return -epsilon;
  return epsilon * std::exp(log_lambda) * (log_lambda - 1.0);
}

double dual_integrand(double theta, double log_lambda, double alpha, double epsilon) {
  const double lambda = std::exp(log_lambda);
  const double stress_term = theta == 0.0 ? 0.0 : 0.5 * std::exp(2.0 * std::log(std::abs(theta)) - log_lambda);
  return -stress_term - 0.5 * alpha * alpha * lambda - conjugate_penalty(log_lambda, epsilon);
}

double primal_energy(const Profile& u, double alpha, double epsilon, double quad_tol) {
  auto f = [&](double y) { return penalty(u.slope(y), alpha, epsilon) - std::abs(y) * u.value(y); };
  return integrate(f, u.domain.lo, u.domain.hi, u.breaks, quad_tol);
}

double primal_energy(const DensitySolution& s, EnergyConvention convention) {
  const Interval sup = s.support();
  const double a = s.alpha(), eps = s.epsilon();
  const auto br = s.breakpoints();
  const double h = integrate([&](double y) { return penalty(s.slope(y), a, eps); }, sup.lo, sup.hi, br,
                             s.params().quad_tol);
  double out = h - weighted_mass(s);
  if (convention == EnergyConvention::FullTarget) {
    out += penalty(0.0, a, eps) * (s.spec().target.length() - sup.length());
  }
  return out;
}

double dual_energy(const DualField& dual, double quad_tol) {
  auto f = [&](double y) { return dual_integrand(dual.theta(y), dual.log_lambda(y), dual.alpha, dual.epsilon); };
  return integrate(f, dual.support.lo, dual.support.hi, dual.breakpoints(), quad_tol);
}

double dual_energy(const DualField& dual, const ScalarFn& log_lambda, double quad_tol,
                   std::span<const double> extra_breaks) {
  auto f = [&](double y) {
    const double l = log_lambda(y);
    if (!std::isfinite(l)) {
      std::ostringstream os;
      os << "ln lambda(" << y << ") = " << l;
      fail(ErrorCode::DomainError, os.str());
    }
    return dual_integrand(dual.theta(y), l, dual.alpha, dual.epsilon);
  };
  const auto br = merged(dual.breakpoints(), extra_breaks);
  return integrate(f, dual.support.lo, dual.support.hi, br, quad_tol);
}

double total_complementary(const Profile& u, const DualField& dual, const ScalarFn& log_lambda,
                           double quad_tol) {
  const double a2 = dual.alpha * dual.alpha, eps = dual.epsilon;
  auto f = [&](double y) {
    const double l = log_lambda(y);
    const double v = u.slope(y);
    return std::exp(l) * 0.5 * (v * v - a2) - conjugate_penalty(l, eps) - std::abs(y) * u.value(y);
  };
  const auto br = merged(u.breaks, dual.breakpoints());
  return integrate(f, u.domain.lo, u.domain.hi, br, quad_tol);
}

double total_complementary(const Profile& u, const DualField& dual, double quad_tol) {
  return total_complementary(u, dual, [&](double y) { return dual.log_lambda(y); }, quad_tol);
}

double total_complementary(const DensitySolution& s) {
  const DualField& dual = s.dual();
  const double a2 = dual.alpha * dual.alpha, eps = dual.epsilon;
  auto f = [&](double y) {
    const double l = dual.log_lambda(y);
    const double v = s.slope(y);
    return std::exp(l) * 0.5 * (v * v - a2) - conjugate_penalty(l, eps);
  };
  const Interval sup = s.support();
  return integrate(f, sup.lo, sup.hi, s.breakpoints(), s.params().quad_tol) - weighted_mass(s);
}

double EnergyReport::relative_gap() const { return std::abs(gap_primal_dual) / std::max(1.0, std::abs(primal)); }

EnergyReport duality_gap(const DensitySolution& s) {
  EnergyReport r;
  r.convention = EnergyConvention::Support;
  r.primal = primal_energy(s, EnergyConvention::Support);
  r.full_target_offset = primal_energy(s, EnergyConvention::FullTarget) - r.primal;
  r.dual = dual_energy(s.dual(), s.params().quad_tol);
  r.xi_total = total_complementary(s);
  r.gap_primal_dual = r.primal - r.dual;
  r.gap_primal_xi = r.primal - r.xi_total;
  r.gap_xi_dual = r.xi_total - r.dual;
  r.mass_error = s.mass() - 1.0;
  double sup_slope = 0.0, min_u = 0.0;
  for (double y : s.nodes()) sup_slope = std::max(sup_slope, std::abs(s.slope(y)));
  for (double u : s.density_values()) min_u = std::min(min_u, u);
  r.slope_excess = std::max(sup_slope - s.alpha(), 0.0);
  r.negativity = min_u < 0.0 ? -min_u : 0.0;
  return r;
}

// ---------------------------------------------------------------------------

double ProbeReport::min_primal_diff() const {
  double m = 0.0;
  bool any = false;
  for (const auto& p : samples) {
    if (!p.feasible) continue;
    m = any ? std::min(m, p.primal_diff) : p.primal_diff;
    any = true;
  }
  return m;
}

double ProbeReport::max_dual_diff() const {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& p : samples) m = std::max(m, p.dual_diff);
  return samples.empty() ? 0.0 : m;
}

int ProbeReport::feasible_count() const {
  return static_cast<int>(std::count_if(samples.begin(), samples.end(), [](const auto& p) { return p.feasible; }));
}

namespace {

constexpr double kProbeQuadTol = 1e-13;

// Constraint check on a fine sample of the support; the node grid of the
// solution plus midpoints.
bool probe_feasible(const DensitySolution& s, const Perturbation& phi, double t) {
  const auto& x = s.nodes();
  const auto& u = s.density_values();
  const double cap = s.alpha() * (1.0 + 1e-10);
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (u[k] + t * phi.value(x[k]) < -1e-12) return false;
    if (std::abs(s.slope(x[k]) + t * phi.derivative(x[k])) > cap) return false;
    if (k + 1 < x.size()) {
      const double m = 0.5 * (x[k] + x[k + 1]);
      if (s.density(m) + t * phi.value(m) < -1e-12) return false;
      if (std::abs(s.slope(m) + t * phi.derivative(m)) > cap) return false;
    }
  }
  return true;
}

}  // namespace

ProbeReport second_variation_probe(const DensitySolution& s, const Perturbation& phi,
                                   std::span<const double> t_values) {
  const Interval sup = s.support();
  for (double y : {sup.lo, sup.hi}) {
    const double v = phi.value(y);
    if (!(std::abs(v) <= 1e-12)) {
      std::ostringstream os;
      os << "perturbation is " << v << " at support endpoint " << y;
      fail(ErrorCode::InvalidPerturbation, os.str());
    }
  }
  const double a = s.alpha(), eps = s.epsilon();
  const auto br = merged(s.breakpoints(), phi.breaks);
  double phi_sup = 0.0;
  for (double y : s.nodes()) phi_sup = std::max(phi_sup, std::abs(phi.value(y)));
  const DualField& dual = s.dual();

  ProbeReport rep;
  for (double t : t_values) {
    ProbeSample p;
    p.t = t;
    p.feasible = probe_feasible(s, phi, t);
    if (p.feasible) {
      // H(v + d) - H(v) = H(v) expm1(d (2v + d) / (2 eps)) keeps the
      // difference accurate when it is far below H itself.
      auto f = [&](double y) {
        const double v = s.slope(y), d = t * phi.derivative(y);
        const double dh = penalty(v, a, eps) * std::expm1(d * (2.0 * v + d) / (2.0 * eps));
        return dh - std::abs(y) * t * phi.value(y);
      };
      p.primal_diff = integrate(f, sup.lo, sup.hi, br, kProbeQuadTol);
    }
    auto g = [&](double y) {
      const double rho = phi_sup > 0.0 ? phi.value(y) / phi_sup : 0.0;
      const double factor = std::max(1.0 + t * rho, 1e-12);
      const double l = dual.log_lambda(y), th = dual.theta(y);
      return dual_integrand(th, l + std::log(factor), a, eps) - dual_integrand(th, l, a, eps);
    };
    p.dual_diff = integrate(g, sup.lo, sup.hi, br, kProbeQuadTol);
    rep.samples.push_back(p);
  }
  return rep;
}

double scaled_dual_difference(const DualField& dual, double factor, double quad_tol) {
  if (!(factor > 0.0)) fail(ErrorCode::DomainError, "scale factor must be positive");
  const double lf = std::log(factor);
  auto g = [&](double y) {
    const double l = dual.log_lambda(y), th = dual.theta(y);
    return dual_integrand(th, l + lf, dual.alpha, dual.epsilon) - dual_integrand(th, l, dual.alpha, dual.epsilon);
  };
  return integrate(g, dual.support.lo, dual.support.hi, dual.breakpoints(), quad_tol);
}

namespace {

// (1 - z^2)^3 on |z| < 1; integral over its support is 32/35 w.
struct Bump {
  double m, w;
  double value(double y) const {
    const double z = (y - m) / w;
    if (std::abs(z) >= 1.0) return 0.0;
    const double q = 1.0 - z * z;
    return q * q * q;
  }
  double derivative(double y) const {
    const double z = (y - m) / w;
    if (std::abs(z) >= 1.0) return 0.0;
    const double q = 1.0 - z * z;
    return -6.0 * z * q * q / w;
  }
  double mass() const { return 32.0 / 35.0 * w; }
};

}  // namespace

std::vector<FeasibleProbe> random_feasible_probes(const DensitySolution& s, int count, std::uint64_t seed) {
  const DualField& dual = s.dual();
  const Interval sup = s.support();
  // Inactive slope bound: |theta| < alpha, between the |theta| = alpha points.
  double z1 = sup.lo, z2 = sup.hi;
  for (double b : dual.breakpoints()) {
    if (std::abs(std::abs(dual.theta(b)) - dual.alpha) > 1e-9 * dual.alpha) continue;
    if (b < dual.peak()) z1 = std::max(z1, b);
    else z2 = std::min(z2, b);
  }
  const double len = z2 - z1;
  std::mt19937_64 gen(seed);
  std::vector<FeasibleProbe> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    auto make = [&] {
      const double w = len * (0.05 + 0.2 * uniform01(gen));
      const double m = z1 + w + (len - 2.0 * w) * uniform01(gen);
      return Bump{m, w};
    };
    const Bump b1 = make(), b2 = make();
    const double k1 = 1.0 / b1.mass(), k2 = 1.0 / b2.mass();
    Perturbation phi;
    phi.value = [=](double y) { return k1 * b1.value(y) - k2 * b2.value(y); };
    phi.derivative = [=](double y) { return k1 * b1.derivative(y) - k2 * b2.derivative(y); };
    phi.breaks = {b1.m - b1.w, b1.m + b1.w, b2.m - b2.w, b2.m + b2.w};
    std::sort(phi.breaks.begin(), phi.breaks.end());

    // Largest step keeping half the slack, measured on a fine sample of the
    // bump supports.
    double tmax = 1e-2;
    const int n = 2000;
    for (const Bump& b : {b1, b2}) {
      for (int j = 0; j <= n; ++j) {
        const double y = b.m - b.w + 2.0 * b.w * j / n;
        const double dp = std::abs(phi.derivative(y)), vp = std::abs(phi.value(y));
        const double slack = dual.alpha - std::abs(s.slope(y));
        if (dp > 0.0) tmax = std::min(tmax, 0.5 * slack / dp);
        if (vp > 0.0) tmax = std::min(tmax, 0.5 * s.density(y) / vp);
      }
    }
    const double sign = uniform01(gen) < 0.5 ? -1.0 : 1.0;
    out.push_back({std::move(phi), sign * tmax * (0.25 + 0.75 * uniform01(gen))});
  }
  return out;
}

double taylor_remainder(double log_lambda, double epsilon) {
  const double lambda = std::exp(log_lambda);
  return 2.0 * epsilon * lambda * lambda * (log_lambda + 1.0 - lambda);
}

double taylor_remainder_check(double alpha, double epsilon, int n_grid) {
  if (n_grid < 2) fail(ErrorCode::DomainError, "taylor grid needs >= 2 points");
  const double lo = -alpha * alpha / (2.0 * epsilon);
  double worst = 0.0;
  for (int k = 0; k < n_grid; ++k) {
    const double l = k + 1 == n_grid ? 0.0 : lo + (0.0 - lo) * k / (n_grid - 1);
    const double lambda = std::exp(l);
    const double approx = (alpha * alpha - 2.0 * epsilon) * lambda * lambda + 2.0 * epsilon * lambda * lambda * lambda;
    worst = std::max(worst, std::abs(eval_E_log(l, alpha, epsilon) - approx));
  }
  return worst;
}

double profile_mass(const Profile& u, double quad_tol) {
  return integrate(u.value, u.domain.lo, u.domain.hi, u.breaks, quad_tol);
}

double expectation(const Profile& u, double quad_tol) {
  const double m = profile_mass(u, quad_tol);
  if (!(std::abs(m - 1.0) <= 1e-6)) {
    std::ostringstream os;
    os << "profile mass " << m << " differs from 1 by more than 1e-6";
    fail(ErrorCode::NotADensity, os.str());
  }
  return integrate([&](double y) { return y * u.value(y); }, u.domain.lo, u.domain.hi, u.breaks, quad_tol);
}

}  // namespace monge
