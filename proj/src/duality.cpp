#include "monge/duality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "monge/error.hpp"
#include "monge/numerics.hpp"

namespace monge {

double eval_E(double lambda, double alpha, double epsilon) {
  if (!(lambda > 0.0) || lambda > 1.0 + 1e-12) {
    std::ostringstream os;
    os << "lambda = " << lambda << " outside (0, 1]";
    fail(ErrorCode::DomainError, os.str());
  }
  return eval_E_log(std::log(lambda), alpha, epsilon);
}

double eval_E_log(double log_lambda, double alpha, double epsilon) {
  const double w = alpha * alpha + 2.0 * epsilon * log_lambda;
  if (w < -1e-12) {
    std::ostringstream os;
    os << "alpha^2 + 2 eps ln(lambda) = " << w << " < 0";
    fail(ErrorCode::DomainError, os.str());
  }
  return std::exp(2.0 * log_lambda) * std::max(w, 0.0);
}

namespace {

// w = alpha^2 + 2 eps ln lambda = v^2 for theta_sq in (0, alpha^2). With
// z = ln w the equation reads g(z) = (e^z - alpha^2)/eps + z - ln theta^2 = 0;
// g is convex and increasing, and g(ln alpha^2) >= 0, so Newton from there
// descends monotonically onto the root. This stays finite when lambda
// underflows, where the equation in ln lambda alone degenerates. Returns z.
double solve_z(double theta_sq, double alpha, double epsilon) {
  const double a2 = alpha * alpha;
  const double target = std::log(theta_sq);
  double z = std::log(a2);
  for (int it = 0; it < 200; ++it) {
    const double ez = std::exp(z);
    const double g = (ez - a2) / epsilon + z - target;
    const double step = g / (ez / epsilon + 1.0);
    z -= step;
    if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(z))) break;
  }
  return std::min(z, std::log(a2));
}

void check_theta_sq(double theta_sq, double alpha) {
  const double a2 = alpha * alpha;
  if (!(theta_sq >= -1e-14) || theta_sq > a2 * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "theta^2 = " << theta_sq << " outside [0, alpha^2 = " << a2 << "]";
    fail(ErrorCode::OutOfRange, os.str());
  }
}

}  // namespace

double invert_E(double theta_sq, double alpha, double epsilon) {
  check_theta_sq(theta_sq, alpha);
  const double a2 = alpha * alpha;
  const double lo = -a2 / (2.0 * epsilon);
  if (theta_sq <= 0.0) return lo;
  if (theta_sq >= a2) return 0.0;
  // theta^2 = lambda^2 v^2 gives l without the cancellation in (v^2 - alpha^2) / (2 eps).
  const double z = solve_z(theta_sq, alpha, epsilon);
  return std::clamp(0.5 * (std::log(theta_sq) - z), lo, 0.0);
}

double slope_from_theta(double theta, double alpha, double epsilon) {
  if (std::abs(theta) > alpha * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "|theta| = " << std::abs(theta) << " exceeds alpha = " << alpha;
    fail(ErrorCode::OutOfRange, os.str());
  }
  const double t2 = theta * theta;
  if (t2 == 0.0) return 0.0;
  if (t2 >= alpha * alpha) return std::copysign(alpha, theta);
  return std::copysign(std::exp(0.5 * solve_z(t2, alpha, epsilon)), theta);
}

double critical_log_lambda(double theta, double alpha, double epsilon) {
  const double at = std::abs(theta);
  if (at >= alpha) return std::log(at / alpha);
  return invert_E(theta * theta, alpha, epsilon);
}

double critical_slope(double theta, double alpha, double epsilon) {
  if (std::abs(theta) >= alpha) return std::copysign(alpha, theta);
  return slope_from_theta(theta, alpha, epsilon);
}

double stress(Assumption assumption, double r, double y) {
  const double g = 0.5 * y * y;
  return assumption == Assumption::I ? r - g : g - r;
}

std::vector<double> stress_breakpoints(Assumption assumption, double r, double alpha, Interval support) {
  // theta = 0 and theta = +-alpha all sit on y^2 = 2 (r + k alpha), k in {-1, 0, 1};
  // the support lies in y >= 0 under I and y <= 0 under II.
  std::vector<double> out;
  const double sign = assumption == Assumption::I ? 1.0 : -1.0;
  for (double k : {-1.0, 0.0, 1.0}) {
    const double g = r + k * alpha;
    if (g <= 0.0) continue;
    const double y = sign * std::sqrt(2.0 * g);
    if (y > support.lo && y < support.hi) out.push_back(y);
  }
  std::sort(out.begin(), out.end());
  return out;
}

double DualField::log_lambda(double y) const { return critical_log_lambda(theta(y), alpha, epsilon); }
double DualField::slope(double y) const { return critical_slope(theta(y), alpha, epsilon); }
double DualField::peak() const {
  const double y = std::sqrt(2.0 * std::max(constant, 0.0));
  return assumption == Assumption::I ? y : -y;
}

// ---------------------------------------------------------------------------

namespace {

// Boundary values and mass feed the sign and endpoint constraints directly,
// so their quadratures never run looser than this.
constexpr double kStructuralQuadTol = 1e-13;

double structural_tol(const ApproxParams& p) { return std::min(p.quad_tol, kStructuralQuadTol); }

DualField field_for(const MongeProblemSpec& spec, double epsilon, Interval support, double r) {
  return DualField{spec.assumption, spec.alpha, epsilon, support, r};
}

// Bracket on the constant for a given support: theta changes sign inside it.
Interval constant_bracket(Assumption assumption, Interval support) {
  const double lo2 = 0.5 * support.lo * support.lo;
  const double hi2 = 0.5 * support.hi * support.hi;
  return assumption == Assumption::I ? Interval{lo2, hi2} : Interval{hi2, lo2};
}

}  // namespace

double boundary_residual(double r, Interval support, const MongeProblemSpec& spec, double epsilon,
                         double quad_tol) {
  const DualField f = field_for(spec, epsilon, support, r);
  const auto br = f.breakpoints();
  return integrate([&](double y) { return f.slope(y); }, support.lo, support.hi, br, quad_tol);
}

double solve_constant(Interval support, const MongeProblemSpec& spec, double epsilon, double tol,
                      double quad_tol) {
  if (!(support.hi > support.lo)) fail(ErrorCode::DomainError, "degenerate support");
  const Interval b = constant_bracket(spec.assumption, support);
  auto residual = [&](double r) { return boundary_residual(r, support, spec, epsilon, quad_tol); };
  return solve_root(residual, b.lo, b.hi, tol);
}

double total_mass(double endpoint, const MongeProblemSpec& spec, const ApproxParams& params) {
  const double eps = params.epsilon;
  const Interval t = spec.target;
  const bool first = spec.assumption == Assumption::I;
  const Interval support = first ? Interval{endpoint, t.hi} : Interval{t.lo, endpoint};
  if (!(support.hi > support.lo)) return 0.0;
  const double r = solve_constant(support, spec, eps, 0.01 * params.root_tol, structural_tol(params));
  const DualField f = field_for(spec, eps, support, r);
  const auto br = f.breakpoints();
  // Mass of the density anchored at the near endpoint, folded to one integral:
  //   I:  u(y) = -int_y^d eta  =>  mass = -int_s^d (y - s) eta(y) dy
  //   II: u(y) =  int_c^y eta  =>  mass =  int_c^t (t - y) eta(y) dy
  auto integrand = [&](double y) {
    const double w = first ? -(y - support.lo) : (support.hi - y);
    return w * f.slope(y);
  };
  return integrate(integrand, support.lo, support.hi, br, structural_tol(params));
}

double capacity_width(double alpha) { return 2.0 / std::sqrt(alpha); }

bool check_capacity(const MongeProblemSpec& spec, const ApproxParams& params) {
  const double far = spec.assumption == Assumption::I ? spec.target.lo : spec.target.hi;
  return total_mass(far, spec, params) > 1.0;
}

double solve_support(const MongeProblemSpec& spec, const ApproxParams& params) {
  check_params(params);
  if (!check_capacity(spec, params)) {
    std::ostringstream os;
    os << "target interval [" << spec.target.lo << ", " << spec.target.hi << "] (width "
       << spec.target.length() << ") cannot hold unit mass under |u_y| <= " << spec.alpha
       << "; requires width about 2/sqrt(alpha) = " << capacity_width(spec.alpha);
    fail(ErrorCode::CapacityError, os.str());
  }
  const Interval t = spec.target;
  const double gap = 1e-6 * t.length();
  auto excess = [&](double e) { return total_mass(e, spec, params) - 1.0; };
  if (spec.assumption == Assumption::I) return solve_root(excess, t.lo, t.hi - gap, params.root_tol);
  return solve_root(excess, t.lo + gap, t.hi, params.root_tol);
}

// ---------------------------------------------------------------------------

DensitySolution::DensitySolution(MongeProblemSpec spec, ApproxParams params, DualField dual)
    : spec_(std::move(spec)), params_(params), dual_(dual) {
  const Interval s = dual_.support;
  nodes_ = uniform_grid(s.lo, s.hi, params_.grid_n);
  breaks_ = dual_.breakpoints();
  const std::size_t n = nodes_.size();
  const double tol = structural_tol(params_);
  auto eta = [this](double y) { return dual_.slope(y); };

  std::vector<double> du(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) du[k] = integrate(eta, nodes_[k], nodes_[k + 1], breaks_, tol);

  u_.assign(n, 0.0);
  if (spec_.assumption == Assumption::I) {
    // Anchored at d.
    for (std::size_t k = n - 1; k-- > 0;) u_[k] = u_[k + 1] - du[k];
  } else {
    for (std::size_t k = 0; k + 1 < n; ++k) u_[k + 1] = u_[k] + du[k];
  }

  cdf_.assign(n, 0.0);
  expectation_ = 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double a = nodes_[k], b = nodes_[k + 1];
    const double tail = integrate([&](double t) { return (b - t) * eta(t); }, a, b, breaks_, tol);
    cdf_[k + 1] = cdf_[k] + (b - a) * u_[k] + tail;
    const double moment =
        integrate([&](double t) { return 0.5 * (b * b - t * t) * eta(t); }, a, b, breaks_, tol);
    expectation_ += 0.5 * (b * b - a * a) * u_[k] + moment;
  }
}

double DensitySolution::support_endpoint() const {
  return spec_.assumption == Assumption::I ? dual_.support.lo : dual_.support.hi;
}

std::size_t DensitySolution::cell(double y) const {
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), y);
  const std::size_t k = static_cast<std::size_t>(it - nodes_.begin());
  if (k == 0) return 0;
  return std::min(k - 1, nodes_.size() - 2);
}

double DensitySolution::density(double y) const {
  const Interval s = dual_.support;
  if (y <= s.lo || y >= s.hi) {
    if (y == s.lo) return u_.front();
    if (y == s.hi) return u_.back();
    return 0.0;
  }
  const std::size_t k = cell(y);
  auto eta = [this](double t) { return dual_.slope(t); };
  if (y - nodes_[k] <= nodes_[k + 1] - y) {
    return u_[k] + integrate(eta, nodes_[k], y, breaks_, structural_tol(params_));
  }
  return u_[k + 1] - integrate(eta, y, nodes_[k + 1], breaks_, structural_tol(params_));
}

double DensitySolution::slope(double y) const {
  const Interval s = dual_.support;
  if (y < s.lo || y > s.hi) return 0.0;
  return dual_.slope(y);
}

double DensitySolution::cdf(double y) const {
  const Interval s = dual_.support;
  if (y <= s.lo) return 0.0;
  if (y >= s.hi) return cdf_.back();
  const std::size_t k = cell(y);
  const double a = nodes_[k];
  const double tail = integrate([&](double t) { return (y - t) * dual_.slope(t); }, a, y, breaks_, structural_tol(params_));
  return cdf_[k] + (y - a) * u_[k] + tail;
}

double DensitySolution::inverse_cdf(double q) const {
  const Interval s = dual_.support;
  if (q <= 0.0) return s.lo;
  if (q >= cdf_.back()) return s.hi;
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), q);
  std::size_t k = static_cast<std::size_t>(it - cdf_.begin());
  k = std::clamp<std::size_t>(k, 1, cdf_.size() - 1);
  const double a = nodes_[k - 1], b = nodes_[k];
  if (cdf_[k - 1] == q) return a;
  const double tol = 1e-15 * std::max({1.0, std::abs(a), std::abs(b)});
  return solve_root([&](double y) { return cdf(y) - q; }, a, b, tol);
}

DensitySolution assemble_density(const MongeProblemSpec& spec, const ApproxParams& params) {
  check_params(params);
  const ValidationReport report = validate_spec(spec);
  if (!report.valid()) fail(ErrorCode::InvalidSpec, report.violations.front());
  const double endpoint = solve_support(spec, params);
  const Interval support =
      spec.assumption == Assumption::I ? Interval{endpoint, spec.target.hi} : Interval{spec.target.lo, endpoint};
  const double r = solve_constant(support, spec, params.epsilon, 0.01 * params.root_tol, structural_tol(params));
  return DensitySolution(spec, params, field_for(spec, params.epsilon, support, r));
}

}  // namespace monge
