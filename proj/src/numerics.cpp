#include "monge/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "monge/error.hpp"

namespace monge {

double solve_root(const ScalarFn& f, double lo, double hi, double tol) {
  if (lo > hi) std::swap(lo, hi);
  const double flo = f(lo);
  if (flo == 0.0) return lo;
  const double fhi = f(hi);
  if (fhi == 0.0) return hi;
  if (!std::isfinite(flo) || !std::isfinite(fhi) || (flo > 0.0) == (fhi > 0.0)) {
    std::ostringstream os;
    os << "f(" << lo << ") = " << flo << ", f(" << hi << ") = " << fhi;
    fail(ErrorCode::NoSignChange, os.str());
  }
  // Below a few ulps the bracket can no longer shrink.
  const double scale = std::max(std::abs(lo), std::abs(hi));
  const double width_tol = std::max(tol, 4.0 * std::numeric_limits<double>::epsilon() * scale);
  auto done = [width_tol](double a, double b) { return std::abs(b - a) <= width_tol; };
  std::uintmax_t iters = kMaxRootIterations;
  auto bracket = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, done, iters);
  if (iters >= static_cast<std::uintmax_t>(kMaxRootIterations) && !done(bracket.first, bracket.second)) {
    std::ostringstream os;
    os << "bracket [" << bracket.first << ", " << bracket.second << "] after " << iters << " iterations";
    fail(ErrorCode::MaxIterations, os.str());
  }
  return 0.5 * (bracket.first + bracket.second);
}

namespace {

struct Piece {
  double a, b;
  double value, error;
  int depth;
  bool operator<(const Piece& o) const { return error < o.error; }
};

Piece gk15(const ScalarFn& f, double a, double b, int depth) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  double err = 0.0, l1 = 0.0;
  const double v = GK::integrate(f, a, b, 0, 0.0, &err, &l1);
  // Boost 1.74 reports the single-panel error on the reference interval
  // [-1, 1]; the value and L1 are already mapped to [a, b].
  err *= 0.5 * (b - a);
  // Errors at the level of accumulated rounding are not worth refining.
  if (err <= 50.0 * std::numeric_limits<double>::epsilon() * l1) err = 0.0;
  return {a, b, v, err, depth};
}

double integrate_piece(const ScalarFn& f, double l, double r, double tol) {
  if (l == r) return 0.0;
  if (l > r) return -integrate_piece(f, r, l, tol);
  std::priority_queue<Piece> heap;
  std::vector<Piece> frozen;
  Piece first = gk15(f, l, r, 0);
  double total = first.value, total_err = first.error;
  heap.push(first);
  while (!heap.empty() && total_err > tol * std::max(1.0, std::abs(total))) {
    Piece p = heap.top();
    heap.pop();
    if (p.depth >= kMaxQuadratureDepth || p.error == 0.0) {
      frozen.push_back(p);
      continue;
    }
    const double m = 0.5 * (p.a + p.b);
    if (!(m > p.a && m < p.b)) {
      frozen.push_back(p);
      continue;
    }
    Piece left = gk15(f, p.a, m, p.depth + 1);
    Piece right = gk15(f, m, p.b, p.depth + 1);
    total += left.value + right.value - p.value;
    total_err += left.error + right.error - p.error;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum from the pieces; the running total drifts by rounding.
  double sum = 0.0, err = 0.0;
  std::vector<Piece> all = std::move(frozen);
  while (!heap.empty()) {
    all.push_back(heap.top());
    heap.pop();
  }
  std::sort(all.begin(), all.end(), [](const Piece& x, const Piece& y) { return x.a < y.a; });
  for (const Piece& p : all) {
    sum += p.value;
    err += p.error;
  }
  if (err > tol * std::max(1.0, std::abs(sum))) {
    std::ostringstream os;
    os << "error estimate " << err << " on [" << l << ", " << r << "] after " << kMaxQuadratureDepth
       << " levels";
    fail(ErrorCode::MaxDepth, os.str());
  }
  return sum;
}

}  // namespace

double integrate(const ScalarFn& f, double l, double r, double tol) { return integrate_piece(f, l, r, tol); }

double integrate(const ScalarFn& f, double l, double r, std::span<const double> points, double tol) {
  if (l > r) return -integrate(f, r, l, points, tol);
  double sum = 0.0;
  double left = l;
  for (double p : points) {
    if (!(p > left && p < r)) continue;
    sum += integrate_piece(f, left, p, tol);
    left = p;
  }
  sum += integrate_piece(f, left, r, tol);
  return sum;
}

// ---------------------------------------------------------------------------

MonotoneProfile::MonotoneProfile(std::vector<double> nodes, std::vector<double> values,
                                 std::vector<double> derivatives, Interpolation interp)
    : nodes_(std::move(nodes)), values_(std::move(values)), interp_(interp) {
  const std::size_t n = nodes_.size();
  if (n < 2 || values_.size() != n || (!derivatives.empty() && derivatives.size() != n)) {
    fail(ErrorCode::DomainError, "profile needs >= 2 nodes with matching values/derivatives");
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (!(nodes_[i] > nodes_[i - 1])) fail(ErrorCode::DomainError, "profile nodes must be strictly increasing");
  }
  bool inc = true, dec = true;
  for (std::size_t i = 1; i < n; ++i) {
    if (values_[i] < values_[i - 1]) inc = false;
    if (values_[i] > values_[i - 1]) dec = false;
  }
  if (!inc && !dec) fail(ErrorCode::DomainError, "profile values are not monotone");
  direction_ = inc ? Direction::Increasing : Direction::Decreasing;

  if (interp_ == Interpolation::Linear) return;

  std::vector<double> delta(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    delta[k] = (values_[k + 1] - values_[k]) / (nodes_[k + 1] - nodes_[k]);
  }
  if (!derivatives.empty()) {
    slopes_ = std::move(derivatives);
  } else {
    // PCHIP: weighted harmonic mean of neighbouring secants.
    slopes_.assign(n, 0.0);
    for (std::size_t k = 1; k + 1 < n; ++k) {
      const double d0 = delta[k - 1], d1 = delta[k];
      if (d0 * d1 <= 0.0) continue;
      const double h0 = nodes_[k] - nodes_[k - 1], h1 = nodes_[k + 1] - nodes_[k];
      const double w0 = 2.0 * h1 + h0, w1 = h1 + 2.0 * h0;
      slopes_[k] = (w0 + w1) / (w0 / d0 + w1 / d1);
    }
    slopes_[0] = delta[0];
    slopes_[n - 1] = delta[n - 2];
  }
  // Fritsch-Carlson: slopes share the secant's sign and (alpha, beta) stays
  // inside the radius-3 disc on every cell.
  for (std::size_t k = 0; k < n; ++k) {
    const double sgn = inc ? 1.0 : -1.0;
    if (slopes_[k] * sgn < 0.0) slopes_[k] = 0.0;
  }
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (delta[k] == 0.0) {
      slopes_[k] = slopes_[k + 1] = 0.0;
      continue;
    }
    const double a = slopes_[k] / delta[k], b = slopes_[k + 1] / delta[k];
    const double r2 = a * a + b * b;
    if (r2 > 9.0) {
      const double tau = 3.0 / std::sqrt(r2);
      slopes_[k] = tau * a * delta[k];
      slopes_[k + 1] = tau * b * delta[k];
    }
  }
}

double MonotoneProfile::min_value() const { return std::min(values_.front(), values_.back()); }
double MonotoneProfile::max_value() const { return std::max(values_.front(), values_.back()); }

std::size_t MonotoneProfile::cell(double y) const {
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), y);
  std::size_t k = static_cast<std::size_t>(it - nodes_.begin());
  if (k == 0) return 0;
  return std::min(k - 1, nodes_.size() - 2);
}

double MonotoneProfile::operator()(double y) const {
  if (y <= nodes_.front()) return values_.front();
  if (y >= nodes_.back()) return values_.back();
  const std::size_t k = cell(y);
  const double h = nodes_[k + 1] - nodes_[k];
  const double t = (y - nodes_[k]) / h;
  const double v0 = values_[k], v1 = values_[k + 1];
  double v;
  if (interp_ == Interpolation::Linear) {
    v = v0 + t * (v1 - v0);
  } else {
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    v = h00 * v0 + h10 * h * slopes_[k] + h01 * v1 + h11 * h * slopes_[k + 1];
  }
  return std::clamp(v, std::min(v0, v1), std::max(v0, v1));
}

double MonotoneProfile::derivative(double y) const {
  y = std::clamp(y, nodes_.front(), nodes_.back());
  const std::size_t k = cell(y);
  const double h = nodes_[k + 1] - nodes_[k];
  const double v0 = values_[k], v1 = values_[k + 1];
  if (interp_ == Interpolation::Linear) return (v1 - v0) / h;
  const double t = (y - nodes_[k]) / h;
  const double t2 = t * t;
  const double d00 = 6 * t2 - 6 * t, d10 = 3 * t2 - 4 * t + 1;
  const double d01 = -6 * t2 + 6 * t, d11 = 3 * t2 - 2 * t;
  return (d00 * v0 + d01 * v1) / h + d10 * slopes_[k] + d11 * slopes_[k + 1];
}

MonotoneProfile cumulative(const ScalarFn& f, double l, double r, int n, double tol) {
  if (n < 2) fail(ErrorCode::DomainError, "cumulative needs n >= 2");
  std::vector<double> y = uniform_grid(l, r, n);
  std::vector<double> v(y.size(), 0.0), d(y.size(), 0.0);
  for (std::size_t k = 0; k < y.size(); ++k) {
    const double fk = f(y[k]);
    if (fk < -1e-12) {
      std::ostringstream os;
      os << "f(" << y[k] << ") = " << fk;
      fail(ErrorCode::NegativeIntegrand, os.str());
    }
    d[k] = std::max(fk, 0.0);
    if (k > 0) v[k] = v[k - 1] + integrate(f, y[k - 1], y[k], tol);
  }
  // Rounding can make a flat profile step down by an ulp.
  for (std::size_t k = 1; k < v.size(); ++k) v[k] = std::max(v[k], v[k - 1]);
  return MonotoneProfile(std::move(y), std::move(v), std::move(d));
}

double invert_profile(const MonotoneProfile& p, double target) {
  const double lo = p.min_value(), hi = p.max_value();
  if (target < lo - 1e-12 || target > hi + 1e-12) {
    std::ostringstream os;
    os << "target " << target << " outside [" << lo << ", " << hi << "]";
    fail(ErrorCode::OutOfRange, os.str());
  }
  target = std::clamp(target, lo, hi);
  const auto& x = p.nodes();
  const auto& v = p.values();
  const bool inc = p.direction() == MonotoneProfile::Direction::Increasing;
  // First node whose value reaches the target in the direction of travel.
  std::size_t k;
  if (inc) {
    k = static_cast<std::size_t>(std::lower_bound(v.begin(), v.end(), target) - v.begin());
  } else {
    k = static_cast<std::size_t>(
        std::lower_bound(v.begin(), v.end(), target, [](double a, double b) { return a > b; }) - v.begin());
  }
  if (k >= v.size()) return x.back();
  if (v[k] == target || k == 0) return x[k];
  const double a = x[k - 1], b = x[k];
  const double tol = 1e-15 * std::max({1.0, std::abs(a), std::abs(b)});
  return solve_root([&](double y) { return p(y) - target; }, a, b, tol);
}

std::vector<double> uniform_grid(double lo, double hi, int n) {
  std::vector<double> y(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) y[k] = lo + (hi - lo) * (static_cast<double>(k) / (n - 1));
  y.front() = lo;
  y.back() = hi;
  return y;
}

std::vector<double> chebyshev_lobatto(double lo, double hi, int n) {
  std::vector<double> x(static_cast<std::size_t>(n));
  const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  const double pi = std::acos(-1.0);
  for (int k = 0; k < n; ++k) x[k] = mid - half * std::cos(pi * k / (n - 1));
  x.front() = lo;
  x.back() = hi;
  return x;
}

}  // namespace monge
