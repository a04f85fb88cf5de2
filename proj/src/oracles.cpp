#include "monge/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"

#include "monge/error.hpp"
#include "monge/io.hpp"

namespace monge {

double TentDensity::operator()(double y) const {
  if (y <= support.lo || y >= support.hi) return 0.0;
  return alpha * std::min(y - support.lo, support.hi - y);
}

double TentDensity::slope(double y) const {
  if (y < support.lo || y > support.hi) return 0.0;
  return y < peak_location() ? alpha : -alpha;
}

double TentDensity::cdf(double y) const {
  if (y <= support.lo) return 0.0;
  if (y >= support.hi) return 1.0;
  const double m = peak_location();
  if (y <= m) return 0.5 * alpha * (y - support.lo) * (y - support.lo);
  return 1.0 - 0.5 * alpha * (support.hi - y) * (support.hi - y);
}

TentDensity tent_limit_density(const MongeProblemSpec& spec) {
  const double w = 2.0 / std::sqrt(spec.alpha);
  const Interval t = spec.target;
  if (t.length() < w) {
    std::ostringstream os;
    os << "target width " << t.length() << " below tent width 2/sqrt(alpha) = " << w;
    fail(ErrorCode::CapacityError, os.str());
  }
  const Interval sup = spec.assumption == Assumption::I ? Interval{t.hi - w, t.hi} : Interval{t.lo, t.lo + w};
  return TentDensity{sup, spec.alpha};
}

// ---------------------------------------------------------------------------

double GridDensity::mass() const {
  double m = 0.0;
  for (std::size_t i = 0; i + 1 < u.size(); ++i) m += 0.5 * (u[i] + u[i + 1]) * (y[i + 1] - y[i]);
  return m;
}

double GridDensity::max_slope() const {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < u.size(); ++i) s = std::max(s, std::abs(u[i + 1] - u[i]) / (y[i + 1] - y[i]));
  return s;
}

double GridDensity::min_value() const { return *std::min_element(u.begin(), u.end()); }

std::vector<std::string> grid_violations(const GridDensity& g) {
  std::vector<std::string> out;
  auto add = [&](const std::string& what, double v) {
    std::ostringstream os;
    os << what << " (" << v << ")";
    out.push_back(os.str());
  };
  if (std::abs(g.mass() - 1.0) > 1e-10) add("mass differs from 1", g.mass());
  if (g.max_slope() > g.alpha * (1.0 + 1e-10)) add("slope bound exceeded", g.max_slope());
  if (g.min_value() < 0.0) add("negative value", g.min_value());
  if (g.u.front() != 0.0 || g.u.back() != 0.0) add("nonzero end value", std::max(std::abs(g.u.front()), std::abs(g.u.back())));
  return out;
}

namespace {

constexpr int kNewtonBudget = 100000;

// Log-barrier path following for
//   min  t h sum_j H(D_j / h) [if use_penalty] - t h sum_i w_i u_i
//   s.t. u_i > 0, |D_j| < alpha h, h sum_i u_i = 1,  D_j = u_{j+1} - u_j,
// with u_0 = u_{n-1} = 0. Both the objective and the barrier couple only
// neighbours, so each Newton system is tridiagonal SPD; the mass row is
// eliminated by solving for two right-hand sides.
class BarrierSolver {
 public:
  BarrierSolver(std::vector<double> y, std::vector<double> w, double alpha, double epsilon, bool use_penalty)
      : y_(std::move(y)), w_(std::move(w)), alpha_(alpha), eps_(epsilon), pen_(use_penalty) {
    n_ = static_cast<int>(y_.size());
    h_ = (y_.back() - y_.front()) / (n_ - 1);
  }

  GridDensity solve() {
    const double width = y_.back() - y_.front();
    const double kappa = 4.0 / (width * width);
    if (!(kappa < alpha_)) {
      std::ostringstream os;
      os << "no strictly feasible grid density: width " << width << " needs 2/sqrt(alpha) = " << 2.0 / std::sqrt(alpha_);
      fail(ErrorCode::CapacityError, os.str());
    }
    // Full-width tent, rescaled to unit trapezoidal mass.
    u_.assign(n_, 0.0);
    for (int i = 1; i + 1 < n_; ++i) u_[i] = kappa * std::min(y_[i] - y_.front(), y_.back() - y_[i]);
    double m = 0.0;
    for (int i = 1; i + 1 < n_; ++i) m += h_ * u_[i];
    for (double& v : u_) v /= m;

    const int nc = (n_ - 2) + 2 * (n_ - 1);
    GridDensity g;
    double t = 1.0;
    for (;;) {
      center(t, g.iterations);
      const double f = objective();
      g.history.push_back(f);
      if (nc / t <= 1e-10 * std::max(1.0, std::abs(f))) break;
      t *= 10.0;
    }
    restore_mass();
    g.y = y_;
    g.u = u_;
    g.h = h_;
    g.alpha = alpha_;
    g.objective = objective();
    return g;
  }

  double objective() const {
    double f = 0.0;
    if (pen_) {
      for (int j = 0; j + 1 < n_; ++j) f += h_ * H((u_[j + 1] - u_[j]) / h_);
    }
    for (int i = 1; i + 1 < n_; ++i) f -= h_ * w_[i] * u_[i];
    return f;
  }

 private:
  double H(double g) const { return eps_ * std::exp((g * g - alpha_ * alpha_) / (2.0 * eps_)); }
  double dH(double g) const { return g / eps_ * H(g); }
  double d2H(double g) const { return (1.0 / eps_ + g * g / (eps_ * eps_)) * H(g); }

  // Rounding in the Newton steps lets h sum u drift from 1 by ~1e-9. Put
  // the defect on the nodes with the most room: each receives at most a
  // quarter of its slack to either neighbour and to zero.
  void restore_mass() {
    const double cap = alpha_ * h_;
    for (int pass = 0; pass < 4; ++pass) {
      double total = 0.0;
      for (int i = 1; i + 1 < n_; ++i) total += u_[i];
      const double defect = 1.0 / h_ - total;
      if (defect == 0.0) return;
      std::vector<std::pair<double, int>> room;
      for (int i = 1; i + 1 < n_; ++i) {
        const double dl = u_[i] - u_[i - 1], dr = u_[i + 1] - u_[i];
        // Raising u_i tightens dl <= cap and dr >= -cap; lowering the others.
        double slack = defect > 0.0 ? std::min(cap - dl, cap + dr) : std::min({cap + dl, cap - dr, u_[i]});
        room.push_back({0.25 * slack, i});
      }
      std::sort(room.begin(), room.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first > b.first : a.second < b.second;
      });
      double left = std::abs(defect);
      // Alternate nodes so that no two adjustments share a difference.
      std::vector<char> used(n_, 0);
      for (const auto& [r, i] : room) {
        if (left <= 0.0) break;
        if (used[i - 1] || used[i + 1] || r <= 0.0) continue;
        const double take = std::min(r, left);
        u_[i] += defect > 0.0 ? take : -take;
        left -= take;
        used[i] = 1;
      }
    }
  }

  // Solves (D^T S D + diag(lambda)) x = b in place for two right-hand sides.
  // Pivots follow d_k = c_k + S_{k+1}, c_k = lambda_k + S_k c_{k-1} / d_{k-1},
  // a sum of positive terms; the textbook d_k = diag_k - S_k^2 / d_{k-1}
  // cancels catastrophically once the slope barriers dominate.
  static void solve_tridiagonal(const std::vector<double>& lambda, const std::vector<double>& S,
                                std::vector<double>& b, int m) {
    std::vector<double> d(m), l(m, 0.0);
    double c = lambda[0] + S[0];
    d[0] = c + S[1];
    for (int k = 1; k < m; ++k) {
      c = lambda[k] + S[k] * (c / d[k - 1]);
      d[k] = c + S[k + 1];
      l[k] = -S[k] / d[k - 1];
    }
    for (int r = 0; r < 2; ++r) {
      double* x = b.data() + r * m;
      for (int k = 1; k < m; ++k) x[k] -= l[k] * x[k - 1];
      x[m - 1] /= d[m - 1];
      for (int k = m - 2; k >= 0; --k) x[k] = x[k] / d[k] - l[k + 1] * x[k + 1];
    }
  }

  double merit(const std::vector<double>& u, double t) const {
    double f = 0.0, b = 0.0;
    const double cap = alpha_ * h_;
    for (int j = 0; j + 1 < n_; ++j) {
      const double d = u[j + 1] - u[j];
      if (pen_) f += h_ * H(d / h_);
      b -= std::log(cap - d) + std::log(cap + d);
    }
    for (int i = 1; i + 1 < n_; ++i) {
      f -= h_ * w_[i] * u[i];
      b -= std::log(u[i]);
    }
    return t * f + b;
  }

  void center(double t, int& iterations) {
    const int m = n_ - 2;
    const double cap = alpha_ * h_;
    std::vector<double> grad(m), local(m), coupling(n_ - 1), rhs(2 * m), du(m);
    std::vector<double> trial(n_);
    for (int it = 0; it < 200; ++it) {
      if (++iterations > kNewtonBudget) fail(ErrorCode::MaxIterations, "barrier method exceeded 1e5 Newton steps");
      // Hessian = D^T S D + diag(1/u^2): S_j couples through difference j,
      // and the interior unknown k sits between differences k and k+1.
      std::fill(grad.begin(), grad.end(), 0.0);
      for (int j = 0; j + 1 < n_; ++j) {
        const double d = u_[j + 1] - u_[j];
        double g1 = 1.0 / (cap - d) - 1.0 / (cap + d);
        double g2 = 1.0 / ((cap - d) * (cap - d)) + 1.0 / ((cap + d) * (cap + d));
        if (pen_) {
          g1 += t * dH(d / h_);
          g2 += t * d2H(d / h_) / h_;
        }
        if (j + 1 <= m) grad[j] += g1;
        if (j >= 1) grad[j - 1] -= g1;
        coupling[j] = g2;
      }
      for (int i = 1; i + 1 < n_; ++i) {
        grad[i - 1] += -t * h_ * w_[i] - 1.0 / u_[i];
        local[i - 1] = 1.0 / (u_[i] * u_[i]);
      }
      for (int k = 0; k < m; ++k) {
        rhs[k] = -grad[k];
        rhs[m + k] = 1.0;
      }
      solve_tridiagonal(local, coupling, rhs, m);
      double s1 = 0.0, s2 = 0.0;
      for (int k = 0; k < m; ++k) {
        s1 += rhs[k];
        s2 += rhs[m + k];
      }
      // Infeasible-start form: also absorb accumulated drift of h sum u from 1.
      double mass = 0.0;
      for (int i = 1; i + 1 < n_; ++i) mass += u_[i];
      const double nu = (s1 + mass - 1.0 / h_) / s2;
      double dec = 0.0;
      for (int k = 0; k < m; ++k) {
        du[k] = rhs[k] - nu * rhs[m + k];
        dec -= grad[k] * du[k];
      }
      if (dec <= 2e-10) return;

      // Largest step keeping every constraint strictly positive.
      double smax = 1.0;
      auto limit = [&](double gval, double dg) {
        if (dg < 0.0) smax = std::min(smax, -0.99 * gval / dg);
      };
      for (int i = 1; i + 1 < n_; ++i) limit(u_[i], du[i - 1]);
      for (int j = 0; j + 1 < n_; ++j) {
        const double d = u_[j + 1] - u_[j];
        const double dd = (j + 1 <= m ? du[j] : 0.0) - (j >= 1 ? du[j - 1] : 0.0);
        limit(cap - d, -dd);
        limit(cap + d, dd);
      }
      const double phi0 = merit(u_, t);
      double s = smax;
      bool moved = false;
      for (int ls = 0; ls < 60; ++ls, s *= 0.5) {
        trial = u_;
        for (int i = 1; i + 1 < n_; ++i) trial[i] += s * du[i - 1];
        const double phi1 = merit(trial, t);
        if (std::isfinite(phi1) && phi1 <= phi0 - 0.01 * s * dec) {
          u_.swap(trial);
          moved = true;
          break;
        }
      }
      // No representable decrease left at this t.
      if (!moved) return;
    }
  }

  std::vector<double> y_, w_, u_;
  double alpha_, eps_;
  bool pen_;
  int n_ = 0;
  double h_ = 0.0;
};

std::vector<double> target_nodes(const MongeProblemSpec& spec, int n) {
  std::vector<double> y(n);
  const Interval t = spec.target;
  for (int i = 0; i < n; ++i) y[i] = i + 1 == n ? t.hi : t.lo + (t.hi - t.lo) * i / (n - 1);
  return y;
}

}  // namespace

GridDensity discrete_expectation_optimizer(const MongeProblemSpec& spec, int n) {
  if (n < 101) fail(ErrorCode::DomainError, "expectation optimizer needs n >= 101");
  auto y = target_nodes(spec, n);
  // Maximize E under I, minimize under II: minimize -/+ h sum y u.
  std::vector<double> w(y);
  if (spec.assumption == Assumption::II) {
    for (double& v : w) v = -v;
  }
  BarrierSolver solver(y, w, spec.alpha, 1.0, false);
  GridDensity g = solver.solve();
  // Report the expectation itself rather than the signed objective.
  const double sgn = spec.assumption == Assumption::I ? -1.0 : 1.0;
  g.objective *= sgn;
  for (double& v : g.history) v *= sgn;
  return g;
}

GridDensity discrete_primal_minimizer(const MongeProblemSpec& spec, double epsilon, int n) {
  if (n < 101) fail(ErrorCode::DomainError, "primal minimizer needs n >= 101");
  if (!(epsilon >= 1e-3)) fail(ErrorCode::DomainError, "primal minimizer needs epsilon >= 1e-3");
  auto y = target_nodes(spec, n);
  std::vector<double> w(y.size());
  std::transform(y.begin(), y.end(), w.begin(), [](double v) { return std::abs(v); });
  BarrierSolver solver(y, w, spec.alpha, epsilon, true);
  GridDensity g = solver.solve();
  g.epsilon = epsilon;
  return g;
}

double discrete_primal_objective(const GridDensity& g, double epsilon) {
  double f = 0.0;
  const double a2 = g.alpha * g.alpha;
  for (std::size_t i = 0; i + 1 < g.u.size(); ++i) {
    const double h = g.y[i + 1] - g.y[i];
    const double s = (g.u[i + 1] - g.u[i]) / h;
    f += h * (epsilon * std::exp((s * s - a2) / (2.0 * epsilon)) - std::abs(g.y[i]) * g.u[i]);
  }
  return f;
}

MongeProblemSpec mirror_transform(const MongeProblemSpec& spec) {
  MongeProblemSpec m = spec;
  m.source = Interval{-spec.source.hi, -spec.source.lo};
  m.target = Interval{-spec.target.hi, -spec.target.lo};
  m.assumption = spec.assumption == Assumption::I ? Assumption::II : Assumption::I;
  m.density = spec.density.reflected();
  return m;
}

void write_fixture(const std::filesystem::path& stem, const GridDensity& g) {
  auto csv = stem;
  csv += ".csv";
  auto js = stem;
  js += ".json";
  write_atomic(csv, csv_table({"y", "u"}, {g.y, g.u}));
  nlohmann::ordered_json j;
  j["objective"] = g.objective;
  j["n"] = g.n();
  j["epsilon"] = std::isnan(g.epsilon) ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(g.epsilon);
  j["alpha"] = g.alpha;
  j["iterations"] = g.iterations;
  write_atomic(js, j.dump(2) + "\n");
}

GridDensity read_fixture(const std::filesystem::path& stem) {
  auto csv = stem;
  csv += ".csv";
  auto js = stem;
  js += ".json";
  std::vector<std::string> header;
  auto cols = parse_csv(read_text(csv), &header);
  if (header != std::vector<std::string>{"y", "u"}) fail(ErrorCode::ConfigError, csv.string() + ": expected columns y,u");
  GridDensity g;
  g.y = std::move(cols[0]);
  g.u = std::move(cols[1]);
  if (g.y.size() < 2) fail(ErrorCode::ConfigError, csv.string() + ": fewer than two rows");
  g.h = (g.y.back() - g.y.front()) / (g.n() - 1);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text(js));
    g.objective = j.at("objective").get<double>();
    g.alpha = j.at("alpha").get<double>();
    g.iterations = j.at("iterations").get<int>();
    g.epsilon = j.at("epsilon").is_null() ? std::numeric_limits<double>::quiet_NaN() : j.at("epsilon").get<double>();
    if (j.at("n").get<int>() != g.n()) fail(ErrorCode::ConfigError, js.string() + ": n disagrees with csv rows");
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ConfigError, js.string() + ": " + e.what());
  }
  return g;
}

}  // namespace monge
