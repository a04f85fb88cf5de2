// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "monge/cli.hpp"
#include "monge/convergence.hpp"
#include "monge/duality.hpp"
#include "monge/energy.hpp"
#include "monge/error.hpp"
#include "monge/io.hpp"
#include "monge/oracles.hpp"
#include "monge/transport.hpp"
#include "support.hpp"

using namespace monge;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
  void require(bool cond, const std::string& what) {
    if (!cond && ok) detail = what;
    ok = ok && cond;
  }
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

struct Run {
  double alpha, eps;
  MongeProblemSpec spec;
  std::shared_ptr<const DensitySolution> sol;
};

// alpha x eps x {tent spec, mirror}: 18 assembled densities.
std::vector<Run> grid_runs(double* seconds) {
  std::vector<Run> out;
  const auto t0 = std::chrono::steady_clock::now();
  for (double alpha : {0.5, 1.0, 2.0}) {
    for (double eps : {0.1, 0.01, 0.001}) {
      for (bool mirror : {false, true}) {
        const MongeProblemSpec spec = mirror ? mirror_transform(test::tent_spec(alpha)) : test::tent_spec(alpha);
        out.push_back({alpha, eps, spec, std::make_shared<const DensitySolution>(assemble_density(spec, test::params(eps)))});
      }
    }
  }
  *seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

std::string tag(const Run& r) {
  std::ostringstream os;
  os << to_string(r.spec.assumption) << " alpha=" << r.alpha << " eps=" << r.eps;
  return os.str();
}

// Nodes plus cell midpoints of the sampling grid.
std::vector<double> probe_points(const DensitySolution& s) {
  std::vector<double> pts = s.nodes();
  for (std::size_t i = 0; i + 1 < s.nodes().size(); ++i) pts.push_back(0.5 * (s.nodes()[i] + s.nodes()[i + 1]));
  return pts;
}

Outcome duality(const std::vector<Run>& runs, double seconds) {
  Outcome o;
  double worst = 0.0;
  for (const auto& r : runs) {
    const EnergyReport e = duality_gap(*r.sol);
    const double scale = std::max(1.0, std::abs(e.primal));
    const double g1 = std::abs(e.primal - e.dual) / scale, g2 = std::abs(e.primal - e.xi_total) / scale;
    worst = std::max({worst, g1, g2});
    o.require(g1 <= 1e-6 && g2 <= 1e-6, tag(r) + " gap " + sci(std::max(g1, g2)));
  }
  o.require(seconds < 10.0, "18 runs took " + std::to_string(seconds) + " s");
  if (o.ok) o.detail = "18 runs, max relative gap " + sci(worst) + ", " + std::to_string(seconds) + " s";
  return o;
}

Outcome constraints(const std::vector<Run>& runs) {
  Outcome o;
  double mass = 0.0, neg = 0.0, slope = 0.0, ends = 0.0;
  for (const auto& r : runs) {
    const DensitySolution& s = *r.sol;
    const double a = r.alpha;
    mass = std::max(mass, std::abs(s.mass() - 1.0));
    o.require(std::abs(s.mass() - 1.0) <= 1e-8, tag(r) + " mass");
    double min_u = 0.0, max_slope = 0.0;
    for (double y : probe_points(s)) {
      min_u = std::min(min_u, s.density(y));
      max_slope = std::max(max_slope, std::abs(s.slope(y)));
    }
    neg = std::min(neg, min_u);
    slope = std::max(slope, max_slope / a - 1.0);
    o.require(min_u >= -1e-12, tag(r) + " min u " + sci(min_u));
    o.require(max_slope <= a * (1.0 + 1e-10), tag(r) + " slope " + sci(max_slope));
    const double e = std::max(std::abs(s.density(s.support().lo)), std::abs(s.density(s.support().hi)));
    ends = std::max(ends, e);
    o.require(e <= 1e-12, tag(r) + " endpoint value " + sci(e));
    const Interval t = s.spec().target;
    for (double y : uniform_grid(t.lo - 1.0, t.hi + 1.0, 1201)) {
      if (y >= s.support().lo && y <= s.support().hi) continue;
      o.require(s.density(y) == 0.0 && s.slope(y) == 0.0 && s.cdf(y) == (y < s.support().lo ? 0.0 : s.mass()),
                tag(r) + " nonzero outside the support");
    }
  }
  if (o.ok) {
    o.detail = "max |mass-1| " + sci(mass) + ", min u " + sci(neg) + ", max slope excess " + sci(slope) +
               ", max endpoint |u| " + sci(ends);
  }
  return o;
}

Outcome euler_lagrange(const std::vector<Run>& runs) {
  Outcome o;
  double worst = 0.0, worst_fd = 0.0;
  for (const auto& r : runs) {
    const DensitySolution& s = *r.sol;
    const DualField& d = s.dual();
    double res = 0.0;
    for (double y : s.nodes()) res = std::max(res, std::abs(std::exp(d.log_lambda(y)) * s.slope(y) - d.theta(y)));
    worst = std::max(worst, res);
    o.require(res <= 1e-8, tag(r) + " residual " + sci(res));
    // theta_y + |y| = 0: theta is quadratic, so the central difference is exact up to rounding.
    const double h = 1e-3;
    for (double y : uniform_grid(s.support().lo + h, s.support().hi - h, 101)) {
      const double fd = (d.theta(y + h) - d.theta(y - h)) / (2.0 * h) + std::abs(y);
      worst_fd = std::max(worst_fd, std::abs(fd));
    }
  }
  o.require(worst_fd <= 1e-9, "theta_y + |y| = " + sci(worst_fd));
  if (o.ok) o.detail = "max |lambda u_y - theta| " + sci(worst) + ", max |theta_y + |y|| " + sci(worst_fd);
  return o;
}

Outcome taylor() {
  Outcome o;
  std::string d;
  for (auto [a, e] : {std::pair{1.0, 0.1}, {1.0, 0.01}, {2.0, 0.1}}) {
    const double r = taylor_remainder_check(a, e, 1000);
    o.require(r <= e, "alpha=" + std::to_string(a) + " eps=" + std::to_string(e) + " remainder " + sci(r));
    d += (d.empty() ? "" : ", ") + sci(r) + " <= " + sci(e);
  }
  if (o.ok) o.detail = d;
  return o;
}

bool ordered(const std::vector<double>& v, int dir) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (dir * (v[i] - v[i - 1]) <= -1e-12) return false;
  }
  return true;
}

bool strictly(const std::vector<double>& v, int dir) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(dir * (v[i] - v[i - 1]) > -1e-12)) return false;
  }
  return ordered(v, dir);
}

Outcome monotonicity() {
  Outcome o;
  for (double eps : {0.1, 0.01, 0.001}) {
    for (bool mirror : {false, true}) {
      const MongeProblemSpec spec = mirror ? mirror_transform(test::tent_spec()) : test::tent_spec();
      const ApproxParams p = test::params(eps);
      const int dir = mirror ? -1 : 1;
      const std::string name = std::string(mirror ? "II" : "I") + " eps=" + format_double(eps);
      const Interval t = spec.target;
      // M in r on the solved support.
      const DensitySolution s = assemble_density(spec, p);
      const Interval sup = s.support();
      const double r_lo = 0.5 * std::min(sup.lo * sup.lo, sup.hi * sup.hi);
      const double r_hi = 0.5 * std::max(sup.lo * sup.lo, sup.hi * sup.hi);
      std::vector<double> m;
      for (double r : uniform_grid(r_lo, r_hi, 50)) m.push_back(boundary_residual(r, sup, spec, eps));
      o.require(strictly(m, dir), name + " residual not monotone in r");
      // C and mass in the free endpoint.
      const std::vector<double> ends = mirror ? uniform_grid(t.lo + 0.25, t.hi, 50) : uniform_grid(t.lo, t.hi - 0.25, 50);
      std::vector<double> cs, pis;
      for (double e : ends) {
        const Interval supp = mirror ? Interval{t.lo, e} : Interval{e, t.hi};
        cs.push_back(solve_constant(supp, spec, eps, 1e-14));
        pis.push_back(total_mass(e, spec, p));
      }
      o.require(strictly(cs, dir), name + " constant not monotone in the endpoint");
      o.require(strictly(pis, -dir), name + " mass not monotone in the endpoint");
    }
  }
  if (o.ok) o.detail = "M(r), C(s), Pi(s) ordered at 50 samples, eps in {0.1,0.01,0.001}, both assumptions";
  return o;
}

double tent_distance(const DensitySolution& s, const TentDensity& t) {
  double d = 0.0;
  const Interval g = s.spec().target;
  for (double y : uniform_grid(g.lo, g.hi, 2001)) d = std::max(d, std::abs(s.density(y) - t(y)));
  for (double y : s.nodes()) d = std::max(d, std::abs(s.density(y) - t(y)));
  return d;
}

Outcome tent() {
  Outcome o;
  const MongeProblemSpec spec = test::tent_spec();
  const TentDensity t = tent_limit_density(spec);
  o.require(t.support == Interval{3.0, 5.0} && t.height() == 1.0, "tent fixture is not [3,5] with height 1");
  std::vector<double> dist;
  double p_star = 0.0, e = 0.0;
  for (double eps : {0.1, 0.01, 0.001}) {
    const DensitySolution s = assemble_density(spec, test::params(eps));
    dist.push_back(tent_distance(s, t));
    p_star = s.support_endpoint();
    e = s.expectation();
  }
  o.require(std::abs(p_star - 3.0) <= 0.05, "p* = " + format_double(p_star));
  o.require(dist.back() <= 0.05, "sup distance " + sci(dist.back()));
  o.require(std::abs(e - 4.0) <= 0.02, "expectation " + format_double(e));
  for (std::size_t i = 1; i < dist.size(); ++i) o.require(dist[i] <= dist[i - 1] + 1e-3, "distance increased");
  const GridDensity lp = discrete_expectation_optimizer(spec, 501);
  double dl = 0.0;
  for (int i = 0; i < lp.n(); ++i) dl = std::max(dl, std::abs(lp.u[i] - t(lp.y[i])));
  o.require(grid_violations(lp).empty() && dl <= 0.02, "expectation oracle vs tent " + sci(dl));
  if (o.ok) {
    o.detail = "p* " + format_double(p_star) + ", E " + format_double(e) + ", dist " + sci(dist[0]) + " > " +
               sci(dist[1]) + " > " + sci(dist[2]) + ", oracle vs tent " + sci(dl);
  }
  return o;
}

Outcome minimality() {
  Outcome o;
  const MongeProblemSpec spec = test::tent_spec();
  const GridDensity g = discrete_primal_minimizer(spec, 0.01, 401);
  const DensitySolution s = assemble_density(spec, test::params(0.01));
  const double full = primal_energy(s, EnergyConvention::FullTarget);
  const double diff = std::abs(g.objective - full);
  double d = 0.0;
  for (int i = 0; i < g.n(); ++i) d = std::max(d, std::abs(g.u[i] - s.density(g.y[i])));
  o.require(grid_violations(g).empty(), "oracle density infeasible");
  o.require(diff <= 1e-2, "objective difference " + sci(diff));
  o.require(d <= 0.05, "oracle sup distance " + sci(d));
  double worst = 1.0;
  int feasible = 0;
  for (const auto& p : random_feasible_probes(s, 20, 20240101)) {
    const double t1[] = {p.t};
    const ProbeReport r = second_variation_probe(s, p.phi, t1);
    feasible += r.feasible_count();
    worst = std::min(worst, r.min_primal_diff());
  }
  o.require(feasible == 20, "only " + std::to_string(feasible) + " of 20 probes feasible");
  o.require(worst >= -1e-10, "probe decreased the energy by " + sci(-worst));
  if (o.ok) {
    o.detail = "oracle " + format_double(g.objective) + " vs " + format_double(full) + " (diff " + sci(diff) +
               "), sup " + sci(d) + ", min probe increase " + sci(worst);
  }
  return o;
}

Outcome maps() {
  Outcome o;
  double res = 0.0, sym = 0.0, ident = 0.0, cost = 0.0;
  for (double eps : {0.1, 0.01, 0.001}) {
    for (bool mirror : {false, true}) {
      const MongeProblemSpec spec = mirror ? mirror_transform(test::tent_spec()) : test::tent_spec();
      auto s = std::make_shared<const DensitySolution>(assemble_density(spec, test::params(eps)));
      const TransportMapSolution inc = build_map(s, MapVariant::Increasing);
      const TransportMapSolution dec = build_map(s, MapVariant::Decreasing);
      const double r = std::max(pushforward_residual(inc), pushforward_residual(dec));
      res = std::max(res, r);
      o.require(r <= 1e-6, "pushforward residual " + sci(r));
      sym = std::max(sym, std::abs(inc.cost() - dec.cost()));
      o.require(std::abs(inc.cost() - dec.cost()) <= 1e-8, "cost(inc) != cost(dec)");
      const double lin = std::abs(source_mean(spec) - s->expectation());
      ident = std::max(ident, std::abs(inc.cost() - lin));
      o.require(std::abs(inc.cost() - lin) <= 1e-8, "cost != E[X] - E[Y]");
      if (!mirror && eps == 0.001) cost = inc.cost();
    }
  }
  o.require(std::abs(cost - 3.0) <= 0.05, "tent cost " + format_double(cost));
  if (o.ok) {
    o.detail = "residual " + sci(res) + ", |inc-dec| " + sci(sym) + ", |cost-(EX-EY)| " + sci(ident) +
               ", cost at eps=1e-3 " + format_double(cost);
  }
  return o;
}

Outcome mirror() {
  Outcome o;
  double worst = 0.0;
  auto track = [&](double a, double b, const std::string& what) {
    const double d = std::abs(a - b);
    worst = std::max(worst, d);
    o.require(d <= 1e-10, what + " differs by " + sci(d));
  };
  for (double alpha : {0.5, 1.0, 2.0}) {
    for (double eps : {0.1, 0.01, 0.001}) {
      const MongeProblemSpec a = test::tent_spec(alpha), b = mirror_transform(a);
      auto sa = std::make_shared<const DensitySolution>(assemble_density(a, test::params(eps)));
      auto sb = std::make_shared<const DensitySolution>(assemble_density(b, test::params(eps)));
      track(sa->support_endpoint(), -sb->support_endpoint(), "support endpoint");
      track(sa->constant(), sb->constant(), "constant");
      track(sa->expectation(), -sb->expectation(), "expectation");
      // Node i of one run mirrors node n-1-i of the other. Evaluating at -y instead can land
      // one ulp outside the mirrored support.
      const auto& ya = sa->nodes();
      const auto& yb = sb->nodes();
      o.require(ya.size() == yb.size(), "node counts differ");
      for (std::size_t i = 0; i < ya.size(); ++i) {
        const std::size_t j = yb.size() - 1 - i;
        track(ya[i], -yb[j], "node");
        track(sa->density_values()[i], sb->density_values()[j], "density");
        track(sa->slope(ya[i]), -sb->slope(yb[j]), "slope");
      }
      for (double y : uniform_grid(sa->support().lo + 1e-9, 5.0 - 1e-9, 257)) track(sa->density(y), sb->density(-y), "density");
      const EnergyReport ea = duality_gap(*sa), eb = duality_gap(*sb);
      track(ea.primal, eb.primal, "primal");
      track(ea.dual, eb.dual, "dual");
      track(ea.xi_total, eb.xi_total, "complementary");
      for (MapVariant v : {MapVariant::Increasing, MapVariant::Decreasing}) {
        const TransportMapSolution ma = build_map(sa, v, 401), mb = build_map(sb, v, 401);
        track(ma.cost(), mb.cost(), "cost");
        for (double x : uniform_grid(6.0, 8.0, 101)) track(ma(x), -mb(-x), "map");
      }
    }
  }
  if (o.ok) o.detail = "max mirrored discrepancy " + sci(worst) + " over 9 (alpha, eps) pairs";
  return o;
}

Outcome determinism() {
  Outcome o;
  RunConfig cfg;
  cfg.problem = test::tent_spec();
  cfg.quiet = true;
  const fs::path root = fs::temp_directory_path() / "monge_acceptance_determinism";
  fs::remove_all(root);
  std::ostringstream sink;
  for (const char* run : {"a", "b"}) {
    cfg.output = root / run;
    o.require(cmd_solve(cfg, sink) == 0, "cmd_solve failed");
    o.require(cmd_sweep(cfg, sink) == 0, "cmd_sweep failed");
  }
  int files = 0;
  for (const auto& e : fs::recursive_directory_iterator(root / "a")) {
    if (e.path().extension() != ".csv") continue;
    const fs::path other = root / "b" / fs::relative(e.path(), root / "a");
    o.require(fs::exists(other) && read_text(e.path()) == read_text(other), "differs: " + other.string());
    ++files;
  }
  o.require(files == 4, "expected 4 CSV files, found " + std::to_string(files));
  fs::remove_all(root);
  if (o.ok) o.detail = std::to_string(files) + " CSV files byte-identical across two runs";
  return o;
}

}  // namespace

int main() {
  double seconds = 0.0;
  std::vector<Run> runs;
  try {
    runs = grid_runs(&seconds);
  } catch (const MongeError& e) {
    std::printf("FAIL  grid construction: %s\n", e.what());
    return 1;
  }
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"1 duality identity", [&] { return duality(runs, seconds); }},
      {"2 constraint suite", [&] { return constraints(runs); }},
      {"3 euler-lagrange consistency", [&] { return euler_lagrange(runs); }},
      {"4 taylor remainder", taylor},
      {"5 monotonicity suite", monotonicity},
      {"6 tent-limit convergence", tent},
      {"7 global minimality cross-check", minimality},
      {"8 map correctness", maps},
      {"9 mirror symmetry", mirror},
      {"10 determinism", determinism},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const MongeError& e) {
      o.ok = false;
      o.detail = e.what();
    }
    failed += !o.ok;
    std::printf("%s  %s: %s\n", o.ok ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed ? 1 : 0;
}
