#include <cmath>
#include <iomanip>
#include <memory>
#include <numbers>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "monge/cli.hpp"
#include "monge/convergence.hpp"
#include "monge/duality.hpp"
#include "monge/energy.hpp"
#include "monge/io.hpp"
#include "monge/oracles.hpp"
#include "monge/transport.hpp"

namespace monge {

using ojson = nlohmann::ordered_json;

namespace {

// Stream that swallows output under --quiet.
struct Sink {
  std::ostream& os;
  bool quiet;
  template <class T>
  Sink& operator<<(const T& v) {
    if (!quiet) os << v;
    return *this;
  }
};

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : "; ") + s;
  return out;
}

void check_run(const RunConfig& cfg) {
  if (cfg.epsilons.empty()) fail(ErrorCode::ConfigError, "epsilons list is empty");
  const ValidationReport v = validate_spec(cfg.problem);
  if (!v.valid()) {
    fail(ErrorCode::InvalidSpec, join(v.violations));
  }
}

void check_epsilon(const RunConfig& cfg, double eps) {
  check_params(cfg.params(eps));
  if (!(eps >= kEpsilonFloor)) {
    std::ostringstream os;
    os << "epsilon " << eps << " below the floor " << kEpsilonFloor;
    fail(ErrorCode::InvalidSpec, os.str());
  }
}

std::string write_json(const ojson& j) { return j.dump(2) + "\n"; }

ojson energy_json(const DensitySolution& s, const EnergyReport& e) {
  ojson j;
  j["epsilon"] = s.epsilon();
  j["assumption"] = to_string(s.spec().assumption);
  j["support"] = {s.support().lo, s.support().hi};
  j["support_endpoint"] = s.support_endpoint();
  j["constant"] = s.constant();
  j["domain_convention"] = std::string(to_string(e.convention));
  j["primal"] = e.primal;
  j["dual"] = e.dual;
  j["xi_total"] = e.xi_total;
  j["gap"] = e.gap_primal_dual;
  j["relative_gap"] = e.relative_gap();
  j["gap_primal_xi"] = e.gap_primal_xi;
  j["gap_xi_dual"] = e.gap_xi_dual;
  j["primal_full_target"] = e.primal + e.full_target_offset;
  j["full_target_offset"] = e.full_target_offset;
  j["expectation"] = s.expectation();
  j["mass_error"] = e.mass_error;
  j["slope_excess"] = e.slope_excess;
  j["negativity"] = e.negativity;
  return j;
}

std::string density_csv(const DensitySolution& s) {
  const auto& y = s.nodes();
  std::vector<double> theta(y.size()), ll(y.size()), sl(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    theta[i] = s.dual().theta(y[i]);
    ll[i] = s.dual().log_lambda(y[i]);
    sl[i] = s.slope(y[i]);
  }
  return csv_table({"y", "u", "theta", "log_lambda", "slope"}, {y, s.density_values(), theta, ll, sl});
}

std::string sweep_csv(const std::vector<SweepRow>& rows, bool timing) {
  std::string out = "epsilon,constant,support_endpoint,mass_err,sup_slope,expectation,primal,dual,gap,dist_tent,ms,status\n";
  for (const auto& r : rows) {
    const double nan = std::nan("");
    auto v = [&](double x) { return format_double(r.ok() ? x : nan); };
    out += format_double(r.epsilon) + "," + v(r.constant) + "," + v(r.support_endpoint) + "," + v(r.mass_err) + "," +
           v(r.sup_slope) + "," + v(r.expectation) + "," + v(r.primal) + "," + v(r.dual) + "," + v(r.gap) + "," +
           v(r.dist_tent) + "," + format_double(timing ? r.ms : 0.0) + "," + r.status + "\n";
  }
  return out;
}

int report_error(const MongeError& e, std::ostream& out, const char* stage) {
  out << "error [" << stage << "]: " << e.what() << "\n";
  return exit_code_for(e.code());
}

// ---------------------------------------------------------------------------
// Invariant battery

struct Check {
  std::string name;
  enum Status { Pass, Fail, Skip } status;
  std::string detail;
};

std::string sci(double v) {
  std::ostringstream os;
  os << std::setprecision(3) << std::scientific << v;
  return os.str();
}

struct Battery {
  std::vector<Check> rows;
  void add(std::string name, bool ok, std::string detail) {
    rows.push_back({std::move(name), ok ? Check::Pass : Check::Fail, std::move(detail)});
  }
  void skip(std::string name, std::string detail) { rows.push_back({std::move(name), Check::Skip, std::move(detail)}); }
  bool passed() const {
    for (const auto& r : rows) {
      if (r.status == Check::Fail) return false;
    }
    return true;
  }
};

std::vector<double> samples(double lo, double hi, int n) { return uniform_grid(lo, hi, n); }

bool ordered(const std::vector<double>& v, int direction) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (direction * (v[i] - v[i - 1]) <= -1e-12) return false;
  }
  return true;
}

void monotonicity_checks(Battery& b, const MongeProblemSpec& spec, const ApproxParams& p, const std::string& tag) {
  const bool first = spec.assumption == Assumption::I;
  const int dir = first ? 1 : -1;
  const Interval t = spec.target;
  const DensitySolution s = assemble_density(spec, p);
  const Interval sup = s.support();
  const auto rb = [&] {
    const double a = 0.5 * sup.lo * sup.lo, c = 0.5 * sup.hi * sup.hi;
    return std::pair{std::min(a, c), std::max(a, c)};
  }();
  std::vector<double> m;
  for (double r : samples(rb.first, rb.second, 50)) m.push_back(boundary_residual(r, sup, spec, p.epsilon));
  b.add("monotone residual in constant " + tag, ordered(m, dir), first ? "increasing" : "decreasing");

  const double gap = 0.05 * t.length();
  std::vector<double> ends = first ? samples(t.lo, t.hi - gap, 50) : samples(t.lo + gap, t.hi, 50);
  std::vector<double> cs, masses;
  for (double e : ends) {
    const Interval supp = first ? Interval{e, t.hi} : Interval{t.lo, e};
    cs.push_back(solve_constant(supp, spec, p.epsilon, 0.01 * p.root_tol));
    masses.push_back(total_mass(e, spec, p));
  }
  b.add("monotone constant in endpoint " + tag, ordered(cs, dir), first ? "increasing" : "decreasing");
  b.add("monotone mass in endpoint " + tag, ordered(masses, -dir), first ? "decreasing" : "increasing");
}

void solution_checks(Battery& b, const RunConfig& cfg, double eps) {
  const ApproxParams p = cfg.params(eps);
  const std::string tag = "[eps=" + format_double(eps) + "]";
  auto s = std::make_shared<const DensitySolution>(assemble_density(cfg.problem, p));
  const double a = s->alpha();
  const Interval sup = s->support();

  const double mass_err = std::abs(s->mass() - 1.0);
  b.add("mass " + tag, mass_err <= 1e-8, "|mass-1| = " + sci(mass_err));
  double min_u = 0.0;
  for (double u : s->density_values()) min_u = std::min(min_u, u);
  b.add("nonnegativity " + tag, min_u >= -1e-12, "min u = " + sci(min_u));
  double sup_slope = 0.0;
  for (double y : s->nodes()) sup_slope = std::max(sup_slope, std::abs(s->slope(y)));
  b.add("slope bound |u_y| <= alpha " + tag, sup_slope <= a * (1.0 + 1e-10), "sup |u_y| = " + format_double(sup_slope));
  const double ends = std::max(std::abs(s->density_values().front()), std::abs(s->density_values().back()));
  b.add("zero at support endpoints " + tag, ends <= 1e-12, "max |u| = " + sci(ends));
  const Interval t = cfg.problem.target;
  bool outside = true;
  for (double y : uniform_grid(t.lo - 1.0, t.hi + 1.0, 701)) {
    if (y >= sup.lo && y <= sup.hi) continue;
    outside = outside && s->density(y) == 0.0 && s->slope(y) == 0.0;
  }
  b.add("zero extension " + tag, outside, "outside the support");

  const EnergyReport e = duality_gap(*s);
  const double scale = std::max(1.0, std::abs(e.primal));
  b.add("duality gap primal-dual " + tag, std::abs(e.gap_primal_dual) / scale <= 1e-6, sci(e.gap_primal_dual));
  b.add("duality gap primal-complementary " + tag, std::abs(e.gap_primal_xi) / scale <= 1e-6, sci(e.gap_primal_xi));

  double el = 0.0;
  for (double y : s->nodes()) {
    el = std::max(el, std::abs(std::exp(s->dual().log_lambda(y)) * s->slope(y) - s->dual().theta(y)));
  }
  b.add("euler-lagrange lambda u_y = theta " + tag, el <= 1e-8, "sup residual = " + sci(el));

  const double w = sup.length();
  Perturbation sine{[=](double y) { return std::sin(std::numbers::pi * (y - sup.lo) / w); },
                    [=](double y) { return std::numbers::pi / w * std::cos(std::numbers::pi * (y - sup.lo) / w); },
                    {}};
  const double ts[] = {-1e-3, 1e-3};
  const ProbeReport pr = second_variation_probe(*s, sine, ts);
  double worst_primal = pr.min_primal_diff(), worst_dual = pr.max_dual_diff();
  int feasible = pr.feasible_count();
  for (const auto& fp : random_feasible_probes(*s, 20, 20240101)) {
    const double t1[] = {fp.t};
    const ProbeReport r = second_variation_probe(*s, fp.phi, t1);
    feasible += r.feasible_count();
    worst_primal = std::min(worst_primal, r.min_primal_diff());
    worst_dual = std::max(worst_dual, r.max_dual_diff());
  }
  b.add("primal probes nondecreasing " + tag, worst_primal >= -1e-10,
        "min diff = " + sci(worst_primal) + " over " + std::to_string(feasible) + " feasible steps");
  b.add("dual probes nonincreasing " + tag, worst_dual <= 1e-10, "max diff = " + sci(worst_dual));

  const TransportMapSolution inc = build_map(s, MapVariant::Increasing, std::min(cfg.map_samples, 401));
  const TransportMapSolution dec = build_map(s, MapVariant::Decreasing, std::min(cfg.map_samples, 401));
  const double ri = pushforward_residual(inc), rd = pushforward_residual(dec);
  b.add("pushforward residual " + tag, std::max(ri, rd) <= 1e-6, sci(ri) + " / " + sci(rd));
  b.add("cost increasing = decreasing " + tag, std::abs(inc.cost() - dec.cost()) <= 1e-8,
        sci(inc.cost() - dec.cost()));
  const double lin = std::abs(source_mean(cfg.problem) - s->expectation());
  b.add("cost equals mean difference " + tag, std::abs(inc.cost() - lin) <= 1e-8, sci(inc.cost() - lin));

  if (eps < 0.5 * a * a) {
    const double tr = taylor_remainder_check(a, eps);
    b.add("taylor remainder <= eps " + tag, tr <= eps, "max = " + sci(tr));
  } else {
    b.skip("taylor remainder <= eps " + tag, "needs eps < alpha^2/2");
  }
  monotonicity_checks(b, cfg.problem, p, tag);
}

bool fixture_present(const std::optional<std::filesystem::path>& stem) {
  if (!stem) return false;
  std::filesystem::path csv = *stem, sidecar = *stem;
  csv += ".csv";
  sidecar += ".json";
  return std::filesystem::exists(csv) && std::filesystem::exists(sidecar);
}

void fixture_checks(Battery& b, const RunConfig& cfg) {
  const MongeProblemSpec& spec = cfg.problem;
  if (!fixture_present(cfg.expectation_fixture)) {
    b.skip("expectation oracle fixture", cfg.expectation_fixture ? "fixture not found" : "no fixture configured");
  } else {
    const GridDensity g = read_fixture(*cfg.expectation_fixture);
    const auto v = grid_violations(g);
    b.add("expectation oracle constraints", v.empty(), v.empty() ? "grid constraints hold" : join(v));
    const TentDensity tent = tent_limit_density(spec);
    double d = 0.0;
    for (int i = 0; i < g.n(); ++i) d = std::max(d, std::abs(g.u[i] - tent(g.y[i])));
    b.add("expectation oracle vs tent", d <= 0.02 && g.alpha == spec.alpha, "sup distance = " + sci(d));
  }
  if (!fixture_present(cfg.primal_fixture)) {
    b.skip("primal oracle fixture", cfg.primal_fixture ? "fixture not found" : "no fixture configured");
  } else {
    const GridDensity g = read_fixture(*cfg.primal_fixture);
    const auto v = grid_violations(g);
    b.add("primal oracle constraints", v.empty(), v.empty() ? "grid constraints hold" : join(v));
    if (std::isnan(g.epsilon) || g.alpha != spec.alpha) {
      b.add("primal oracle vs solution", false, "fixture epsilon/alpha do not match the problem");
      return;
    }
    const DensitySolution s = assemble_density(spec, cfg.params(g.epsilon));
    const double diff = std::abs(g.objective - primal_energy(s, EnergyConvention::FullTarget));
    double d = 0.0;
    for (int i = 0; i < g.n(); ++i) d = std::max(d, std::abs(g.u[i] - s.density(g.y[i])));
    b.add("primal oracle objective", diff <= 1e-2, "|difference| = " + sci(diff));
    b.add("primal oracle density", d <= 0.05, "sup distance = " + sci(d));
  }
}

}  // namespace

// ---------------------------------------------------------------------------

int cmd_validate(const RunConfig& cfg, std::ostream& os) {
  Sink out{os, cfg.quiet};
  const ValidationReport v = validate_spec(cfg.problem);
  if (!v.valid()) {
    for (const auto& s : v.violations) os << "invalid: " << s << "\n";
    return kExitConfig;
  }
  out << "spec: valid (assumption " << to_string(cfg.problem.assumption) << ")\n";
  if (cfg.epsilons.empty()) {
    os << "invalid: epsilons list is empty\n";
    return kExitConfig;
  }
  int rc = kExitOk;
  for (double eps : cfg.epsilons) {
    try {
      check_epsilon(cfg, eps);
      if (check_capacity(cfg.problem, cfg.params(eps))) {
        out << "capacity at eps=" << format_double(eps) << ": ok\n";
      } else {
        os << "capacity at eps=" << format_double(eps) << ": target width " << cfg.problem.target.length()
           << " cannot hold unit mass; requires width about 2/sqrt(alpha) = " << capacity_width(cfg.problem.alpha)
           << "\n";
        rc = std::max(rc, static_cast<int>(kExitCapacity));
      }
    } catch (const MongeError& e) {
      return report_error(e, os, "validate");
    }
  }
  return rc;
}

int cmd_solve(const RunConfig& cfg, std::ostream& os) {
  Sink out{os, cfg.quiet};
  try {
    check_run(cfg);
    for (double eps : cfg.epsilons) check_epsilon(cfg, eps);
  } catch (const MongeError& e) {
    return report_error(e, os, "config");
  }
  for (double eps : cfg.epsilons) {
    try {
      const DensitySolution s = assemble_density(cfg.problem, cfg.params(eps));
      const EnergyReport e = duality_gap(s);
      const auto dir = cfg.output / epsilon_dir(eps);
      write_atomic(dir / "density.csv", density_csv(s));
      write_atomic(dir / "energy.json", write_json(energy_json(s, e)));
      out << "eps=" << format_double(eps) << " endpoint=" << format_double(s.support_endpoint())
          << " primal=" << format_double(e.primal) << " gap=" << sci(e.gap_primal_dual) << " -> " << dir.string()
          << "\n";
    } catch (const MongeError& e) {
      return report_error(e, os, "solve");
    }
  }
  return kExitOk;
}

int cmd_map(const RunConfig& cfg, std::ostream& os) {
  Sink out{os, cfg.quiet};
  try {
    check_run(cfg);
    for (double eps : cfg.epsilons) check_epsilon(cfg, eps);
    if (cfg.map_samples < 2) fail(ErrorCode::ConfigError, "map_samples must be >= 2");
  } catch (const MongeError& e) {
    return report_error(e, os, "config");
  }
  for (double eps : cfg.epsilons) {
    const char* stage = "solve";
    try {
      auto s = std::make_shared<const DensitySolution>(assemble_density(cfg.problem, cfg.params(eps)));
      stage = "map";
      const TransportMapSolution inc = build_map(s, MapVariant::Increasing, cfg.map_samples);
      const TransportMapSolution dec = build_map(s, MapVariant::Decreasing, cfg.map_samples);
      const auto dir = cfg.output / epsilon_dir(eps);
      write_atomic(dir / "map.csv",
                   csv_table({"x", "s_increasing", "s_decreasing"}, {inc.sample_x(), inc.sample_s(), dec.sample_s()}));
      ojson j;
      j["epsilon"] = eps;
      j["cost_increasing"] = inc.cost();
      j["cost_decreasing"] = dec.cost();
      j["cost_difference"] = inc.cost() - dec.cost();
      j["residual_increasing"] = pushforward_residual(inc);
      j["residual_decreasing"] = pushforward_residual(dec);
      j["source_mean"] = source_mean(cfg.problem);
      j["target_expectation"] = s->expectation();
      j["mean_difference"] = std::abs(source_mean(cfg.problem) - s->expectation());
      write_atomic(dir / "cost.json", write_json(j));
      out << "eps=" << format_double(eps) << " cost=" << format_double(inc.cost()) << " -> " << dir.string() << "\n";
    } catch (const MongeError& e) {
      return report_error(e, os, stage);
    }
  }
  return kExitOk;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& os) {
  Sink out{os, cfg.quiet};
  try {
    check_run(cfg);
    check_params(cfg.params(1.0));
  } catch (const MongeError& e) {
    return report_error(e, os, "config");
  }
  const auto rows = epsilon_sweep(cfg.problem, cfg.epsilons, cfg.params(1.0));
  ojson rep;
  try {
    const ConvergenceReport r = convergence_report(rows);
    rep["rows"] = r.rows;
    rep["rows_ok"] = r.rows_ok;
    rep["order"] = r.order_defined ? ojson(r.order) : ojson(nullptr);
    rep["order_defined"] = r.order_defined;
    rep["distance_monotone"] = r.distance_monotone;
    rep["endpoint_monotone"] = r.endpoint_monotone;
    rep["expectation_monotone"] = r.expectation_monotone;
    rep["max_abs_gap"] = r.max_abs_gap;
    rep["flags"] = r.flags;
  } catch (const MongeError& e) {
    rep["rows"] = rows.size();
    rep["error"] = e.what();
  }
  ojson per = ojson::array();
  bool all_ok = true;
  for (const auto& row : rows) {
    ojson j;
    j["epsilon"] = row.epsilon;
    j["status"] = row.status;
    if (!row.ok()) j["message"] = row.message;
    j["ms"] = row.ms;
    per.push_back(j);
    all_ok = all_ok && row.ok();
    out << "eps=" << format_double(row.epsilon) << " " << row.status;
    if (row.ok()) out << " dist_tent=" << sci(row.dist_tent) << " gap=" << sci(row.gap);
    out << "\n";
    if (!row.ok()) os << "row eps=" << format_double(row.epsilon) << " failed: " << row.message << "\n";
  }
  rep["row_status"] = per;
  try {
    write_atomic(cfg.output / "sweep.csv", sweep_csv(rows, cfg.timing));
    write_atomic(cfg.output / "report.json", write_json(rep));
  } catch (const MongeError& e) {
    return report_error(e, os, "write");
  }
  return all_ok ? kExitOk : kExitSolver;
}

int cmd_verify(const RunConfig& cfg, std::ostream& os) {
  Sink out{os, cfg.quiet};
  Battery b;
  try {
    check_run(cfg);
    for (double eps : cfg.epsilons) check_epsilon(cfg, eps);
  } catch (const MongeError& e) {
    return report_error(e, os, "config");
  }
  try {
    for (double eps : cfg.epsilons) solution_checks(b, cfg, eps);
    fixture_checks(b, cfg);
  } catch (const MongeError& e) {
    return report_error(e, os, "verify");
  }
  int failed = 0;
  for (const auto& c : b.rows) {
    const char* tag = c.status == Check::Pass ? "PASS" : c.status == Check::Fail ? "FAIL" : "SKIP";
    if (c.status == Check::Fail) {
      ++failed;
      os << tag << "  " << c.name << "  " << c.detail << "\n";
    } else {
      out << tag << "  " << c.name << "  " << c.detail << "\n";
    }
  }
  out << (failed ? "verify: " + std::to_string(failed) + " check(s) failed\n" : std::string("verify: all checks passed\n"));
  return b.passed() ? kExitOk : kExitVerify;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Approximate optimal 1-D Monge transport via a regularized dual construction"};
  std::string command, config, outdir;
  std::vector<double> eps;
  int grid = 0;
  bool quiet = false, timing = false;
  app.add_option("command", command, "validate | solve | map | sweep | verify")
      ->required()
      ->check(CLI::IsMember({"validate", "solve", "map", "sweep", "verify"}));
  app.add_option("--config", config, "JSON config document")->required();
  app.add_option("--out", outdir, "output directory (overrides config)");
  app.add_option("--epsilon", eps, "regularization parameter; repeat to list several (replaces config list)")
      ->take_last()
      ->expected(1)
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  app.add_option("--grid", grid, "sampling nodes on the support (overrides config)");
  app.add_flag("--quiet", quiet, "print errors only");
  app.add_flag("--timing", timing, "record wall time in sweep.csv (breaks byte-identical output)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  RunConfig cfg;
  try {
    cfg = load_config(config);
  } catch (const MongeError& e) {
    err << "error [config]: " << e.what() << "\n";
    return exit_code_for(e.code());
  }
  if (!outdir.empty()) cfg.output = outdir;
  if (!eps.empty()) cfg.epsilons = eps;
  if (app.count("--grid")) cfg.grid_n = grid;
  cfg.quiet = cfg.quiet || quiet;
  cfg.timing = cfg.timing || timing;

  // Success output goes to out, failures to err.
  std::ostringstream buf;
  int rc = kExitOk;
  if (command == "validate") rc = cmd_validate(cfg, buf);
  else if (command == "solve") rc = cmd_solve(cfg, buf);
  else if (command == "map") rc = cmd_map(cfg, buf);
  else if (command == "sweep") rc = cmd_sweep(cfg, buf);
  else rc = cmd_verify(cfg, buf);
  (rc == kExitOk ? out : err) << buf.str();
  return rc;
}

}  // namespace monge
