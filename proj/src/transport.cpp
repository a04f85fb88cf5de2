#include "monge/transport.hpp"

#include <algorithm>
#include <cmath>

#include "monge/error.hpp"

namespace monge {

std::string_view to_string(MapVariant v) { return v == MapVariant::Increasing ? "increasing" : "decreasing"; }

MonotoneProfile source_cdf(const MongeProblemSpec& spec) {
  // Hermite cubics with the density as derivative reproduce the quadratic
  // CDF of a linear density exactly on each cell.
  const auto& x = spec.density.nodes();
  const auto& f = spec.density.values();
  const double m = spec.density.mass();
  std::vector<double> F(x.size(), 0.0), dF(x.size());
  for (std::size_t k = 0; k + 1 < x.size(); ++k) F[k + 1] = F[k] + 0.5 * (f[k] + f[k + 1]) * (x[k + 1] - x[k]);
  for (std::size_t k = 0; k < x.size(); ++k) {
    F[k] /= m;
    dF[k] = f[k] / m;
  }
  F.back() = 1.0;
  return MonotoneProfile(x, std::move(F), std::move(dF));
}

MonotoneProfile target_cdf(const DensitySolution& s) {
  return MonotoneProfile(s.nodes(), s.cdf_values(), s.density_values());
}

double source_mean(const MongeProblemSpec& spec) { return spec.density.first_moment() / spec.density.mass(); }

namespace {

double source_level(const MonotoneProfile& F, double x) {
  const Interval d = F.domain();
  if (x <= d.lo) return 0.0;
  if (x >= d.hi) return 1.0;
  return std::clamp(F(x), 0.0, 1.0);
}

}  // namespace

TransportMapSolution::TransportMapSolution(std::shared_ptr<const DensitySolution> solution, MapVariant variant,
                                           int samples)
    : solution_(std::move(solution)),
      variant_(variant),
      source_(source_cdf(solution_->spec())),
      profile_({0.0, 1.0}, {0.0, 1.0}) {
  if (samples < 2) fail(ErrorCode::DomainError, "map needs >= 2 samples");
  const Interval src = domain();
  x_ = chebyshev_lobatto(src.lo, src.hi, samples);
  s_.resize(x_.size());
  for (std::size_t k = 0; k < x_.size(); ++k) s_[k] = (*this)(x_[k]);
  profile_ = MonotoneProfile(x_, s_, {}, MonotoneProfile::Interpolation::Linear);
  cost_ = transport_cost(*this);
}

double TransportMapSolution::level(double x) const {
  const double F = source_level(source_, x);
  return variant_ == MapVariant::Increasing ? F : 1.0 - F;
}

double TransportMapSolution::operator()(double x) const {
  // The target CDF ends at the mass of the solution, 1 up to quadrature
  // error; scale the level so both ends land on the support endpoints.
  return solution_->inverse_cdf(level(x) * solution_->mass());
}

TransportMapSolution build_map(std::shared_ptr<const DensitySolution> solution, MapVariant variant, int samples) {
  return TransportMapSolution(std::move(solution), variant, samples);
}

double transport_cost(const ScalarFn& map, const MongeProblemSpec& spec, double quad_tol) {
  const auto& nodes = spec.density.nodes();
  std::vector<double> br(nodes.begin() + 1, nodes.end() - 1);
  const double m = spec.density.mass();
  auto f = [&](double x) { return std::abs(x - map(x)) * spec.density(x) / m; };
  return integrate(f, spec.source.lo, spec.source.hi, br, quad_tol);
}

double transport_cost(const TransportMapSolution& map, double quad_tol) {
  return transport_cost([&](double x) { return map(x); }, map.spec(), quad_tol);
}

double pushforward_residual(const ScalarFn& map, MapVariant variant, const DensitySolution& s, int n_probe) {
  const MonotoneProfile F = source_cdf(s.spec());
  const Interval src = s.spec().source;
  double worst = 0.0;
  for (double x : chebyshev_lobatto(src.lo, src.hi, std::max(n_probe, 2))) {
    const double lv = source_level(F, x);
    const double want = variant == MapVariant::Increasing ? lv : 1.0 - lv;
    worst = std::max(worst, std::abs(s.cdf(map(x)) / s.mass() - want));
  }
  return worst;
}

double pushforward_residual(const TransportMapSolution& map, int n_probe) {
  return pushforward_residual([&](double x) { return map(x); }, map.variant(), map.solution(), n_probe);
}

}  // namespace monge
