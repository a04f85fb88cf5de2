#include "monge/problem.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "monge/error.hpp"

namespace monge {

std::string to_string(Assumption a) { return a == Assumption::I ? "I" : "II"; }

std::string to_string(SourceDensity::Kind k) {
  switch (k) {
    case SourceDensity::Kind::Uniform: return "uniform";
    case SourceDensity::Kind::PiecewiseLinear: return "piecewise_linear";
    case SourceDensity::Kind::Tabulated: return "tabulated";
  }
  return "unknown";
}

SourceDensity::SourceDensity(Kind kind, std::vector<double> nodes, std::vector<double> values)
    : kind_(kind), nodes_(std::move(nodes)), values_(std::move(values)) {
  if (nodes_.size() < 2 || nodes_.size() != values_.size()) {
    fail(ErrorCode::InvalidSpec, "density needs >= 2 nodes and one value per node");
  }
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!std::isfinite(nodes_[i]) || !std::isfinite(values_[i])) {
      fail(ErrorCode::InvalidSpec, "density nodes and values must be finite");
    }
    if (i > 0 && !(nodes_[i] > nodes_[i - 1])) {
      fail(ErrorCode::InvalidSpec, "density nodes must be strictly increasing");
    }
  }
}

SourceDensity SourceDensity::uniform(Interval support) {
  if (!(support.hi > support.lo)) fail(ErrorCode::InvalidSpec, "uniform density needs a < b");
  const double v = 1.0 / support.length();
  return SourceDensity(Kind::Uniform, {support.lo, support.hi}, {v, v});
}

SourceDensity SourceDensity::piecewise_linear(std::vector<double> nodes, std::vector<double> values) {
  return SourceDensity(Kind::PiecewiseLinear, std::move(nodes), std::move(values));
}

SourceDensity SourceDensity::tabulated(std::vector<double> nodes, std::vector<double> values) {
  return SourceDensity(Kind::Tabulated, std::move(nodes), std::move(values));
}

double SourceDensity::operator()(double x) const {
  if (x < nodes_.front() || x > nodes_.back()) return 0.0;
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
  std::size_t k = static_cast<std::size_t>(it - nodes_.begin());
  if (k >= nodes_.size()) return values_.back();
  k -= 1;
  const double w = (x - nodes_[k]) / (nodes_[k + 1] - nodes_[k]);
  return values_[k] + w * (values_[k + 1] - values_[k]);
}

double SourceDensity::mass() const {
  double m = 0.0;
  for (std::size_t k = 0; k + 1 < nodes_.size(); ++k) {
    m += 0.5 * (values_[k] + values_[k + 1]) * (nodes_[k + 1] - nodes_[k]);
  }
  return m;
}

double SourceDensity::first_moment() const {
  // On a cell, f is linear: int x f dx = h/6 * (f0 (2 x0 + x1) + f1 (x0 + 2 x1)).
  double m = 0.0;
  for (std::size_t k = 0; k + 1 < nodes_.size(); ++k) {
    const double x0 = nodes_[k], x1 = nodes_[k + 1];
    const double f0 = values_[k], f1 = values_[k + 1];
    m += (x1 - x0) / 6.0 * (f0 * (2.0 * x0 + x1) + f1 * (x0 + 2.0 * x1));
  }
  return m;
}

double SourceDensity::min_value() const { return *std::min_element(values_.begin(), values_.end()); }

SourceDensity SourceDensity::scaled(double factor) const {
  std::vector<double> v = values_;
  for (double& x : v) x *= factor;
  return SourceDensity(kind_, nodes_, std::move(v));
}

SourceDensity SourceDensity::reflected() const {
  std::vector<double> n(nodes_.rbegin(), nodes_.rend());
  for (double& x : n) x = -x;
  std::vector<double> v(values_.rbegin(), values_.rend());
  return SourceDensity(kind_, std::move(n), std::move(v));
}

namespace {

// Empty string when the density is admissible as a positive source density.
std::string density_defect(const SourceDensity& f) {
  const auto& v = f.values();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] < 0.0) {
      std::ostringstream os;
      os << "density is negative at x = " << f.nodes()[i];
      return os.str();
    }
    if (i + 1 < v.size() && v[i] == 0.0 && v[i + 1] == 0.0) {
      std::ostringstream os;
      os << "density vanishes on [" << f.nodes()[i] << ", " << f.nodes()[i + 1] << "]";
      return os.str();
    }
  }
  if (!(f.mass() > 0.0)) return "density has no mass";
  return {};
}

}  // namespace

SourceDensity normalize_density(const SourceDensity& density) {
  if (auto defect = density_defect(density); !defect.empty()) {
    fail(ErrorCode::NonPositiveDensity, defect);
  }
  const double m = density.mass();
  SourceDensity out = density.scaled(1.0 / m);
  // One correction step absorbs the rounding of the first division.
  const double m2 = out.mass();
  if (m2 != 1.0) out = out.scaled(1.0 / m2);
  return out;
}

void check_params(const ApproxParams& p) {
  if (!(p.epsilon > 0.0) || !std::isfinite(p.epsilon)) fail(ErrorCode::InvalidSpec, "epsilon must be > 0");
  if (p.grid_n < 33) fail(ErrorCode::InvalidSpec, "grid_n must be >= 33");
  if (!(p.root_tol > 0.0 && p.root_tol <= 1e-4)) fail(ErrorCode::InvalidSpec, "root_tol must lie in (0, 1e-4]");
  if (!(p.quad_tol > 0.0 && p.quad_tol <= 1e-4)) fail(ErrorCode::InvalidSpec, "quad_tol must lie in (0, 1e-4]");
}

ValidationReport validate_spec(const MongeProblemSpec& spec) {
  ValidationReport r;
  auto add = [&](const std::string& s) { r.violations.push_back(s); };
  const double a = spec.source.lo, b = spec.source.hi;
  const double c = spec.target.lo, d = spec.target.hi;

  for (double x : {a, b, c, d}) {
    if (!std::isfinite(x)) {
      add("interval endpoints must be finite");
      return r;
    }
  }
  if (!(spec.alpha > 0.0) || !std::isfinite(spec.alpha)) add("alpha > 0 violated");
  if (!(a < b)) add("a < b violated");
  if (!(c < d)) add("c < d violated");

  auto need = [&](bool ok, const char* what, double lhs, double rhs) {
    if (!ok) {
      std::ostringstream os;
      os << what << " violated (" << lhs << " vs " << rhs << ")";
      add(os.str());
    }
  };
  if (spec.assumption == Assumption::I) {
    need(0.0 <= c, "0 <= c", 0.0, c);
    need(d < a, "d < a", d, a);
  } else {
    need(b < c, "b < c", b, c);
    need(d <= 0.0, "d <= 0", d, 0.0);
  }
  // Disjointness is implied by the orderings above; stated separately so a
  // wrong assumption tag on an otherwise disjoint pair stays readable.
  if (!(b < c || d < a)) add("source and target intervals must be disjoint");

  const Interval ds = spec.density.support();
  if (ds.lo != a || ds.hi != b) add("density nodes must span the source interval exactly");
  if (auto defect = density_defect(spec.density); !defect.empty()) add(defect);
  if (std::abs(spec.density.mass() - 1.0) > kDensityMassTol) {
    std::ostringstream os;
    os << "density mass " << spec.density.mass() << " differs from 1 by more than " << kDensityMassTol;
    add(os.str());
  }
  return r;
}

}  // namespace monge
