#include <cmath>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "doctest.h"
#include "monge/duality.hpp"
#include "monge/error.hpp"
#include "monge/oracles.hpp"
#include "support.hpp"

using namespace monge;

namespace {

// ln(lambda) solving lambda^2 (alpha^2 + 2 eps ln lambda) = theta^2 by bisection on ln(lambda).
double oracle_log_lambda(double theta, double alpha, double eps) {
  if (std::abs(theta) >= alpha) return std::log(std::abs(theta) / alpha);
  const double lo = -alpha * alpha / (2.0 * eps);
  return test::bisect(
      [&](double l) { return std::exp(2.0 * l) * (alpha * alpha + 2.0 * eps * l) - theta * theta; }, lo, 0.0);
}

}  // namespace

TEST_CASE("E at the endpoints of its domain") {
  CHECK(eval_E(1.0, 1.0, 0.01) == doctest::Approx(1.0));
  CHECK(eval_E(std::exp(-50.0), 1.0, 0.01) == doctest::Approx(0.0));
  CHECK(eval_E_log(-0.1, 2.0, 0.1) == doctest::Approx(std::exp(-0.2) * (4.0 - 0.02)));
}

TEST_CASE("critical log-lambda matches an independent bisection") {
  for (double alpha : {0.5, 1.0, 2.0}) {
    for (double eps : {0.1, 0.01, 0.001, 1e-6}) {
      for (double theta : {-3.0, -alpha, -0.7 * alpha, -1e-3, 1e-9, 0.2 * alpha, 0.999 * alpha, 1.5 * alpha}) {
        const double l = critical_log_lambda(theta, alpha, eps);
        CHECK(l == doctest::Approx(oracle_log_lambda(theta, alpha, eps)).epsilon(1e-9));
        const double v = critical_slope(theta, alpha, eps);
        CHECK(std::abs(v) <= alpha * (1.0 + 1e-14));
        CHECK(std::exp(l) * v == doctest::Approx(theta).epsilon(1e-11));
      }
    }
  }
}

TEST_CASE("invert_E inverts E on the unsaturated branch") {
  for (double l : {-300.0, -10.0, -1.0, -1e-4}) {
    const double t2 = eval_E_log(l, 1.0, 1e-3);
    CHECK(invert_E(t2, 1.0, 1e-3) == doctest::Approx(l).epsilon(1e-12));
  }
}

TEST_CASE("stress fields and their mirror") {
  CHECK(stress(Assumption::I, 8.0, 3.0) == doctest::Approx(3.5));
  CHECK(stress(Assumption::II, 8.0, -3.0) == doctest::Approx(-3.5));
}

TEST_CASE("capacity") {
  CHECK(capacity_width(1.0) == doctest::Approx(2.0));
  CHECK(capacity_width(4.0) == doctest::Approx(1.0));
  MongeProblemSpec s = test::tent_spec();
  CHECK(check_capacity(s, test::params(1e-3)));
  s.target = {0.0, 1.0};
  s.source = {2.0, 3.0};
  s.density = SourceDensity::uniform(s.source);
  CHECK_FALSE(check_capacity(s, test::params(1e-3)));
  try {
    solve_support(s, test::params(1e-3));
    FAIL("expected CapacityError");
  } catch (const MongeError& e) {
    CHECK(e.code() == ErrorCode::CapacityError);
  }
}

TEST_CASE("assembled density satisfies its defining equations") {
  const MongeProblemSpec spec = test::tent_spec();
  for (double eps : {0.1, 0.01, 0.001}) {
    const DensitySolution s = assemble_density(spec, test::params(eps));
    const Interval sup = s.support();
    CHECK(sup.hi == 5.0);
    // Slope integrates to zero across the support. It has a log singularity at the peak, so the
    // independent rule is tanh-sinh on the pieces between kinks.
    std::vector<double> pts{sup.lo};
    for (double b : s.breakpoints()) pts.push_back(b);
    pts.push_back(sup.hi);
    boost::math::quadrature::tanh_sinh<double> ts;
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      total += ts.integrate([&](double y) { return s.slope(y); }, pts[i], pts[i + 1]);
    }
    CHECK(std::abs(total) < 1e-10);
    CHECK(boundary_residual(s.constant(), sup, spec, eps) == doctest::Approx(0.0).epsilon(1e-12));
    // Unit mass and expectation by an independent rule.
    CHECK(test::simpson([&](double y) { return s.density(y); }, sup.lo, sup.hi) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(test::simpson([&](double y) { return y * s.density(y); }, sup.lo, sup.hi) ==
          doctest::Approx(s.expectation()).epsilon(1e-8));
    CHECK(s.mass() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.density(sup.lo - 0.1) == 0.0);
    CHECK(s.cdf(5.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.inverse_cdf(0.5) == doctest::Approx(4.0).epsilon(2e-2));
    CHECK(s.cdf(s.inverse_cdf(0.3)) == doctest::Approx(0.3).epsilon(1e-12));
  }
}

TEST_CASE("support endpoint approaches the tent edge") {
  const MongeProblemSpec spec = test::tent_spec();
  double prev = 0.0;
  for (double eps : {0.1, 0.01, 0.001}) {
    const double p = solve_support(spec, test::params(eps));
    CHECK(p > prev);
    CHECK(std::abs(p - 3.0) < 5.0 * eps);
    prev = p;
  }
}

TEST_CASE("mirrored problem gives the mirrored density") {
  const MongeProblemSpec spec = test::tent_spec(2.0);
  const DensitySolution a = assemble_density(spec, test::params(0.01));
  const DensitySolution b = assemble_density(mirror_transform(spec), test::params(0.01));
  CHECK(b.support_endpoint() == doctest::Approx(-a.support_endpoint()).epsilon(1e-13));
  CHECK(b.constant() == doctest::Approx(a.constant()).epsilon(1e-13));
  for (double y : {4.0, 4.3, 4.5, 4.9}) CHECK(b.density(-y) == doctest::Approx(a.density(y)).epsilon(1e-12));
  CHECK(b.expectation() == doctest::Approx(-a.expectation()).epsilon(1e-13));
}
