#include <cmath>
#include <memory>

#include "doctest.h"
#include "monge/transport.hpp"
#include "support.hpp"

using namespace monge;

TEST_CASE("source cdf of a uniform density") {
  const MonotoneProfile f = source_cdf(test::tent_spec());
  CHECK(f(6.0) == 0.0);
  CHECK(f(7.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(f(8.0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("maps push the source forward to the target") {
  auto s = std::make_shared<const DensitySolution>(assemble_density(test::tent_spec(), test::params(1e-3)));
  const TransportMapSolution inc = build_map(s, MapVariant::Increasing, 401);
  const TransportMapSolution dec = build_map(s, MapVariant::Decreasing, 401);
  CHECK(pushforward_residual(inc) < 1e-10);
  CHECK(pushforward_residual(dec) < 1e-10);
  CHECK(inc(6.0) == doctest::Approx(s->support().lo));
  CHECK(dec(6.0) == doctest::Approx(5.0));
  CHECK(inc.cost() == doctest::Approx(dec.cost()).epsilon(1e-12));
  CHECK(inc.cost() == doctest::Approx(source_mean(s->spec()) - s->expectation()).epsilon(1e-12));
  CHECK(inc.cost() == doctest::Approx(3.0).epsilon(1e-4));
  // Limit map of the tent: 3 + sqrt(x - 6) then 5 - sqrt(8 - x).
  for (double x : {6.25, 6.75, 7.5, 7.9}) {
    const double limit = x <= 7.0 ? 3.0 + std::sqrt(x - 6.0) : 5.0 - std::sqrt(8.0 - x);
    CHECK(std::abs(inc(x) - limit) < 1e-3);
  }
}

TEST_CASE("pushforward residual detects a wrong map") {
  const DensitySolution s = assemble_density(test::tent_spec(), test::params(1e-3));
  auto shifted = [](double x) { return 0.1 + (x <= 7.0 ? 3.0 + std::sqrt(x - 6.0) : 5.0 - std::sqrt(8.0 - x)); };
  CHECK(pushforward_residual(shifted, MapVariant::Increasing, s) > 0.05);
  auto exact = [](double x) { return x <= 7.0 ? 3.0 + std::sqrt(x - 6.0) : 5.0 - std::sqrt(8.0 - x); };
  CHECK(pushforward_residual(exact, MapVariant::Increasing, s) < 1e-4);
  CHECK(transport_cost(exact, s.spec()) == doctest::Approx(3.0).epsilon(1e-10));
}
