#include <filesystem>

#include "doctest.h"
#include "monge/error.hpp"
#include "monge/io.hpp"
#include "monge/problem.hpp"
#include "support.hpp"

using namespace monge;

TEST_CASE("uniform density moments") {
  const SourceDensity f = SourceDensity::uniform({6.0, 8.0});
  CHECK(f.mass() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(f.first_moment() == doctest::Approx(7.0).epsilon(1e-15));
  CHECK(f(5.0) == 0.0);
  CHECK(f(7.0) == doctest::Approx(0.5));
}

TEST_CASE("piecewise-linear density moments match quadrature") {
  const SourceDensity f = SourceDensity::piecewise_linear({1.0, 2.0, 4.0}, {0.5, 1.0, 0.0});
  CHECK(f.mass() == doctest::Approx(test::simpson([&](double x) { return f(x); }, 1.0, 4.0)).epsilon(1e-10));
  CHECK(f.first_moment() ==
        doctest::Approx(test::simpson([&](double x) { return x * f(x); }, 1.0, 4.0)).epsilon(1e-10));
  const SourceDensity r = f.reflected();
  CHECK(r.support() == Interval{-4.0, -1.0});
  CHECK(r(-1.5) == doctest::Approx(f(1.5)));
}

TEST_CASE("normalize_density rescales to unit mass") {
  const SourceDensity f = SourceDensity::piecewise_linear({0.0, 1.0}, {2.0, 4.0});
  CHECK(normalize_density(f).mass() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(normalize_density(SourceDensity::piecewise_linear({0.0, 1.0, 2.0}, {1.0, -0.5, 1.0})),
                  MongeError);
}

TEST_CASE("normalize_density closed-form cases") {
  const SourceDensity c = normalize_density(SourceDensity::piecewise_linear({6.0, 8.0}, {2.0, 2.0}));
  CHECK(c(7.0) == doctest::Approx(0.5).epsilon(1e-15));
  // Vanishing at a single endpoint is accepted; x - 6 has mass 2.
  const SourceDensity r = normalize_density(SourceDensity::piecewise_linear({6.0, 8.0}, {0.0, 2.0}));
  CHECK(r(7.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(r(8.0) == doctest::Approx(1.0).epsilon(1e-15));
  const SourceDensity twice = normalize_density(r);
  for (double x : {6.0, 6.5, 7.25, 8.0}) CHECK(std::abs(twice(x) - r(x)) <= 1e-14);
  CHECK_THROWS_AS(normalize_density(SourceDensity::piecewise_linear({6.0, 7.0, 8.0}, {0.0, 0.0, 1.0})), MongeError);
}

TEST_CASE("validate_spec ordering under both assumptions") {
  CHECK(validate_spec(test::tent_spec()).valid());
  MongeProblemSpec s = test::tent_spec();
  s.target = {0.0, 7.0};  // overlaps the source
  CHECK_FALSE(validate_spec(s).valid());
  s = test::tent_spec();
  s.assumption = Assumption::II;
  CHECK_FALSE(validate_spec(s).valid());
  s.source = {-8.0, -6.0};
  s.target = {-5.0, 0.0};
  s.density = SourceDensity::uniform(s.source);
  CHECK(validate_spec(s).valid());
  s.alpha = -1.0;
  CHECK_FALSE(validate_spec(s).valid());
}

TEST_CASE("check_params rejects bad parameters") {
  CHECK_NOTHROW(check_params(test::params(1e-3)));
  CHECK_THROWS_AS(check_params(test::params(0.0)), MongeError);
  CHECK_THROWS_AS(check_params(test::params(1e-3, 2)), MongeError);
}

TEST_CASE("format_double round-trips") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 7.0, 1e22}) CHECK(std::stod(format_double(v)) == v);
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(2.0) == "2");
}

TEST_CASE("csv and atomic write round-trip") {
  const auto dir = std::filesystem::temp_directory_path() / "monge_io_test" / "nested";
  std::filesystem::remove_all(dir.parent_path());
  const std::string text = csv_table({"a", "b"}, {{1.0, 0.25}, {3.0, -1e-9}});
  write_atomic(dir / "t.csv", text);
  std::vector<std::string> header;
  const auto cols = parse_csv(read_text(dir / "t.csv"), &header);
  CHECK(header == std::vector<std::string>{"a", "b"});
  CHECK(cols[1][1] == -1e-9);
  CHECK_FALSE(std::filesystem::exists(dir / "t.csv.tmp"));
  std::filesystem::remove_all(dir.parent_path());
}
