// Regenerates the oracle fixtures under the given directory.
#include <iostream>
#include <string>

#include "monge/oracles.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_fixtures DIR\n";
    return 2;
  }
  const std::string dir = argv[1];
  monge::MongeProblemSpec spec;
  spec.source = {6.0, 8.0};
  spec.target = {0.0, 5.0};
  spec.density = monge::SourceDensity::uniform(spec.source);
  spec.alpha = 1.0;

  monge::write_fixture(dir + "/expectation_n501", monge::discrete_expectation_optimizer(spec, 501));
  monge::write_fixture(dir + "/primal_eps0.01_n401", monge::discrete_primal_minimizer(spec, 0.01, 401));

  // Same grid, slopes scaled to 1.5 alpha: must be rejected by verify.
  monge::GridDensity bad = monge::discrete_expectation_optimizer(spec, 501);
  for (double& u : bad.u) u *= 1.5;
  monge::write_fixture(dir + "/bad_slope_n501", bad);
  std::cout << "fixtures written to " << dir << "\n";
  return 0;
}
