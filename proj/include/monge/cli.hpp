#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "monge/error.hpp"
#include "monge/problem.hpp"

namespace monge {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitCapacity = 3, kExitSolver = 4, kExitVerify = 5 };

/// Exit code for a failure carrying `code`.
int exit_code_for(ErrorCode code);

/// One JSON document drives every command. Problem keys sit at the top
/// level next to the run keys; unknown keys are rejected.
///
///   {"assumption": "I",
///    "source": {"interval": [6, 8], "density": {"kind": "uniform"}},
///    "target": [0, 5], "alpha": 1,
///    "epsilons": [0.1, 0.01, 0.001], "grid_n": 2001,
///    "tolerances": {"root": 1e-12, "quad": 1e-10},
///    "output": "out", "renormalize": false, "map_samples": 2001,
///    "fixtures": {"expectation": "fixtures/expectation_n501",
///                 "primal": "fixtures/primal_eps0.01_n401"}}
struct RunConfig {
  MongeProblemSpec problem;
  std::vector<double> epsilons{0.1, 0.01, 0.001};
  int grid_n = 2001;
  double root_tol = 1e-12;
  double quad_tol = 1e-10;
  std::filesystem::path output = "out";
  bool renormalize = false;
  int map_samples = 2001;
  /// Fixture stems (without extension), resolved against the config file.
  std::optional<std::filesystem::path> expectation_fixture;
  std::optional<std::filesystem::path> primal_fixture;
  bool quiet = false;
  /// Write measured wall times into sweep.csv; otherwise the column is 0.
  bool timing = false;

  ApproxParams params(double epsilon) const;
};

/// Throws ConfigError (malformed JSON with line and column, unknown or
/// missing keys, wrong types) or InvalidSpec-class errors from density
/// construction.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// Problem document only (the problem keys of a config).
MongeProblemSpec parse_problem(const std::string& text);
std::string problem_to_json(const MongeProblemSpec& spec);

/// Subdirectory name for one epsilon: eps_<shortest repr>.
std::string epsilon_dir(double epsilon);

int cmd_validate(const RunConfig& cfg, std::ostream& out);
int cmd_solve(const RunConfig& cfg, std::ostream& out);
int cmd_map(const RunConfig& cfg, std::ostream& out);
int cmd_sweep(const RunConfig& cfg, std::ostream& out);
int cmd_verify(const RunConfig& cfg, std::ostream& out);

/// Full command line: monge <validate|solve|map|sweep|verify> --config PATH
/// [--out DIR] [--epsilon E]... [--grid N] [--quiet] [--timing].
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace monge
