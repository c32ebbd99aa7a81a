#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wcreg/grid.hpp"

namespace wcreg {

/// Invalid or inconsistent experiment configuration (CLI exit code 2).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Flat experiment configuration; every field maps to one `key=value` line.
struct ExperimentConfig {
  std::string command;
  std::string input;
  std::string out;
  double a = 2.0;
  double M = 1.0;
  double c = 2.0;
  double delta = 1e-4;
  std::vector<double> deltas;
  std::size_t grid = 1001;
  std::size_t ensemble = 100;
  std::size_t budget = 20000;
  std::uint64_t seed = 0;
  std::string noise = "uniform";      // uniform | alternating | none
  std::string phi = "sup";            // sup | holder (exponent a)
  std::string op = "integration";     // integration | identity
  std::string truth = "quadratic";    // quadratic | constant | sine(k) | abs-shift
  double amplitude = 1.0;
  std::string cls = "sup";            // sup | lip
  std::string lattice = "constants";  // constants | full
  std::size_t levels = 21;
  std::size_t lattice_nodes = 3;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Applies one `key=value` assignment. Throws ConfigError on unknown keys or
/// unparsable values.
void set_config_value(ExperimentConfig& config, std::string_view key, std::string_view value);

/// Parses config text: `key=value` lines, `#` comments, blank lines.
ExperimentConfig parse_config(std::string_view text, ExperimentConfig base = {});

/// Every field as `key=value` lines in a fixed order; parse_config inverts it.
std::string serialize_config(const ExperimentConfig& config);

/// Checks the fields the command uses against module preconditions.
/// Throws ConfigError naming the violated precondition.
void validate_config(const ExperimentConfig& config);

/// Built-in synthetic solution sampled on an n-node grid.
GridFunction builtin_truth(std::string_view name, double amplitude, std::size_t n);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// What a command printed and which files it wrote.
struct RunResult {
  std::string stdout_text;
  std::vector<std::string> files;
};

/// Validates, then runs config.command. Module failures propagate as
/// PreconditionError / InfeasibleError; configuration problems as ConfigError.
RunResult run_experiment(const ExperimentConfig& config);

RunResult run_differentiate(const ExperimentConfig& config);
RunResult run_sweep(const ExperimentConfig& config);
RunResult run_adversary(const ExperimentConfig& config);
RunResult run_variational(const ExperimentConfig& config);
RunResult run_modulus(const ExperimentConfig& config);

}  // namespace wcreg
