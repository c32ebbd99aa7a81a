// wcreg: experiment runner for the worst-case regularization toolkit.
//
//   wcreg <command> [--config PATH] [--seed N] [--out PATH] [--grid N] [--set key=value]...
//
// Exit codes: 0 success, 2 configuration/validation error, 3 runtime or
// infeasibility error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "wcreg/error.hpp"
#include "wcreg/experiment.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> grid;
  std::vector<std::string> assignments;
};

void add_common_flags(CLI::App* sub, CommonFlags& flags) {
  sub->add_option("--config", flags.config_path, "key=value config file");
  sub->add_option("--seed", flags.seed, "64-bit random seed");
  sub->add_option("--out", flags.out, "output path");
  sub->add_option("--grid", flags.grid, "grid node count");
  sub->add_option("--set", flags.assignments, "override one config key (key=value), repeatable");
}

wcreg::ExperimentConfig build_config(const std::string& command, const CommonFlags& flags) {
  wcreg::ExperimentConfig config;
  if (!flags.config_path.empty()) {
    std::ifstream in(flags.config_path);
    if (!in) throw wcreg::ConfigError("cannot read config file '" + flags.config_path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    config = wcreg::parse_config(ss.str());
  }
  for (const auto& kv : flags.assignments) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw wcreg::ConfigError("--set expects key=value, got '" + kv + "'");
    wcreg::set_config_value(config, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (flags.seed) config.seed = *flags.seed;
  if (flags.out) config.out = *flags.out;
  if (flags.grid) config.grid = *flags.grid;
  config.command = command;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Worst-case regularization experiments"};
  app.require_subcommand(1);

  CommonFlags flags;
  const std::vector<std::pair<const char*, const char*>> commands = {
      {"differentiate", "stable differentiation of noisy data with a certified bound"},
      {"sweep", "noise-level sweep: step, bound and ensemble sup-error per delta"},
      {"adversary", "certified adversarial pairs and their separations"},
      {"variational", "constrained variational regularizer convergence study"},
      {"modulus", "exact modulus of continuity on a lattice compactum"},
  };
  for (const auto& [name, help] : commands) add_common_flags(app.add_subcommand(name, help), flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    const auto config = build_config(app.get_subcommands().front()->get_name(), flags);
    const auto result = wcreg::run_experiment(config);
    std::cout << result.stdout_text;
    return 0;
  } catch (const wcreg::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
