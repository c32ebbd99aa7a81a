#include "wcreg/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>

#include "wcreg/adversary.hpp"
#include "wcreg/csv.hpp"
#include "wcreg/differentiator.hpp"
#include "wcreg/error.hpp"
#include "wcreg/modulus.hpp"
#include "wcreg/rng.hpp"
#include "wcreg/variational.hpp"

namespace wcreg {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_double(std::string_view key, std::string_view text) {
  const auto s = trim(text);
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size() && std::isfinite(v)) return v;
  } catch (const std::logic_error&) {
  }
  throw ConfigError("config key '" + std::string(key) + "': '" + s + "' is not a finite number");
}

template <typename Int>
Int parse_int(std::string_view key, std::string_view text) {
  const auto s = trim(text);
  Int v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError("config key '" + std::string(key) + "': '" + s + "' is not a nonnegative integer");
  }
  return v;
}

std::vector<double> parse_list(std::string_view key, std::string_view text) {
  std::vector<double> out;
  const auto s = trim(text);
  if (s.empty()) return out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) out.push_back(parse_double(key, item));
  return out;
}

std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ',';
    out += format_double(values[i]);
  }
  return out;
}

using Setter = std::function<void(ExperimentConfig&, std::string_view, std::string_view)>;
using Getter = std::function<std::string(const ExperimentConfig&)>;

struct Field {
  const char* key;
  Setter set;
  Getter get;
};

template <auto Member>
Field string_field(const char* key) {
  return {key, [](ExperimentConfig& c, std::string_view, std::string_view v) { c.*Member = trim(v); },
          [](const ExperimentConfig& c) { return c.*Member; }};
}

template <auto Member>
Field double_field(const char* key) {
  return {key, [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.*Member = parse_double(k, v); },
          [](const ExperimentConfig& c) { return format_double(c.*Member); }};
}

template <auto Member, typename Int>
Field int_field(const char* key) {
  return {key, [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.*Member = parse_int<Int>(k, v); },
          [](const ExperimentConfig& c) { return std::to_string(c.*Member); }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      string_field<&ExperimentConfig::command>("command"),
      string_field<&ExperimentConfig::input>("input"),
      string_field<&ExperimentConfig::out>("out"),
      double_field<&ExperimentConfig::a>("a"),
      double_field<&ExperimentConfig::M>("M"),
      double_field<&ExperimentConfig::c>("c"),
      double_field<&ExperimentConfig::delta>("delta"),
      {"deltas", [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.deltas = parse_list(k, v); },
       [](const ExperimentConfig& c) { return join(c.deltas); }},
      int_field<&ExperimentConfig::grid, std::size_t>("grid"),
      int_field<&ExperimentConfig::ensemble, std::size_t>("ensemble"),
      int_field<&ExperimentConfig::budget, std::size_t>("budget"),
      int_field<&ExperimentConfig::seed, std::uint64_t>("seed"),
      string_field<&ExperimentConfig::noise>("noise"),
      string_field<&ExperimentConfig::phi>("phi"),
      string_field<&ExperimentConfig::op>("operator"),
      string_field<&ExperimentConfig::truth>("truth"),
      double_field<&ExperimentConfig::amplitude>("amplitude"),
      string_field<&ExperimentConfig::cls>("class"),
      string_field<&ExperimentConfig::lattice>("lattice"),
      int_field<&ExperimentConfig::levels, std::size_t>("levels"),
      int_field<&ExperimentConfig::lattice_nodes, std::size_t>("lattice_nodes"),
  };
  return table;
}

}  // namespace

void set_config_value(ExperimentConfig& config, std::string_view key, std::string_view value) {
  const auto k = trim(key);
  for (const auto& f : fields()) {
    if (k == f.key) {
      f.set(config, k, value);
      return;
    }
  }
  throw ConfigError("unknown config key '" + k + "'");
}

ExperimentConfig parse_config(std::string_view text, ExperimentConfig base) {
  std::stringstream ss{std::string(text)};
  std::size_t lineno = 0;
  for (std::string line; std::getline(ss, line);) {
    ++lineno;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + " is not key=value: '" + t + "'");
    }
    set_config_value(base, t.substr(0, eq), std::string_view(t).substr(eq + 1));
  }
  return base;
}

std::string serialize_config(const ExperimentConfig& config) {
  std::string out;
  for (const auto& f : fields()) out += std::string(f.key) + "=" + f.get(config) + "\n";
  return out;
}

namespace {

bool is_one_of(const std::string& v, std::initializer_list<const char*> options) {
  return std::any_of(options.begin(), options.end(), [&](const char* o) { return v == o; });
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

std::size_t sine_truth_frequency(std::string_view name) {
  // sine(k)
  if (name.size() < 7 || name.substr(0, 5) != "sine(" || name.back() != ')') return 0;
  const auto inner = name.substr(5, name.size() - 6);
  std::size_t k = 0;
  const auto [ptr, ec] = std::from_chars(inner.data(), inner.data() + inner.size(), k);
  return ec == std::errc() && ptr == inner.data() + inner.size() ? k : 0;
}

bool valid_truth(const std::string& name) {
  return is_one_of(name, {"quadratic", "constant", "abs-shift", "sine"}) || sine_truth_frequency(name) > 0;
}

}  // namespace

void validate_config(const ExperimentConfig& c) {
  const auto& cmd = c.command;
  require(is_one_of(cmd, {"differentiate", "sweep", "adversary", "variational", "modulus"}),
          "unknown command '" + cmd + "' (expected differentiate, sweep, adversary, variational, modulus)");
  require(c.grid >= 2, "grid must have at least 2 nodes");
  require(is_one_of(c.noise, {"uniform", "alternating", "none"}), "noise must be uniform, alternating or none");
  require(valid_truth(c.truth), "truth must be quadratic, constant, sine(k) or abs-shift");
  for (double d : c.deltas) require(d > 0.0, "every delta must be > 0");

  if (cmd == "differentiate" || cmd == "sweep") {
    require(c.a > 1.0 && c.a <= 2.0, "the differentiator requires 1 < a <= 2 (a > 1 step rule)");
    require(c.M > 0.0, "M must be > 0");
    require(c.grid >= 5, "grid too coarse: the differentiator needs spacing <= 1/4 (grid >= 5)");
  }
  if (cmd == "differentiate") {
    require(c.delta > 0.0, "delta must be > 0");
    if (!c.input.empty()) {
      require(std::filesystem::is_regular_file(c.input), "input file '" + c.input + "' does not exist");
    }
  }
  if (cmd == "sweep") {
    require(c.deltas.size() >= 2, "sweep needs at least 2 deltas to fit a rate");
    require(c.ensemble >= 1, "sweep needs ensemble >= 1");
  }
  if (cmd == "adversary") {
    require(is_one_of(c.cls, {"sup", "lip"}), "class must be 'sup' or 'lip', got '" + c.cls + "'");
    require(c.M > 0.0, "M must be > 0");
  }
  if (cmd == "variational" || cmd == "modulus") {
    require(c.c > 0.0, "c must be > 0");
    require(is_one_of(c.phi, {"sup", "holder"}), "phi must be 'sup' or 'holder'");
    if (c.phi == "holder") require(c.a > 0.0 && c.a <= 2.0, "holder phi needs 0 < a <= 2");
    require(is_one_of(c.op, {"integration", "identity"}), "operator must be 'integration' or 'identity'");
  }
  if (cmd == "variational") {
    require(c.budget >= 1, "variational needs budget >= 1");
    if (c.phi == "holder") require(c.grid >= 3, "holder phi needs grid >= 3");
  }
  if (cmd == "modulus") {
    require(is_one_of(c.lattice, {"constants", "full"}), "lattice must be 'constants' or 'full'");
    require(c.levels >= 2, "lattice needs at least 2 levels");
    require(c.lattice_nodes >= 2, "lattice needs at least 2 nodes");
    if (c.phi == "holder") require(c.lattice_nodes >= 3, "holder phi needs lattice_nodes >= 3");
    require(c.budget >= 1, "modulus_search needs budget >= 1");
  }
}

GridFunction builtin_truth(std::string_view name, double amplitude, std::size_t n) {
  using std::numbers::pi;
  if (name == "quadratic") return GridFunction::sample(n, [&](double x) { return amplitude * x; });
  if (name == "constant") return GridFunction::constant(n, amplitude);
  if (name == "abs-shift") return GridFunction::sample(n, [&](double x) { return amplitude * std::abs(x - 0.5); });
  const std::size_t k = name == "sine" ? 1 : sine_truth_frequency(name);
  if (k == 0) throw ConfigError("unknown truth '" + std::string(name) + "'");
  const double w = 2.0 * pi * static_cast<double>(k);
  return GridFunction::sample(n, [&](double x) { return amplitude * std::sin(w * x); });
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

std::vector<double> sorted_deltas(const ExperimentConfig& c) {
  auto d = c.deltas;
  std::sort(d.begin(), d.end());
  return d;
}

NoisyData make_data(const ExperimentConfig& c, const GridFunction& g, double delta, std::uint64_t stream) {
  if (c.noise == "none") return NoisyData(g, delta);
  const auto model = c.noise == "uniform" ? NoiseModel::UniformIid : NoiseModel::AlternatingWorstCase;
  return add_noise(g, delta, model, splitmix64(c.seed ^ splitmix64(stream)));
}

std::optional<NoiseModel> noise_model(const ExperimentConfig& c) {
  if (c.noise == "none") return std::nullopt;
  return c.noise == "uniform" ? NoiseModel::UniformIid : NoiseModel::AlternatingWorstCase;
}

void write_file(const std::string& path, const std::string& content, RunResult& result) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open output file '" + path + "'");
  f << content;
  if (!f) throw ConfigError("failed writing output file '" + path + "'");
  result.files.push_back(path);
}

// Table goes to config.out when set, otherwise to stdout.
void emit_table(const ExperimentConfig& c, const std::string& table, RunResult& result) {
  if (c.out.empty()) {
    result.stdout_text += table;
  } else {
    write_file(c.out, table, result);
  }
}

CompactumSpec make_spec(const ExperimentConfig& c) {
  return c.phi == "sup" ? CompactumSpec::sup_norm(c.c) : CompactumSpec::holder(c.a, c.c);
}

ProblemSpec make_problem(const ExperimentConfig& c, std::size_t n) {
  return c.op == "integration" ? ProblemSpec::integration() : ProblemSpec::matrix(Eigen::MatrixXd::Identity(n, n));
}

}  // namespace

RunResult run_differentiate(const ExperimentConfig& c) {
  validate_config(c);
  RunResult result;
  NoisyData data = [&] {
    if (!c.input.empty()) {
      std::ifstream in(c.input);
      if (!in) throw ConfigError("cannot read input file '" + c.input + "'");
      try {
        return NoisyData(read_csv(in), c.delta);
      } catch (const PreconditionError& e) {
        throw ConfigError("input file '" + c.input + "': " + e.what());
      }
    }
    const auto u = builtin_truth(c.truth, c.amplitude, c.grid);
    return make_data(c, integrate(u), c.delta, 0);
  }();
  const auto out = regularize(data, HolderParams(c.a, c.M));
  if (!c.out.empty()) write_file(c.out, to_csv(out.u_delta), result);
  std::ostringstream os;
  os << "delta,h,eta\n";
  const double row[] = {data.delta, out.h_used, out.eta};
  write_numeric_row(os, row);
  result.stdout_text += os.str();
  return result;
}

RunResult run_sweep(const ExperimentConfig& c) {
  validate_config(c);
  RunResult result;
  const HolderParams params(c.a, c.M);
  const auto u = builtin_truth(c.truth, c.amplitude, c.grid);
  const double u_norm = discrete_holder_norm(u, c.a);
  require(u_norm <= c.M, "sweep truth must lie in the class: Holder norm " + format_double(u_norm) +
                             " exceeds M = " + format_double(c.M) + " (lower amplitude or raise M)");
  const auto g = integrate(u);
  const auto deltas = sorted_deltas(c);

  std::ostringstream os;
  os << "delta,h,eta,sup_err_est\n";
  std::vector<double> etas, eta_opt, errs;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    const auto data = make_data(c, g, deltas[i], i);
    const auto rec = regularize(data, params);
    const auto cls = FeasibleClass::holder(params, data, u);
    auto ensemble = sample_feasible(cls, c.ensemble, c.seed);
    ensemble.push_back(u);
    const auto est = sup_error_estimate(rec.u_delta, cls, ensemble);
    const double row[] = {deltas[i], rec.h_used, rec.eta, est.lower_bound};
    write_numeric_row(os, row);
    etas.push_back(rec.eta);
    eta_opt.push_back(error_bound(deltas[i], params, optimal_step(deltas[i], params)));
    errs.push_back(std::max(est.lower_bound, std::numeric_limits<double>::min()));
  }
  os << "# loglog_slope eta_opt=" << format_double(loglog_slope(deltas, eta_opt))
     << " eta=" << format_double(loglog_slope(deltas, etas))
     << " sup_err_est=" << format_double(loglog_slope(deltas, errs)) << '\n';
  emit_table(c, os.str(), result);
  return result;
}

RunResult run_adversary(const ExperimentConfig& c) {
  validate_config(c);
  RunResult result;
  const auto deltas = sorted_deltas(c);
  std::ostringstream os;
  os << "delta,separation\n";
  std::vector<double> seps;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    const auto pair = c.cls == "sup" ? sine_pair(c.M, deltas[i], c.grid) : bump_pair(c.M, deltas[i], c.grid);
    if (!c.out.empty()) {
      const std::filesystem::path base(c.out);
      const auto path = (base.parent_path() / (base.stem().string() + "_pair" + std::to_string(i) + ".csv")).string();
      std::ostringstream ps;
      write_pair_csv(ps, pair);
      write_file(path, ps.str(), result);
    }
    const double row[] = {deltas[i], pair.separation};
    write_numeric_row(os, row);
    seps.push_back(pair.separation);
  }
  if (deltas.size() >= 2) {
    os << "# loglog_slope separation=" << format_double(loglog_slope(deltas, seps)) << '\n';
  }
  emit_table(c, os.str(), result);
  return result;
}

RunResult run_variational(const ExperimentConfig& c) {
  validate_config(c);
  RunResult result;
  const auto u = builtin_truth(c.truth, c.amplitude, c.grid);
  const auto deltas = sorted_deltas(c);
  const ConvergenceOptions options{noise_model(c), c.budget, c.ensemble, c.seed};
  const auto rows = convergence_study(u, deltas, make_spec(c), make_problem(c, c.grid), options);
  std::ostringstream os;
  write_convergence_csv(os, rows);
  emit_table(c, os.str(), result);
  return result;
}

RunResult run_modulus(const ExperimentConfig& c) {
  validate_config(c);
  RunResult result;
  const auto spec = make_spec(c);
  auto levels = uniform_levels(-c.c, c.c, c.levels);
  const auto lattice = c.lattice == "constants"
                           ? LatticeCompactum::constants(std::move(levels), spec, c.lattice_nodes)
                           : LatticeCompactum::full(c.lattice_nodes, std::move(levels), spec);
  const auto prob = make_problem(c, c.lattice_nodes);
  std::vector<ModulusRow> rows;
  for (double d : sorted_deltas(c)) rows.push_back({d, modulus_bruteforce(lattice, d, prob)});
  std::ostringstream os;
  write_modulus_csv(os, rows);
  emit_table(c, os.str(), result);
  return result;
}

RunResult run_experiment(const ExperimentConfig& config) {
  validate_config(config);
  const auto& cmd = config.command;
  if (cmd == "differentiate") return run_differentiate(config);
  if (cmd == "sweep") return run_sweep(config);
  if (cmd == "adversary") return run_adversary(config);
  if (cmd == "variational") return run_variational(config);
  return run_modulus(config);
}

}  // namespace wcreg
