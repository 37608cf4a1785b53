// Command-line driver: simulate built-in systems, run the validation suite,
// list the available systems.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "hamel/io.hpp"
#include "hamel/validation.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw hamel::Error("cannot read config file '" + path + "'");
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

int run_simulate(const std::string& config_path, const hamel::ConfigOverrides& overrides) {
  const std::string text = config_path.empty() ? std::string{} : read_file(config_path);
  const hamel::RunConfig cfg = hamel::parse_config(text, overrides);
  const auto builtin = hamel::make_builtin(cfg.system, cfg.params);

  hamel::SimulationOptions opts;
  opts.mode = cfg.mode;
  opts.exact_flow = builtin.exact_flow;
  const hamel::Trajectory traj = hamel::simulate(
      builtin.system, builtin.constraint, hamel::State{0.0, cfg.q0, cfg.v0}, cfg.h, cfg.t_max, opts);

  const std::filesystem::path out(cfg.out_dir);
  hamel::write_trajectory(traj, builtin.system, builtin.constraint, out);
  {
    std::ofstream cfg_out(out / "run.cfg", std::ios::binary | std::ios::trunc);
    cfg_out << hamel::serialize_config(cfg);
  }
  std::cout << cfg.system << ": " << traj.samples.size() << " samples, " << traj.impacts.size()
            << " impacts -> " << (out / "trajectory.csv").string() << '\n';
  if (cfg.emit_plots) {
    for (const auto& file : hamel::emit_plots(traj, builtin, out)) {
      std::cout << "  wrote " << file.string() << '\n';
    }
  }
  return 0;
}

int run_validate() {
  int failures = 0;
  for (const auto& check : hamel::validation::all_checks()) {
    const auto result = hamel::validation::run_check(check);
    std::cout << (result.passed ? "[PASS] " : "[FAIL] ") << result.id << ' ' << result.name
              << ": " << result.detail << '\n';
    if (!result.passed) ++failures;
  }
  std::cout << (failures == 0 ? "all checks passed" : std::to_string(failures) + " check(s) failed")
            << '\n';
  return failures == 0 ? 0 : 1;
}

int run_list() {
  for (const auto& name : hamel::builtin_names()) {
    const auto b = hamel::make_builtin(name);
    std::cout << name << "  (n=" << b.system.dim() << ", k=" << b.system.rank() << ")  "
              << b.description << "\n   parameters:";
    for (const auto& [key, value] : b.params) std::cout << ' ' << key << '=' << value;
    std::cout << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator for nonholonomic systems with impacts, written in quasivelocities"};
  app.require_subcommand(1);

  std::string config_path;
  std::string system;
  double h = 0.0;
  double t_max = 0.0;
  std::string mode;
  std::string out_dir;
  bool plots = false;

  auto* sim = app.add_subcommand("simulate", "run a simulation and write CSV (and SVG) output");
  sim->set_help_flag("--help", "print this help message and exit");
  sim->add_option("--config", config_path, "key = value run configuration file");
  auto* system_opt = sim->add_option("--system", system, "built-in system name");
  auto* h_opt = sim->add_option("--h", h, "time step [s]");
  auto* tmax_opt = sim->add_option("--tmax", t_max, "final time [s]");
  auto* mode_opt = sim->add_option("--mode", mode, "integrator: rk4 or exact");
  auto* out_opt = sim->add_option("--out", out_dir, "output directory");
  auto* plots_opt = sim->add_flag("--plots", plots, "also write SVG plots");

  auto* validate = app.add_subcommand("validate", "run the oracle cross-checks and invariants");
  auto* list = app.add_subcommand("list-systems", "list the built-in systems");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      hamel::ConfigOverrides overrides;
      if (system_opt->count()) overrides.system = system;
      if (h_opt->count()) overrides.h = h;
      if (tmax_opt->count()) overrides.t_max = t_max;
      if (mode_opt->count()) overrides.mode = hamel::parse_mode(mode);
      if (out_opt->count()) overrides.out_dir = out_dir;
      if (plots_opt->count()) overrides.emit_plots = plots;
      return run_simulate(config_path, overrides);
    }
    if (validate->parsed()) return run_validate();
    if (list->parsed()) return run_list();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
