// etrate: bounds, closed-loop simulations and sweeps from the command line.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "etrate/commands.hpp"
#include "etrate/errors.hpp"
#include "etrate/run_config.hpp"

namespace {

struct CommonFlags {
  std::string config;
  std::string out = "out";
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::optional<double> step;
  std::optional<double> horizon;
  std::optional<double> gamma;
  std::optional<int> g;
  std::optional<std::string> delay;
  std::optional<std::string> json;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "key-value config file");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--set", f.sets, "override a config key (key=value), repeatable");
  cmd->add_option("--seed", f.seed, "delay RNG seed");
  cmd->add_option("--step", f.step, "sample step h (s)");
  cmd->add_option("--horizon", f.horizon, "simulation horizon T (s)");
  cmd->add_option("--gamma", f.gamma, "delay bound (s)");
  cmd->add_option("--g", f.g, "force the packet size (bits)");
  cmd->add_option("--delay", f.delay, "constant:<d> | uniform[:<seed>] | adversarial | replay:<d>,...");
}

etrate::RunConfig assemble(const CommonFlags& f) {
  etrate::RunConfig cfg;
  if (!f.config.empty()) cfg = etrate::RunConfig::load(f.config);
  for (const auto& s : f.sets) cfg.set_assignment(s);
  if (f.delay) cfg.set("delay", *f.delay, "--delay");
  if (f.seed) cfg.set("seed", std::to_string(*f.seed), "--seed");
  if (f.step) cfg.set("sim.step", CLI::detail::to_string(*f.step), "--step");
  if (f.horizon) cfg.set("sim.horizon", CLI::detail::to_string(*f.horizon), "--horizon");
  if (f.gamma) cfg.set("trigger.gamma", CLI::detail::to_string(*f.gamma), "--gamma");
  if (f.g) cfg.set("sim.g", std::to_string(*f.g), "--g");
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Event-triggered stabilization over a bounded-delay, finite-rate channel"};
  app.require_subcommand(1);

  CommonFlags flags;
  auto* bounds = app.add_subcommand("bounds", "print every analytic bound for the configured parameters");
  add_common(bounds, flags);
  bounds->add_option("--json", flags.json, "also write the table as JSON");
  auto* simulate = app.add_subcommand("simulate", "run one closed-loop simulation");
  add_common(simulate, flags);
  auto* sweep = app.add_subcommand("sweep", "sweep the delay bound gamma");
  add_common(sweep, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : etrate::cli::kUsage;
  }

  try {
    const etrate::RunConfig cfg = assemble(flags);
    if (*bounds) return etrate::cli::cmd_bounds(cfg, std::cout, flags.json);
    if (*simulate) return etrate::cli::cmd_simulate(cfg, flags.out, std::cout, std::cerr);
    return etrate::cli::cmd_sweep(cfg, flags.out, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return etrate::cli::exit_code_for(e);
  }
}
