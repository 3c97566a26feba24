#pragma once

// Subcommands behind the `etrate` executable. Each returns the process exit
// code; errors from the library propagate as exceptions and are mapped by
// exit_code_for().

#include <exception>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "etrate/channel.hpp"
#include "etrate/model.hpp"
#include "etrate/run_config.hpp"
#include "etrate/sim.hpp"

namespace etrate::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kInvariant = 2, kDivergence = 3 };

/// Every key a config file (or --set) may use.
const std::set<std::string>& known_keys();

struct SimulationSetup {
  JordanPlant plant;
  TriggerConfig trigger;
  DelaySpec delay;
  Eigen::VectorXd x0;
  Eigen::VectorXd xhat0;
  SimOptions options;
  bool scalar = true;

  [[nodiscard]] std::vector<DelayModel> delay_models() const;
};

SimulationSetup build_simulation(const RunConfig& cfg);

/// Name/value pairs printed by `bounds`, in display order.
std::vector<std::pair<std::string, double>> bounds_table(const RunConfig& cfg);

int cmd_bounds(const RunConfig& cfg, std::ostream& out, const std::optional<std::string>& json_path);
int cmd_simulate(const RunConfig& cfg, const std::string& out_dir, std::ostream& out, std::ostream& err);
int cmd_sweep(const RunConfig& cfg, const std::string& out_dir, std::ostream& out, std::ostream& err);

int exit_code_for(const std::exception& error);

}  // namespace etrate::cli
