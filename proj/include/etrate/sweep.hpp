#pragma once

// Parameter sweeps over the delay bound gamma. Rows are independent and are
// evaluated on a small worker pool; results are always returned in grid order.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "etrate/channel.hpp"
#include "etrate/model.hpp"
#include "etrate/sim.hpp"

namespace etrate {

struct SweepRow {
  double gamma = 0.0;
  double rho0 = 0.0;
  double sigma = 0.0;
  std::optional<double> rate_empirical;
  double rate_necessary = 0.0;
  double rate_necessary_approx = 0.0;
  double rate_sufficient = 0.0;
  double rate_access = 0.0;
  /// Max of the necessary rate over the sigma grid (phase curves only).
  std::optional<double> rate_necessary_sup;
  int packet_bits = 0;
  std::optional<std::size_t> triggers;
  std::optional<double> x0_norm;
  std::optional<double> xT_norm;
  std::string error;  ///< empty on success
};

/// Closed-loop sweep: one scalar simulation per gamma, g recomputed per row.
struct SimSweepSpec {
  ScalarPlant plant;
  double v0 = 1.0;
  double sigma = 1.0;
  double rho0 = 0.5;
  double b = 1.0001;
  DelaySpec delay;
  double x0 = 0.0;
  double xhat0 = 0.0;
  SimOptions options;
};

/// Analytic phase curves for every rho0 in `rho0s`, optionally with the sup of
/// the necessary rate over `sigma_grid`.
struct PhaseSpec {
  double a = 1.0;
  double sigma = 1.0;
  std::vector<double> rho0s;
  double b = 1.0001;
  double nu = 1.0;
  std::vector<double> sigma_grid;
};

struct PhaseMarkers {
  double rho0 = 0.0;
  double sigma = 0.0;
  double gamma_c = 0.0;
  double gamma_eq = 0.0;
  double asymptote = 0.0;
  double access_rate = 0.0;
};

/// "start:step:end" (inclusive, tolerant to rounding) or "v1,v2,...".
/// Throws ConfigError on malformed or empty grids.
std::vector<double> parse_grid(const std::string& text);

/// Requires every gamma > 0 (ConfigError). Divergence and run errors are
/// recorded per row; the sweep continues.
std::vector<SweepRow> sweep_gamma(const SimSweepSpec& spec, const std::vector<double>& gammas,
                                  unsigned workers = 0);

std::vector<SweepRow> phase_curves(const PhaseSpec& spec, const std::vector<double>& gammas,
                                   unsigned workers = 0);

std::vector<PhaseMarkers> phase_markers(const PhaseSpec& spec);

/// Rows where the necessary rate exceeds the sufficient one (reported, not asserted).
std::vector<std::size_t> ordering_violations(const std::vector<SweepRow>& rows);

}  // namespace etrate
