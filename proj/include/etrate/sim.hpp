#pragma once

// Event-driven closed-loop simulation.
//
// The loop advances from one instant of interest to the next: sample-grid
// points t_k = k h and packet delivery times t_c (which are generally off the
// grid). Propagation between instants is exact (see Propagator). At each
// instant receptions are processed first, then triggers are evaluated on the
// grid: coordinate i fires when |z_i| >= v_i(t) and its channel is idle.
// With `refine` set, the crossing time inside the last step is located by
// bisection and the trigger is sent from there instead of from the grid point.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "etrate/channel.hpp"
#include "etrate/codec.hpp"
#include "etrate/model.hpp"

namespace etrate {

struct SimOptions {
  double horizon = 7.0;
  double step = 1e-3;
  Integrator integrator = Integrator::Exact;
  bool refine = false;
  /// Forces every coordinate's packet size; otherwise packet_size_sufficient.
  std::optional<int> g;
  /// Per-coordinate switch; empty enables every channel. A disabled channel
  /// never transmits (used to demonstrate that coupled coordinates must be served).
  std::vector<bool> channel_enabled;
  bool record_samples = true;
  double divergence_threshold = 1e12;
};

enum class EventKind { Trigger, Reception };

struct Event {
  EventKind kind = EventKind::Trigger;
  std::size_t coord = 0;
  double t_s = 0.0;
  double t_c = 0.0;
  double delta = 0.0;      ///< t_c - t_s
  Packet packet;
  double v_ts = 0.0;       ///< v_i(t_s)
  // Reception only.
  double q = 0.0;
  double zbar = 0.0;
  double z_before = 0.0;
  double z_after = 0.0;
  bool q_outside_window = false;

  [[nodiscard]] double time() const { return kind == EventKind::Trigger ? t_s : t_c; }
};

struct Sample {
  double t = 0.0;
  Eigen::VectorXd x;
  Eigen::VectorXd xhat;
  Eigen::VectorXd z;
  Eigen::VectorXd v;
};

struct SimTrace {
  JordanPlant plant;
  TriggerConfig trigger;
  std::vector<double> ladder;      ///< resolved rho_i per coordinate
  std::vector<int> g;              ///< packet size per coordinate
  std::vector<std::string> delays; ///< delay model per coordinate
  SimOptions options;

  std::vector<Sample> samples;
  std::vector<Event> events;
  std::vector<std::size_t> triggers;   ///< per coordinate
  std::vector<std::size_t> bits;       ///< per coordinate
  Eigen::VectorXd x0;
  SimState final_state;
  double end_time = 0.0;               ///< horizon, or the divergence time

  std::optional<std::string> divergence;
  std::vector<std::string> warnings;

  [[nodiscard]] bool diverged() const { return divergence.has_value(); }
  [[nodiscard]] std::size_t dimension() const { return triggers.size(); }
  [[nodiscard]] std::size_t total_triggers() const;
  [[nodiscard]] std::size_t total_bits() const;
};

/// Scalar run. Requires |z(0)| < v0, h > 0, T > 0 (PreconditionError).
SimTrace run_scalar(const ScalarPlant& plant, const TriggerConfig& cfg, const DelayModel& delay,
                    double x0, double xhat0, const SimOptions& options);

/// Vector run with one delay model per coordinate. Requires |z_i(0)| <= v0_i
/// (PreconditionError) and every Jordan block's v0 ladder within
/// v0_cascade_bound (ConfigError, the run does not start).
SimTrace run_vector(const JordanPlant& plant, const TriggerConfig& cfg,
                    const std::vector<DelayModel>& delays, const Eigen::VectorXd& x0,
                    const Eigen::VectorXd& xhat0, const SimOptions& options);

/// Checks the v0 ladder of every block against the cascade bound; returns
/// one message per violation.
std::vector<std::string> cascade_violations(const JordanPlant& plant, const TriggerConfig& cfg);

struct CoordinateRates {
  std::size_t triggers = 0;
  std::size_t bits = 0;
  int g = 0;
  double rate_bits = 0.0;
  double rate_triggers = 0.0;
  double triggering_rate_upper = 0.0;
  double triggering_rate_lower = 0.0;
};

struct RateReport {
  double horizon = 0.0;
  std::size_t triggers = 0;
  std::size_t bits = 0;
  double rate_bits = 0.0;       ///< sum g / T
  double rate_triggers = 0.0;   ///< N / T
  std::vector<CoordinateRates> coordinates;

  double access_rate = 0.0;
  double packet_bits_necessary = 0.0;
  double rate_necessary = 0.0;
  double rate_necessary_approx = 0.0;
  double rate_sufficient = 0.0;
  /// Every coupling-free coordinate satisfies N_i <= 1 + T / (min inter-event time - 2 h).
  bool triggers_within_upper = true;

  double x0_norm = 0.0;
  double xT_norm = 0.0;
  bool diverged = false;
};

RateReport measure_rates(const SimTrace& trace);

/// Runtime invariants checked on a finished trace.
struct InvariantReport {
  std::size_t envelope_violations = 0;
  std::vector<std::size_t> envelope_violations_by_coord;
  std::size_t post_jump_violations = 0;
  std::size_t inter_event_violations = 0;
  std::size_t ordering_violations = 0;
  std::size_t delay_violations = 0;  ///< receptions with t_c - t_s outside [0, gamma]
  std::size_t q_outside_window = 0;  ///< informational only
  double worst_envelope_ratio = 0.0; ///< max |z| / envelope over samples and receptions
  double worst_post_jump_ratio = 0.0;
  double min_inter_event_margin = 0.0;  ///< min over k of Delta'_k - lower bound
  std::vector<std::string> messages;

  [[nodiscard]] bool ok() const {
    return envelope_violations == 0 && post_jump_violations == 0 && inter_event_violations == 0 &&
           ordering_violations == 0 && delay_violations == 0;
  }
};

/// Envelope |z_i(t)| <= v0_i((rho0 - rho_i) + e^{(lambda + sigma) gamma}) e^{-sigma t} with slack
/// 2 h (lambda + sigma) sup|z_i|, on every enabled coordinate at samples and just before
/// receptions. On coordinates free of Jordan coupling (the last one of each block) also:
/// post-jump |z_i(t_c+)| <= rho_i e^{-sigma gamma} v_i(t_s) (relative tolerance 1e-9) and
/// inter-event times >= (-ln(rho_i e^{-sigma gamma}))/(lambda + sigma) - 2 h.
/// Events must be time-ordered and every delivered delay must lie in [0, gamma].
InvariantReport verify_trace(const SimTrace& trace);

}  // namespace etrate
