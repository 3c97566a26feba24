#pragma once

// Closed-form rate and bit bounds for event-triggered stabilization over a
// bounded-delay channel. `log` quantities are base 2 (bits); `ln` is natural.
//
// Notation used in the comments below:
//   A      growth rate (or Jordan eigenvalue lambda_j)
//   sigma  decay rate of the triggering function v(t) = v0 e^{-sigma t}
//   rho0   post-jump fraction, rho(t_s) = rho0 e^{-sigma gamma} v(t_s)
//   gamma  worst-case channel delay
//   b      time-quantization window factor (windows of length b gamma)
//   nu     quantization precision parameter (nu >= 1)

#include <cstddef>
#include <span>
#include <vector>

#include "etrate/model.hpp"

namespace etrate {

struct BoundInputs {
  double a = 1.0;
  double sigma = 1.0;
  double rho0 = 0.5;
  double gamma = 0.0;
  double b = 1.0001;
  double nu = 1.0;

  void validate() const;
};

/// Inputs for a Jordan-form plant. `rho` holds the per-coordinate ladder
/// (empty selects rho_i = rho0 i / p in every block).
struct VectorBoundInputs {
  std::vector<JordanBlock> blocks;
  double sigma = 1.0;
  double rho0 = 0.5;
  double gamma = 0.0;
  double b = 1.0001;
  double nu = 1.0;
  std::vector<double> rho;

  [[nodiscard]] int dimension() const;
  [[nodiscard]] double trace() const;
  /// Scalar inputs for block j, with a = lambda_j.
  [[nodiscard]] BoundInputs block_inputs(std::size_t j) const;
  [[nodiscard]] std::vector<double> resolved_ladder() const;
  void validate() const;
};

// --- information access rate -------------------------------------------------

/// (A + sigma) / ln 2; vector: (Tr(A) + n sigma) / ln 2.
double access_rate_necessary(const BoundInputs& in);
double access_rate_necessary(const VectorBoundInputs& in);

enum class BitsKind { Estimation, Stabilization };

/// Bits the controller must have received by `horizon`.
/// Estimation: t (Tr(A) + n sigma)/ln 2 + n log(L / ||z(0)||).
/// Stabilization: t (Tr(A) + n sigma)/ln 2.
double bits_lower_bound(double horizon, double l, double z0_norm, const BoundInputs& in,
                        BitsKind kind);
double bits_lower_bound(double horizon, double l, double z0_norm, const VectorBoundInputs& in,
                        BitsKind kind);

// --- necessary transmission rate ---------------------------------------------

/// Per-event packet size: max{0, log((e^{A gamma} - 1) / (rho0 e^{-sigma gamma}))}.
double packet_bits_necessary(const BoundInputs& in);

/// (A + sigma) / (-ln(rho0 e^{-sigma gamma})).
double triggering_rate_upper(const BoundInputs& in);
/// Reciprocal of triggering_rate_upper: uniform lower bound on inter-event time.
double min_inter_event_time(const BoundInputs& in);

/// (A + sigma) / (ln nu + ln(2 + e^{sigma gamma} / rho0)).
double triggering_rate_lower(const BoundInputs& in);

/// triggering_rate_lower * packet_bits_necessary; vector: sum over blocks
/// weighted by block order.
double transmission_rate_necessary(const BoundInputs& in);
double transmission_rate_necessary(const VectorBoundInputs& in);

/// (A + sigma)/ln 2 * max{0, 1 + log(e^{A gamma} - 1) / (-log(rho0 e^{-sigma gamma}))}.
/// Accurate when rho0 << e^{sigma gamma} / max{2, nu}; not enforced.
double transmission_rate_necessary_approx(const BoundInputs& in);
double transmission_rate_necessary_approx(const VectorBoundInputs& in);

// --- sufficient transmission rate --------------------------------------------

/// (A + sigma)/(-ln(rho0 e^{-sigma gamma}))
///   * max{0, 1 + log(b gamma (A + sigma) / ln(1 + rho0 e^{-(sigma + A) gamma}))}.
/// Vector: sum over every coordinate, with the ladder value rho_i in the log term.
double transmission_rate_sufficient(const BoundInputs& in);
double transmission_rate_sufficient(const VectorBoundInputs& in);

/// Integer packet size used by the encoder:
/// max{1, ceil(1 + log(b gamma (A + sigma) / ln(1 + rho0 e^{-(sigma + A) gamma})))}.
/// Returns 1 at gamma = 0.
int packet_size_sufficient(const BoundInputs& in);

/// Largest admissible |t_s - q(t_s)|: ln(1 + rho0 e^{-(sigma + A) gamma}) / (A + sigma).
double time_quantization_tolerance(const BoundInputs& in);

// --- phase transition markers ------------------------------------------------

/// Root of e^{A gamma} - rho0 e^{-sigma gamma} = 1 on [0, ln 2 / A].
double critical_delay(const BoundInputs& in);
/// ln 2 / A.
double equilibrium_delay(double a);
/// (A + sigma)/ln 2 * (1 + A / sigma).
double rate_asymptote(const BoundInputs& in);
/// (1/A) ln(1 + 2 rho0 e^{-sigma gamma}).
double beta(const BoundInputs& in);

// --- compatibility of the deterministic codec with nu-precision --------------

struct Assumption1Window {
  bool lower_ok = false;      ///< g meets the sufficient packet-size bound
  bool upper_ok = false;      ///< g small enough to keep nu-precision
  bool expansion_ok = false;  ///< cell expansion condition with delta = b gamma / 2^{g-2}
  double lower_bound = 0.0;
  double upper_bound = 0.0;

  [[nodiscard]] bool all() const { return lower_ok && upper_ok && expansion_ok; }
};

/// Requires nu >= 2, g >= 2 and gamma > 0 (DomainError otherwise).
Assumption1Window assumption1_window(const BoundInputs& in, int g);

/// Every g in [g_min, g_max] for which all three conditions hold.
std::vector<int> assumption1_witnesses(const BoundInputs& in, int g_min, int g_max);

// --- Jordan block cascade ----------------------------------------------------

struct CascadeBounds {
  /// max_v0[i - 1] bounds v0 of coordinate i (0-based, i >= 1) given the
  /// configured v0 of coordinate i - 1. +inf when gamma = 0.
  std::vector<double> max_v0;
  /// Envelope constant (rho0 - rho_i) + e^{(lambda + sigma) gamma} per coordinate.
  std::vector<double> envelope;
};

/// Upper bounds on the triggering-function initial values inside one Jordan
/// block. `ladder` and `v0` are the block's per-coordinate values.
CascadeBounds v0_cascade_bound(const JordanBlock& block, double sigma, double rho0,
                               double gamma, std::span<const double> ladder,
                               std::span<const double> v0);

}  // namespace etrate
