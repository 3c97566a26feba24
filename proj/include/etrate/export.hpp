#pragma once

// CSV / JSON serialization. Numbers are written in the shortest decimal form
// that reads back to the same double, so files are byte-stable.

#include <iosfwd>
#include <string>
#include <vector>

#include "etrate/sim.hpp"
#include "etrate/sweep.hpp"

namespace etrate {

/// Shortest round-trip decimal, plain for 1e-5 <= |x| < 1e16 and exponent form
/// otherwise; "nan", "inf", "-inf" for non-finite values.
std::string format_number(double value);

/// Columns: t, x_0..x_{n-1}, xhat_0.., z_0.., v_0..
void write_trace_csv(std::ostream& os, const SimTrace& trace);

/// {"dimension", "g", "delays", "warnings", "divergence", "events": [...]}, each event with
/// kind, coord, t_s, t_c, delta, g, bits_hex (receptions add q, zbar, z_before, z_after,
/// q_outside_window).
std::string events_json(const SimTrace& trace);

std::string report_json(const RateReport& report, const InvariantReport& invariants);

inline constexpr const char* kSweepHeader =
    "gamma,rate_empirical,rate_necessary,rate_necessary_approx,rate_sufficient,rate_access,"
    "rate_necessary_sup,rho0,sigma,packet_bits,triggers,x0_norm,xT_norm,error";

/// Empty cells for values a row does not carry.
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

inline constexpr const char* kMarkersHeader = "rho0,sigma,gamma_c,gamma_eq,asymptote,access_rate";

void write_markers_csv(std::ostream& os, const std::vector<PhaseMarkers>& markers);

}  // namespace etrate
