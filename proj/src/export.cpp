#include "etrate/export.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

#include <json.hpp>

namespace etrate {
namespace {

using nlohmann::json;

// nlohmann prints finite doubles in shortest round-trip form but has no
// representation for NaN or infinities.
json number(double value) {
  if (std::isfinite(value)) return value;
  return format_number(value);
}

std::string csv_escape(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

template <class T>
std::string optional_cell(const std::optional<T>& value) {
  if (!value) return {};
  if constexpr (std::is_floating_point_v<T>) {
    return format_number(*value);
  } else {
    return std::to_string(*value);
  }
}

}  // namespace

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[512];
  // Plain decimals for everyday magnitudes, exponent form only for extremes.
  const double mag = std::abs(value);
  const bool plain = mag == 0.0 || (mag >= 1e-5 && mag < 1e16);
  const auto res = plain ? std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed)
                         : std::to_chars(buf, buf + sizeof buf, value, std::chars_format::scientific);
  return std::string(buf, res.ptr);
}

void write_trace_csv(std::ostream& os, const SimTrace& trace) {
  const std::size_t n = trace.dimension();
  os << 't';
  for (const char* name : {"x", "xhat", "z", "v"}) {
    for (std::size_t i = 0; i < n; ++i) os << ',' << name << '_' << i;
  }
  os << '\n';
  for (const auto& s : trace.samples) {
    os << format_number(s.t);
    for (const Eigen::VectorXd* vec : {&s.x, &s.xhat, &s.z, &s.v}) {
      for (Eigen::Index i = 0; i < vec->size(); ++i) os << ',' << format_number((*vec)(i));
    }
    os << '\n';
  }
}

std::string events_json(const SimTrace& trace) {
  json events = json::array();
  for (const auto& ev : trace.events) {
    json e;
    e["kind"] = ev.kind == EventKind::Trigger ? "trigger" : "reception";
    e["coord"] = ev.coord;
    e["t_s"] = number(ev.t_s);
    e["t_c"] = number(ev.t_c);
    e["delta"] = number(ev.delta);
    e["g"] = ev.packet.g();
    e["bits_hex"] = ev.packet.hex();
    if (ev.kind == EventKind::Reception) {
      e["q"] = number(ev.q);
      e["zbar"] = number(ev.zbar);
      e["z_before"] = number(ev.z_before);
      e["z_after"] = number(ev.z_after);
      e["q_outside_window"] = ev.q_outside_window;
    }
    events.push_back(std::move(e));
  }
  json doc;
  doc["dimension"] = trace.dimension();
  doc["g"] = trace.g;
  doc["delays"] = trace.delays;
  doc["warnings"] = trace.warnings;
  doc["divergence"] = trace.divergence ? json(*trace.divergence) : json(nullptr);
  doc["events"] = std::move(events);
  return doc.dump(2) + "\n";
}

std::string report_json(const RateReport& r, const InvariantReport& inv) {
  json coords = json::array();
  for (const auto& c : r.coordinates) {
    coords.push_back({{"triggers", c.triggers},
                      {"bits", c.bits},
                      {"g", c.g},
                      {"rate_bits", number(c.rate_bits)},
                      {"rate_triggers", number(c.rate_triggers)},
                      {"triggering_rate_upper", number(c.triggering_rate_upper)},
                      {"triggering_rate_lower", number(c.triggering_rate_lower)}});
  }
  json doc;
  doc["horizon"] = number(r.horizon);
  doc["triggers"] = r.triggers;
  doc["bits"] = r.bits;
  doc["rate_bits"] = number(r.rate_bits);
  doc["rate_triggers"] = number(r.rate_triggers);
  doc["coordinates"] = std::move(coords);
  doc["bounds"] = {{"access_rate", number(r.access_rate)},
                   {"packet_bits_necessary", number(r.packet_bits_necessary)},
                   {"rate_necessary", number(r.rate_necessary)},
                   {"rate_necessary_approx", number(r.rate_necessary_approx)},
                   {"rate_sufficient", number(r.rate_sufficient)}};
  doc["triggers_within_upper"] = r.triggers_within_upper;
  doc["x0_norm"] = number(r.x0_norm);
  doc["xT_norm"] = number(r.xT_norm);
  doc["diverged"] = r.diverged;
  doc["invariants"] = {{"ok", inv.ok()},
                       {"envelope_violations", inv.envelope_violations},
                       {"post_jump_violations", inv.post_jump_violations},
                       {"inter_event_violations", inv.inter_event_violations},
                       {"ordering_violations", inv.ordering_violations},
                       {"delay_violations", inv.delay_violations},
                       {"q_outside_window", inv.q_outside_window},
                       {"worst_envelope_ratio", number(inv.worst_envelope_ratio)},
                       {"worst_post_jump_ratio", number(inv.worst_post_jump_ratio)},
                       {"min_inter_event_margin", number(inv.min_inter_event_margin)},
                       {"messages", inv.messages}};
  return doc.dump(2) + "\n";
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << kSweepHeader << '\n';
  for (const auto& r : rows) {
    os << format_number(r.gamma) << ',' << optional_cell(r.rate_empirical) << ','
       << format_number(r.rate_necessary) << ',' << format_number(r.rate_necessary_approx) << ','
       << format_number(r.rate_sufficient) << ',' << format_number(r.rate_access) << ','
       << optional_cell(r.rate_necessary_sup) << ',' << format_number(r.rho0) << ','
       << format_number(r.sigma) << ',' << r.packet_bits << ',' << optional_cell(r.triggers) << ','
       << optional_cell(r.x0_norm) << ',' << optional_cell(r.xT_norm) << ',' << csv_escape(r.error)
       << '\n';
  }
}

void write_markers_csv(std::ostream& os, const std::vector<PhaseMarkers>& markers) {
  os << kMarkersHeader << '\n';
  for (const auto& m : markers) {
    os << format_number(m.rho0) << ',' << format_number(m.sigma) << ',' << format_number(m.gamma_c)
       << ',' << format_number(m.gamma_eq) << ',' << format_number(m.asymptote) << ','
       << format_number(m.access_rate) << '\n';
  }
}

}  // namespace etrate
