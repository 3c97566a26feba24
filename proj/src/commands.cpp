#include "etrate/commands.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "etrate/bounds.hpp"
#include "etrate/errors.hpp"
#include "etrate/export.hpp"
#include "etrate/sweep.hpp"

namespace etrate::cli {
namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return parts;
}

double to_number(const RunConfig& cfg, const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  while (used < text.size() && text[used] == ' ') ++used;
  if (used == 0 || used != text.size()) cfg.fail(key, "invalid number '" + text + "'");
  return value;
}

// "l1:p1,l2:p2" -> Jordan blocks.
std::vector<JordanBlock> parse_blocks(const RunConfig& cfg) {
  std::vector<JordanBlock> blocks;
  for (const auto& item : split(cfg.str("plant.blocks"), ',')) {
    const auto parts = split(item, ':');
    if (parts.size() != 2) cfg.fail("plant.blocks", "expected lambda:order entries, got '" + item + "'");
    const double order = to_number(cfg, "plant.blocks", parts[1]);
    if (order < 1 || order != std::floor(order)) cfg.fail("plant.blocks", "block order must be a positive integer");
    blocks.push_back(JordanBlock{to_number(cfg, "plant.blocks", parts[0]), static_cast<int>(order)});
  }
  return blocks;
}

// "a,b;c,d" -> 2x2 matrix.
Eigen::MatrixXd parse_matrix(const RunConfig& cfg, const std::string& key) {
  std::vector<std::vector<double>> rows;
  for (const auto& row : split(cfg.str(key), ';')) {
    std::vector<double> values;
    for (const auto& cell : split(row, ',')) {
      std::string t = cell;
      t.erase(0, t.find_first_not_of(' '));
      values.push_back(to_number(cfg, key, t));
    }
    if (!rows.empty() && values.size() != rows.front().size()) cfg.fail(key, "rows differ in length");
    rows.push_back(std::move(values));
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  }
  return m;
}

Eigen::VectorXd to_vector(const std::vector<double>& values) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) v(static_cast<Eigen::Index>(i)) = values[i];
  return v;
}

TriggerConfig build_trigger(const RunConfig& cfg, bool need_v0) {
  TriggerConfig t;
  if (need_v0 || cfg.has("trigger.v0")) t.v0 = cfg.numbers("trigger.v0");
  t.sigma = cfg.number("trigger.sigma");
  t.rho0 = cfg.number("trigger.rho0");
  t.gamma = cfg.number("trigger.gamma", 0.0);
  t.b = cfg.number("trigger.b", 1.0001);
  t.rho = cfg.numbers("trigger.rho", {});
  return t;
}

BoundInputs scalar_inputs(const RunConfig& cfg) {
  BoundInputs in;
  in.a = cfg.number("plant.a");
  in.sigma = cfg.number("trigger.sigma");
  in.rho0 = cfg.number("trigger.rho0");
  in.gamma = cfg.number("trigger.gamma", 0.0);
  in.b = cfg.number("trigger.b", 1.0001);
  in.nu = cfg.number("bounds.nu", 1.0);
  in.validate();
  return in;
}

std::string six(double value) {
  std::ostringstream os;
  os << std::setprecision(6) << value;
  return os.str();
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("--out: cannot create directory '" + dir + "': " + ec.message());
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + path.string() + "'");
  f << content;
}

}  // namespace

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "plant.a",       "plant.b",       "plant.k",        "plant.l",        "plant.blocks",
      "plant.B",       "plant.K",       "trigger.v0",     "trigger.sigma",  "trigger.rho0",
      "trigger.gamma", "trigger.b",     "trigger.rho",    "bounds.nu",      "bounds.assumption1",
      "bounds.g_min",  "bounds.g_max",  "init.x0",        "init.xhat0",     "delay",
      "seed",          "sim.horizon",   "sim.step",       "sim.integrator", "sim.refine",
      "sim.g",         "sim.disable",   "sweep.kind",     "sweep.gamma",    "sweep.rho0",
      "sweep.sigma",   "sweep.workers",
  };
  return keys;
}

std::vector<DelayModel> SimulationSetup::delay_models() const {
  std::vector<DelayModel> out;
  for (int i = 0; i < plant.dimension(); ++i) {
    const auto coord = static_cast<std::size_t>(i);
    out.push_back(make_delay_model(delay, trigger.gamma, coord, plant.eigenvalue_of(coord),
                                   trigger.sigma, trigger.rho0));
  }
  return out;
}

SimulationSetup build_simulation(const RunConfig& cfg) {
  cfg.require_known(known_keys());
  SimulationSetup s;
  s.scalar = !cfg.has("plant.blocks");
  if (s.scalar) {
    ScalarPlant p{cfg.number("plant.a"), cfg.number("plant.b", 1.0), cfg.number("plant.k", 0.0),
                  cfg.number("plant.l", 1.0)};
    s.plant = JordanPlant::from_scalar(p);
  } else {
    s.plant.blocks = parse_blocks(cfg);
    const int n = s.plant.dimension();
    s.plant.b = cfg.has("plant.B") ? parse_matrix(cfg, "plant.B") : Eigen::MatrixXd::Identity(n, n);
    s.plant.k = cfg.has("plant.K") ? parse_matrix(cfg, "plant.K") : Eigen::MatrixXd::Zero(s.plant.b.cols(), n);
    s.plant.l = cfg.number("plant.l", 1.0);
  }
  s.plant.validate();

  s.trigger = build_trigger(cfg, true);
  s.trigger.validate(s.plant);

  const auto n = static_cast<std::size_t>(s.plant.dimension());
  const auto x0 = cfg.numbers("init.x0");
  const auto xhat0 = cfg.numbers("init.xhat0");
  if (x0.size() != n) cfg.fail("init.x0", "needs " + std::to_string(n) + " entries");
  if (xhat0.size() != n) cfg.fail("init.xhat0", "needs " + std::to_string(n) + " entries");
  s.x0 = to_vector(x0);
  s.xhat0 = to_vector(xhat0);

  try {
    s.delay = DelaySpec::parse(cfg.str("delay", "uniform"));
  } catch (const ConfigError& err) {
    cfg.fail("delay", err.what());
  }
  if (cfg.has("seed")) s.delay.seed = cfg.unsigned64("seed", 0);

  s.options.horizon = cfg.number("sim.horizon", 7.0);
  s.options.step = cfg.number("sim.step", 1e-3);
  const std::string integrator = cfg.str("sim.integrator", "exact");
  if (integrator == "exact") {
    s.options.integrator = Integrator::Exact;
  } else if (integrator == "euler") {
    s.options.integrator = Integrator::Euler;
  } else {
    cfg.fail("sim.integrator", "expected exact or euler");
  }
  s.options.refine = cfg.flag("sim.refine", false);
  if (cfg.has("sim.g")) s.options.g = static_cast<int>(cfg.integer("sim.g", 0));
  if (cfg.has("sim.disable")) {
    s.options.channel_enabled.assign(n, true);
    for (double c : cfg.numbers("sim.disable")) {
      if (c < 0 || c >= static_cast<double>(n) || c != std::floor(c)) cfg.fail("sim.disable", "invalid coordinate");
      s.options.channel_enabled[static_cast<std::size_t>(c)] = false;
    }
  }
  return s;
}

std::vector<std::pair<std::string, double>> bounds_table(const RunConfig& cfg) {
  cfg.require_known(known_keys());
  std::vector<std::pair<std::string, double>> rows;
  if (cfg.has("plant.blocks")) {
    VectorBoundInputs vin;
    vin.blocks = parse_blocks(cfg);
    vin.sigma = cfg.number("trigger.sigma");
    vin.rho0 = cfg.number("trigger.rho0");
    vin.gamma = cfg.number("trigger.gamma", 0.0);
    vin.b = cfg.number("trigger.b", 1.0001);
    vin.nu = cfg.number("bounds.nu", 1.0);
    vin.rho = cfg.numbers("trigger.rho", {});
    vin.validate();
    rows.emplace_back("access_rate", access_rate_necessary(vin));
    rows.emplace_back("rate_necessary", transmission_rate_necessary(vin));
    rows.emplace_back("rate_necessary_approx", transmission_rate_necessary_approx(vin));
    rows.emplace_back("rate_sufficient", transmission_rate_sufficient(vin));
    if (cfg.has("trigger.v0")) {
      JordanPlant plant;
      plant.blocks = vin.blocks;
      const TriggerConfig trig = build_trigger(cfg, true);
      const auto ladder = vin.resolved_ladder();
      std::size_t offset = 0;
      for (std::size_t j = 0; j < vin.blocks.size(); ++j) {
        const auto p = static_cast<std::size_t>(vin.blocks[j].order);
        std::vector<double> v0(p);
        for (std::size_t i = 0; i < p; ++i) v0[i] = trig.v0_at(offset + i);
        const auto cb = v0_cascade_bound(vin.blocks[j], vin.sigma, vin.rho0, vin.gamma,
                                         std::span<const double>(ladder).subspan(offset, p), v0);
        for (std::size_t i = 1; i < p; ++i) {
          rows.emplace_back("max_v0_" + std::to_string(offset + i), cb.max_v0[i - 1]);
        }
        offset += p;
      }
    }
    return rows;
  }

  const BoundInputs in = scalar_inputs(cfg);
  rows.emplace_back("access_rate", access_rate_necessary(in));
  rows.emplace_back("packet_bits_necessary", packet_bits_necessary(in));
  rows.emplace_back("triggering_rate_upper", triggering_rate_upper(in));
  rows.emplace_back("min_inter_event_time", min_inter_event_time(in));
  rows.emplace_back("triggering_rate_lower", triggering_rate_lower(in));
  rows.emplace_back("rate_necessary", transmission_rate_necessary(in));
  rows.emplace_back("rate_necessary_approx", transmission_rate_necessary_approx(in));
  rows.emplace_back("rate_sufficient", transmission_rate_sufficient(in));
  rows.emplace_back("packet_size_sufficient", packet_size_sufficient(in));
  rows.emplace_back("time_quantization_tolerance", time_quantization_tolerance(in));
  rows.emplace_back("gamma_c", critical_delay(in));
  rows.emplace_back("gamma_eq", equilibrium_delay(in.a));
  rows.emplace_back("beta", beta(in));
  rows.emplace_back("asymptote", rate_asymptote(in));
  if (cfg.flag("bounds.assumption1", false)) {
    const auto g_min = static_cast<int>(cfg.integer("bounds.g_min", 2));
    const auto g_max = static_cast<int>(cfg.integer("bounds.g_max", 32));
    if (g_min < 2 || g_max < g_min) cfg.fail("bounds.g_min", "need 2 <= g_min <= g_max");
    const auto window = assumption1_window(in, g_min);
    rows.emplace_back("assumption1_lower", window.lower_bound);
    rows.emplace_back("assumption1_upper", window.upper_bound);
    const auto witnesses = assumption1_witnesses(in, g_min, g_max);
    rows.emplace_back("assumption1_witness_count", static_cast<double>(witnesses.size()));
    for (int g : witnesses) rows.emplace_back("assumption1_witness", g);
  }
  return rows;
}

int cmd_bounds(const RunConfig& cfg, std::ostream& out, const std::optional<std::string>& json_path) {
  const auto rows = bounds_table(cfg);
  for (const auto& [name, value] : rows) {
    out << std::left << std::setw(30) << name << ' ' << six(value) << '\n';
  }
  if (json_path) {
    nlohmann::json doc = nlohmann::json::object();
    nlohmann::json witnesses = nlohmann::json::array();
    for (const auto& [name, value] : rows) {
      if (name == "assumption1_witness") {
        witnesses.push_back(static_cast<int>(value));
      } else if (std::isfinite(value)) {
        doc[name] = value;
      } else {
        doc[name] = format_number(value);
      }
    }
    if (cfg.flag("bounds.assumption1", false)) doc["assumption1_witnesses"] = witnesses;
    write_file(*json_path, doc.dump(2) + "\n");
  }
  return kOk;
}

int cmd_simulate(const RunConfig& cfg, const std::string& out_dir, std::ostream& out, std::ostream& err) {
  const SimulationSetup s = build_simulation(cfg);
  const auto delays = s.delay_models();
  const SimTrace trace = run_vector(s.plant, s.trigger, delays, s.x0, s.xhat0, s.options);
  for (const auto& w : trace.warnings) err << "warning: " << w << '\n';

  const RateReport report = measure_rates(trace);
  const InvariantReport inv = verify_trace(trace);

  ensure_dir(out_dir);
  const std::filesystem::path dir(out_dir);
  {
    std::ostringstream csv;
    write_trace_csv(csv, trace);
    write_file(dir / "trace.csv", csv.str());
  }
  write_file(dir / "events.json", events_json(trace));
  write_file(dir / "report.json", report_json(report, inv));

  out << "triggers " << report.triggers << "\n"
      << "bits " << report.bits << "\n"
      << "rate_bits " << format_number(report.rate_bits) << "\n"
      << "rate_triggers " << format_number(report.rate_triggers) << "\n"
      << "x0_norm " << format_number(report.x0_norm) << "\n"
      << "xT_norm " << format_number(report.xT_norm) << "\n"
      << "invariants " << (inv.ok() ? "ok" : "violated") << "\n";

  if (trace.diverged()) {
    err << "error: divergence: " << *trace.divergence << '\n';
    return kDivergence;
  }
  if (!inv.ok()) {
    for (const auto& m : inv.messages) err << "invariant: " << m << '\n';
    return kInvariant;
  }
  return kOk;
}

int cmd_sweep(const RunConfig& cfg, const std::string& out_dir, std::ostream& out, std::ostream& err) {
  cfg.require_known(known_keys());
  std::vector<double> grid;
  try {
    grid = parse_grid(cfg.str("sweep.gamma"));
  } catch (const ConfigError& e) {
    cfg.fail("sweep.gamma", e.what());
  }
  const auto workers = static_cast<unsigned>(cfg.integer("sweep.workers", 0));
  const std::string kind = cfg.str("sweep.kind", "bounds");

  std::vector<SweepRow> rows;
  std::optional<std::vector<PhaseMarkers>> markers;
  if (kind == "simulate") {
    const SimulationSetup s = build_simulation(cfg);
    if (!s.scalar) cfg.fail("plant.blocks", "simulation sweeps support scalar plants only");
    SimSweepSpec spec;
    spec.plant = ScalarPlant{s.plant.blocks.front().lambda, s.plant.b(0, 0), s.plant.k(0, 0), s.plant.l};
    spec.v0 = s.trigger.v0.front();
    spec.sigma = s.trigger.sigma;
    spec.rho0 = s.trigger.rho0;
    spec.b = s.trigger.b;
    spec.delay = s.delay;
    spec.x0 = s.x0(0);
    spec.xhat0 = s.xhat0(0);
    spec.options = s.options;
    rows = sweep_gamma(spec, grid, workers);
  } else if (kind == "bounds") {
    PhaseSpec spec;
    spec.a = cfg.number("plant.a");
    spec.sigma = cfg.number("trigger.sigma");
    spec.rho0s = cfg.numbers("sweep.rho0", {cfg.number("trigger.rho0")});
    spec.b = cfg.number("trigger.b", 1.0001);
    spec.nu = cfg.number("bounds.nu", 1.0);
    spec.sigma_grid = cfg.numbers("sweep.sigma", {});
    rows = phase_curves(spec, grid, workers);
    markers = phase_markers(spec);
  } else {
    cfg.fail("sweep.kind", "expected simulate or bounds");
  }

  ensure_dir(out_dir);
  const std::filesystem::path dir(out_dir);
  {
    std::ostringstream csv;
    write_sweep_csv(csv, rows);
    write_file(dir / "sweep.csv", csv.str());
  }
  if (markers) {
    std::ostringstream csv;
    write_markers_csv(csv, *markers);
    write_file(dir / "markers.csv", csv.str());
  }

  std::size_t ok = 0, diverged = 0;
  for (const auto& r : rows) {
    if (r.error.empty()) {
      ++ok;
    } else {
      err << "row gamma=" << format_number(r.gamma) << ": " << r.error << '\n';
      if (r.error.rfind("divergence", 0) == 0) ++diverged;
    }
  }
  for (std::size_t i : ordering_violations(rows)) {
    err << "note: necessary rate above sufficient rate at gamma=" << format_number(rows[i].gamma)
        << ", rho0=" << format_number(rows[i].rho0) << '\n';
  }
  out << "rows " << rows.size() << "\n"
      << "failed " << rows.size() - ok << "\n";
  if (ok > 0) return kOk;
  return diverged == rows.size() ? kDivergence : kInvariant;
}

int exit_code_for(const std::exception& error) {
  if (dynamic_cast<const DivergenceError*>(&error)) return kDivergence;
  if (dynamic_cast<const ConfigError*>(&error) || dynamic_cast<const DomainError*>(&error) ||
      dynamic_cast<const PreconditionError*>(&error)) {
    return kUsage;
  }
  return kInvariant;
}

}  // namespace etrate::cli
