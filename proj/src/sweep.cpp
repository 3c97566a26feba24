#include "etrate/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <thread>

#include "etrate/bounds.hpp"
#include "etrate/errors.hpp"

namespace etrate {
namespace {

double parse_double(const std::string& text) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || !std::isfinite(value)) {
    throw ConfigError("grid: invalid number '" + text + "'");
  }
  return value;
}

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

// Evaluates task(i) for i in [0, count) on up to `workers` threads.
void for_each_row(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& task) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) task(i);
    });
  }
  for (auto& t : pool) t.join();
}

void fill_analytic(SweepRow& row, double a, double b, double nu) {
  const BoundInputs in{a, row.sigma, row.rho0, row.gamma, b, nu};
  in.validate();
  row.rate_necessary = transmission_rate_necessary(in);
  row.rate_necessary_approx = transmission_rate_necessary_approx(in);
  row.rate_sufficient = transmission_rate_sufficient(in);
  row.rate_access = access_rate_necessary(in);
  row.packet_bits = packet_size_sufficient(in);
}

}  // namespace

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw ConfigError("grid: expected start:step:end, got '" + text + "'");
    const double start = parse_double(parts[0]);
    const double step = parse_double(parts[1]);
    const double end = parse_double(parts[2]);
    if (!(step > 0.0)) throw ConfigError("grid: step must be positive");
    if (end < start) throw ConfigError("grid: end must not precede start");
    const auto count = static_cast<long long>(std::floor((end - start) / step + 1e-9));
    for (long long i = 0; i <= count; ++i) grid.push_back(start + static_cast<double>(i) * step);
  } else if (!text.empty()) {
    for (const auto& part : split(text, ',')) grid.push_back(parse_double(part));
  }
  if (grid.empty()) throw ConfigError("grid: empty grid");
  return grid;
}

std::vector<SweepRow> sweep_gamma(const SimSweepSpec& spec, const std::vector<double>& gammas,
                                  unsigned workers) {
  if (gammas.empty()) throw ConfigError("sweep: empty gamma grid");
  for (double g : gammas) {
    if (!(g > 0.0)) throw ConfigError("sweep: gamma grid values must be positive");
  }
  std::vector<SweepRow> rows(gammas.size());
  for_each_row(gammas.size(), workers, [&](std::size_t i) {
    SweepRow& row = rows[i];
    row.gamma = gammas[i];
    row.rho0 = spec.rho0;
    row.sigma = spec.sigma;
    try {
      fill_analytic(row, spec.plant.a, spec.b, 1.0);
      const auto cfg = TriggerConfig::scalar(spec.v0, spec.sigma, spec.rho0, row.gamma, spec.b);
      const DelayModel delay = make_delay_model(spec.delay, row.gamma, 0, spec.plant.a, spec.sigma, spec.rho0);
      SimOptions options = spec.options;
      options.record_samples = false;
      const SimTrace trace = run_scalar(spec.plant, cfg, delay, spec.x0, spec.xhat0, options);
      const RateReport rep = measure_rates(trace);
      row.rate_empirical = rep.rate_bits;
      row.packet_bits = trace.g.front();
      row.triggers = rep.triggers;
      row.x0_norm = rep.x0_norm;
      row.xT_norm = rep.xT_norm;
      if (trace.diverged()) row.error = "divergence: " + *trace.divergence;
    } catch (const Error& err) {
      row.error = err.what();
    }
  });
  return rows;
}

std::vector<SweepRow> phase_curves(const PhaseSpec& spec, const std::vector<double>& gammas,
                                   unsigned workers) {
  if (gammas.empty()) throw ConfigError("sweep: empty gamma grid");
  if (spec.rho0s.empty()) throw ConfigError("sweep: empty rho0 list");
  const std::size_t per = gammas.size();
  std::vector<SweepRow> rows(spec.rho0s.size() * per);
  for_each_row(rows.size(), workers, [&](std::size_t i) {
    SweepRow& row = rows[i];
    row.rho0 = spec.rho0s[i / per];
    row.gamma = gammas[i % per];
    row.sigma = spec.sigma;
    try {
      fill_analytic(row, spec.a, spec.b, spec.nu);
      if (!spec.sigma_grid.empty()) {
        double best = 0.0;
        for (double s : spec.sigma_grid) {
          const BoundInputs in{spec.a, s, row.rho0, row.gamma, spec.b, spec.nu};
          in.validate();
          best = std::max(best, transmission_rate_necessary(in));
        }
        row.rate_necessary_sup = best;
      }
    } catch (const Error& err) {
      row.error = err.what();
    }
  });
  return rows;
}

std::vector<PhaseMarkers> phase_markers(const PhaseSpec& spec) {
  std::vector<PhaseMarkers> out;
  for (double rho0 : spec.rho0s) {
    const BoundInputs in{spec.a, spec.sigma, rho0, 0.0, spec.b, spec.nu};
    in.validate();
    out.push_back(PhaseMarkers{rho0, spec.sigma, critical_delay(in), equilibrium_delay(spec.a),
                               rate_asymptote(in), access_rate_necessary(in)});
  }
  return out;
}

std::vector<std::size_t> ordering_violations(const std::vector<SweepRow>& rows) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].error.empty() && rows[i].rate_necessary > rows[i].rate_sufficient) out.push_back(i);
  }
  return out;
}

}  // namespace etrate
