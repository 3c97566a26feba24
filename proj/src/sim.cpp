#include "etrate/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "etrate/bounds.hpp"
#include "etrate/errors.hpp"
#include "etrate/numeric.hpp"

namespace etrate {

std::size_t SimTrace::total_triggers() const {
  std::size_t n = 0;
  for (auto c : triggers) n += c;
  return n;
}

std::size_t SimTrace::total_bits() const {
  std::size_t n = 0;
  for (auto c : bits) n += c;
  return n;
}

namespace {

// True when coordinate `coord` is fed by the next coordinate of its Jordan block.
bool coupled(const JordanPlant& plant, std::size_t coord) {
  const auto [block, pos] = plant.locate(coord);
  return pos + 1 < plant.blocks[block].order;
}

BoundInputs coordinate_inputs(const JordanPlant& plant, const TriggerConfig& cfg,
                              const std::vector<double>& ladder, std::size_t coord) {
  return BoundInputs{plant.eigenvalue_of(coord), cfg.sigma, ladder[coord], cfg.gamma, cfg.b, 1.0};
}

class Engine {
 public:
  Engine(const JordanPlant& plant, const TriggerConfig& cfg, const std::vector<DelayModel>& delays,
         const SimOptions& options, SimTrace& trace)
      : plant_(plant),
        cfg_(cfg),
        delays_(delays),
        options_(options),
        trace_(trace),
        prop_(plant, options.integrator),
        n_(static_cast<std::size_t>(plant.dimension())),
        flight_(n_),
        sent_(n_, 0),
        last_trigger_(n_, -std::numeric_limits<double>::infinity()) {}

  void run(const Eigen::VectorXd& x0, const Eigen::VectorXd& xhat0) {
    const double h = options_.step;
    const double horizon = options_.horizon;
    const auto steps = static_cast<long long>(std::ceil(horizon / h - 1e-9));
    auto grid_time = [&](long long k) { return k >= steps ? horizon : static_cast<double>(k) * h; };
    const Transition grid_step = prop_.transition(h);

    state_ = SimState{0.0, x0, xhat0};
    long long k = 0;
    try {
      fire(triggers_due());
      record();
      while (k < steps) {
        const double t_grid = grid_time(k + 1);
        const auto next = flight_.next_delivery();
        if (next && flight_.delivery_time(*next) < t_grid) {
          move_to(flight_.delivery_time(*next));
          deliver_due();
          continue;
        }
        const SimState before = state_;
        // Full grid steps reuse one transition; grid times come from the index.
        if (state_.t == grid_time(k) && (k + 1 < steps || t_grid == static_cast<double>(steps) * h)) {
          state_ = prop_.apply(grid_step, state_);
          state_.t = t_grid;
          check_bounded();
        } else {
          move_to(t_grid);
        }
        ++k;
        // Channels delivering at this grid point are busy until the delivery,
        // so a crossing found before it only concerns idle channels.
        if (options_.refine) {
          const std::vector<std::size_t> due = triggers_due();
          if (!due.empty()) {
            const auto [t_star, first] = earliest_crossing(before, due);
            if (t_star < state_.t) {
              state_ = before;
              move_to(t_star);
              --k;
              fire(first);
              continue;
            }
          }
        }
        deliver_due();
        const std::vector<std::size_t> due = triggers_due();
        fire(due);
        record();
      }
    } catch (const DivergenceError& err) {
      trace_.divergence = err.what();
    }
    trace_.final_state = state_;
    trace_.end_time = state_.t;
  }

 private:
  double v(std::size_t i, double t) const { return trigger_value(cfg_, i, t); }
  bool enabled(std::size_t i) const {
    return options_.channel_enabled.empty() || options_.channel_enabled[i];
  }

  void check_bounded() const {
    const double norm = state_.x.norm();
    if (!(norm <= options_.divergence_threshold)) {
      std::ostringstream os;
      os << "state norm " << norm << " exceeded " << options_.divergence_threshold << " at t=" << state_.t;
      throw DivergenceError(os.str());
    }
  }

  void move_to(double t) {
    if (t > state_.t) {
      state_ = prop_.advance(state_, t - state_.t);
      check_bounded();
    }
    state_.t = t;
  }

  std::vector<std::size_t> triggers_due() const {
    std::vector<std::size_t> due;
    const Eigen::VectorXd z = state_.error();
    for (std::size_t i = 0; i < n_; ++i) {
      if (!enabled(i) || !flight_.admit(i)) continue;
      if (std::abs(z(static_cast<Eigen::Index>(i))) >= v(i, state_.t)) due.push_back(i);
    }
    return due;
  }

  // Earliest crossing |z_i(s)| = v_i(s) on [before.t, now] among `due`, and the
  // coordinates crossing at that time. A coordinate that already fired at
  // before.t keeps the grid time.
  std::pair<double, std::vector<std::size_t>> earliest_crossing(
      const SimState& before, const std::vector<std::size_t>& due) const {
    const double t0 = before.t;
    const Eigen::VectorXd z0 = before.error();
    std::vector<double> times;
    for (std::size_t i : due) {
      double t_star = state_.t;
      if (last_trigger_[i] < t0) {
        const auto idx = static_cast<Eigen::Index>(i);
        auto f = [&](double s) {
          const double zi = s == t0 ? z0(idx) : (prop_.error_transition(s - t0).row(idx) * z0)(0);
          return std::abs(zi) - v(i, s);
        };
        if (f(t0) >= 0.0) {
          t_star = t0;
        } else if (f(state_.t) >= 0.0) {
          t_star = numeric::bisect(f, t0, state_.t).above;
        }
      }
      times.push_back(t_star);
    }
    const double best = *std::min_element(times.begin(), times.end());
    std::vector<std::size_t> first;
    for (std::size_t j = 0; j < due.size(); ++j) {
      if (times[j] == best) first.push_back(due[j]);
    }
    return {best, first};
  }

  void fire(const std::vector<std::size_t>& coords) {
    const Eigen::VectorXd z = state_.error();
    for (std::size_t i : coords) {
      const double zi = z(static_cast<Eigen::Index>(i));
      const int sign = zi < 0.0 ? -1 : 1;
      Event ev;
      ev.kind = EventKind::Trigger;
      ev.coord = i;
      ev.t_s = state_.t;
      ev.packet = encode(state_.t, sign, trace_.g[i], cfg_.b, cfg_.gamma, i);
      ev.delta = sample_delay(delays_[i], sent_[i]++);
      ev.t_c = ev.t_s + ev.delta;
      ev.v_ts = v(i, ev.t_s);
      flight_.send(i, ScheduledPacket{ev.packet, ev.t_c});
      last_trigger_[i] = state_.t;
      trace_.triggers[i] += 1;
      trace_.bits[i] += static_cast<std::size_t>(trace_.g[i]);
      trace_.events.push_back(std::move(ev));
    }
    deliver_due();
  }

  void deliver_due() {
    while (true) {
      const auto next = flight_.next_delivery();
      if (!next || flight_.delivery_time(*next) > state_.t) break;
      const std::size_t i = *next;
      const ScheduledPacket sp = flight_.take(i);
      const auto idx = static_cast<Eigen::Index>(i);
      const Decoded dec = decode(sp.packet, sp.t_c, cfg_.b, cfg_.gamma);

      Event ev;
      ev.kind = EventKind::Reception;
      ev.coord = i;
      ev.t_s = sp.packet.t_s;
      ev.t_c = sp.t_c;
      ev.delta = sp.t_c - sp.packet.t_s;
      ev.packet = sp.packet;
      ev.v_ts = v(i, ev.t_s);
      ev.q = dec.q;
      ev.q_outside_window = dec.outside_window;
      ev.zbar = reconstruct_error(dec.sign, dec.q, sp.t_c, cfg_.v0_at(i), cfg_.sigma,
                                  plant_.eigenvalue_of(i));
      ev.z_before = state_.error()(idx);
      state_ = apply_jump(state_, i, ev.zbar);
      ev.z_after = state_.x(idx) - state_.xhat(idx);
      trace_.events.push_back(std::move(ev));
    }
  }

  void record() {
    if (!options_.record_samples) return;
    Sample s;
    s.t = state_.t;
    s.x = state_.x;
    s.xhat = state_.xhat;
    s.z = state_.error();
    s.v.resize(static_cast<Eigen::Index>(n_));
    for (std::size_t i = 0; i < n_; ++i) s.v(static_cast<Eigen::Index>(i)) = v(i, state_.t);
    trace_.samples.push_back(std::move(s));
  }

  const JordanPlant& plant_;
  const TriggerConfig& cfg_;
  const std::vector<DelayModel>& delays_;
  const SimOptions& options_;
  SimTrace& trace_;
  Propagator prop_;
  std::size_t n_;
  InFlight flight_;
  std::vector<std::size_t> sent_;
  std::vector<double> last_trigger_;
  SimState state_;
};

}  // namespace

std::vector<std::string> cascade_violations(const JordanPlant& plant, const TriggerConfig& cfg) {
  std::vector<std::string> out;
  const auto ladder = cfg.resolved_ladder(plant);
  std::size_t offset = 0;
  for (std::size_t j = 0; j < plant.blocks.size(); ++j) {
    const auto& blk = plant.blocks[j];
    const auto p = static_cast<std::size_t>(blk.order);
    if (p > 1) {
      std::vector<double> v0(p);
      for (std::size_t i = 0; i < p; ++i) v0[i] = cfg.v0_at(offset + i);
      const auto bound = v0_cascade_bound(blk, cfg.sigma, cfg.rho0, cfg.gamma,
                                          std::span<const double>(ladder).subspan(offset, p), v0);
      for (std::size_t i = 1; i < p; ++i) {
        if (v0[i] > bound.max_v0[i - 1]) {
          std::ostringstream os;
          os << "v0 of coordinate " << offset + i << " is " << v0[i] << ", above the cascade bound "
             << bound.max_v0[i - 1] << " implied by coordinate " << offset + i - 1;
          out.push_back(os.str());
        }
      }
    }
    offset += p;
  }
  return out;
}

SimTrace run_vector(const JordanPlant& plant, const TriggerConfig& cfg,
                    const std::vector<DelayModel>& delays, const Eigen::VectorXd& x0,
                    const Eigen::VectorXd& xhat0, const SimOptions& options) {
  plant.validate();
  cfg.validate(plant);
  const auto n = static_cast<std::size_t>(plant.dimension());
  if (!(options.step > 0.0) || !std::isfinite(options.step)) {
    throw PreconditionError("simulate: step must be positive");
  }
  if (!(options.horizon > 0.0) || !std::isfinite(options.horizon)) {
    throw PreconditionError("simulate: horizon must be positive");
  }
  if (delays.size() != n) {
    throw ConfigError("simulate: need one delay model per coordinate (" + std::to_string(n) + ")");
  }
  for (const auto& d : delays) {
    if (d.gamma() != cfg.gamma) throw ConfigError("simulate: delay model gamma differs from trigger gamma");
  }
  if (!options.channel_enabled.empty() && options.channel_enabled.size() != n) {
    throw ConfigError("simulate: channel switch list must have one entry per coordinate");
  }
  if (x0.size() != static_cast<Eigen::Index>(n) || xhat0.size() != static_cast<Eigen::Index>(n)) {
    throw PreconditionError("simulate: initial state dimension does not match plant");
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto idx = static_cast<Eigen::Index>(i);
    if (std::abs(x0(idx) - xhat0(idx)) > cfg.v0_at(i)) {
      std::ostringstream os;
      os << "simulate: |z(0)| of coordinate " << i << " exceeds v0 = " << cfg.v0_at(i);
      throw PreconditionError(os.str());
    }
  }
  if (const auto bad = cascade_violations(plant, cfg); !bad.empty()) {
    throw ConfigError("simulate: " + bad.front());
  }

  SimTrace trace;
  trace.plant = plant;
  trace.trigger = cfg;
  trace.options = options;
  trace.ladder = cfg.resolved_ladder(plant);
  trace.triggers.assign(n, 0);
  trace.bits.assign(n, 0);
  trace.x0 = x0;
  for (std::size_t i = 0; i < n; ++i) {
    int g = 0;
    if (options.g) {
      g = *options.g;
    } else {
      g = packet_size_sufficient(coordinate_inputs(plant, cfg, trace.ladder, i));
    }
    if (g < 1 || g > kMaxPacketBits) {
      throw ConfigError("simulate: packet size " + std::to_string(g) + " for coordinate " +
                        std::to_string(i) + " outside [1, " + std::to_string(kMaxPacketBits) + "]");
    }
    if (cfg.gamma == 0.0 && g != 1) {
      throw ConfigError("simulate: zero delay bound admits only 1-bit packets");
    }
    trace.g.push_back(g);
    trace.delays.push_back(delays[i].describe());
    if (delays[i].warning()) trace.warnings.push_back(*delays[i].warning());
  }

  Engine(plant, cfg, delays, options, trace).run(x0, xhat0);
  return trace;
}

SimTrace run_scalar(const ScalarPlant& plant, const TriggerConfig& cfg, const DelayModel& delay,
                    double x0, double xhat0, const SimOptions& options) {
  plant.validate();
  if (cfg.v0.size() != 1) throw ConfigError("simulate: scalar run takes a single v0");
  if (!(std::abs(x0 - xhat0) < cfg.v0.front())) {
    throw PreconditionError("simulate: |z(0)| must be below v0");
  }
  Eigen::VectorXd x(1), xhat(1);
  x << x0;
  xhat << xhat0;
  return run_vector(JordanPlant::from_scalar(plant), cfg, {delay}, x, xhat, options);
}

RateReport measure_rates(const SimTrace& trace) {
  RateReport r;
  const double horizon = trace.end_time;
  r.horizon = horizon;
  r.triggers = trace.total_triggers();
  r.bits = trace.total_bits();
  if (horizon > 0.0) {
    r.rate_bits = static_cast<double>(r.bits) / horizon;
    r.rate_triggers = static_cast<double>(r.triggers) / horizon;
  }
  const double h = trace.options.step;
  for (std::size_t i = 0; i < trace.dimension(); ++i) {
    const BoundInputs in = coordinate_inputs(trace.plant, trace.trigger, trace.ladder, i);
    CoordinateRates c;
    c.triggers = trace.triggers[i];
    c.bits = trace.bits[i];
    c.g = trace.g[i];
    if (horizon > 0.0) {
      c.rate_bits = static_cast<double>(c.bits) / horizon;
      c.rate_triggers = static_cast<double>(c.triggers) / horizon;
    }
    c.triggering_rate_upper = triggering_rate_upper(in);
    c.triggering_rate_lower = triggering_rate_lower(in);
    r.packet_bits_necessary += packet_bits_necessary(in);
    if (!coupled(trace.plant, i)) {
      const double spacing = min_inter_event_time(in) - 2.0 * h;
      if (spacing > 0.0 && static_cast<double>(c.triggers) > 1.0 + horizon / spacing) {
        r.triggers_within_upper = false;
      }
    }
    r.coordinates.push_back(c);
  }
  VectorBoundInputs vin{trace.plant.blocks, trace.trigger.sigma, trace.trigger.rho0,
                        trace.trigger.gamma, trace.trigger.b, 1.0, trace.ladder};
  r.access_rate = access_rate_necessary(vin);
  r.rate_necessary = transmission_rate_necessary(vin);
  r.rate_necessary_approx = transmission_rate_necessary_approx(vin);
  r.rate_sufficient = transmission_rate_sufficient(vin);
  r.x0_norm = trace.x0.norm();
  r.xT_norm = trace.final_state.x.norm();
  r.diverged = trace.diverged();
  return r;
}

InvariantReport verify_trace(const SimTrace& trace) {
  InvariantReport rep;
  const std::size_t n = trace.dimension();
  const double h = trace.options.step;
  const auto& cfg = trace.trigger;
  rep.envelope_violations_by_coord.assign(n, 0);
  rep.min_inter_event_margin = std::numeric_limits<double>::infinity();

  std::vector<double> env0(n), slack(n, 0.0), sup(n, 0.0);
  std::vector<bool> checked(n, true);
  for (std::size_t i = 0; i < n; ++i) {
    const double lambda = trace.plant.eigenvalue_of(i);
    env0[i] = cfg.v0_at(i) * ((cfg.rho0 - trace.ladder[i]) + std::exp((lambda + cfg.sigma) * cfg.gamma));
    checked[i] = trace.options.channel_enabled.empty() || trace.options.channel_enabled[i];
  }
  for (const auto& s : trace.samples) {
    for (std::size_t i = 0; i < n; ++i) sup[i] = std::max(sup[i], std::abs(s.z(static_cast<Eigen::Index>(i))));
  }
  for (const auto& ev : trace.events) {
    if (ev.kind == EventKind::Reception) sup[ev.coord] = std::max(sup[ev.coord], std::abs(ev.z_before));
  }
  for (std::size_t i = 0; i < n; ++i) {
    slack[i] = 2.0 * h * (trace.plant.eigenvalue_of(i) + cfg.sigma) * sup[i];
  }

  auto check_envelope = [&](std::size_t i, double t, double z) {
    if (!checked[i]) return;
    const double env = env0[i] * std::exp(-cfg.sigma * t);
    rep.worst_envelope_ratio = std::max(rep.worst_envelope_ratio, std::abs(z) / env);
    if (std::abs(z) > env + slack[i]) {
      if (rep.envelope_violations_by_coord[i]++ == 0) {
        std::ostringstream os;
        os << "envelope: coordinate " << i << " |z|=" << std::abs(z) << " > " << env + slack[i]
           << " at t=" << t;
        rep.messages.push_back(os.str());
      }
      ++rep.envelope_violations;
    }
  };
  for (const auto& s : trace.samples) {
    for (std::size_t i = 0; i < n; ++i) check_envelope(i, s.t, s.z(static_cast<Eigen::Index>(i)));
  }

  std::vector<double> last_trigger(n, std::numeric_limits<double>::quiet_NaN());
  double last_time = -std::numeric_limits<double>::infinity();
  for (const auto& ev : trace.events) {
    const std::size_t i = ev.coord;
    if (ev.time() < last_time) {
      ++rep.ordering_violations;
      rep.messages.push_back("ordering: event at t=" + std::to_string(ev.time()) + " out of order");
    }
    last_time = std::max(last_time, ev.time());
    if (ev.kind == EventKind::Reception) {
      // t_c - t_s is recomputed from two rounded times.
      const double slack = 4 * std::numeric_limits<double>::epsilon() * std::max(1.0, ev.t_c);
      if (ev.delta < -slack || ev.delta > cfg.gamma + slack) {
        if (rep.delay_violations++ == 0) {
          rep.messages.push_back("delay: coordinate " + std::to_string(i) + " delivered after " +
                                 std::to_string(ev.delta) + " s");
        }
      }
      check_envelope(i, ev.t_c, ev.z_before);
      if (ev.q_outside_window) ++rep.q_outside_window;
      if (!coupled(trace.plant, i)) {
        const double bound = trace.ladder[i] * std::exp(-cfg.sigma * cfg.gamma) * ev.v_ts;
        rep.worst_post_jump_ratio = std::max(rep.worst_post_jump_ratio, std::abs(ev.z_after) / bound);
        if (std::abs(ev.z_after) > bound * (1.0 + 1e-9)) {
          if (rep.post_jump_violations++ == 0) {
            std::ostringstream os;
            os << "post-jump: coordinate " << i << " |z|=" << std::abs(ev.z_after) << " > " << bound
               << " at t=" << ev.t_c;
            rep.messages.push_back(os.str());
          }
        }
      }
      continue;
    }
    if (!coupled(trace.plant, i)) {
      if (!std::isnan(last_trigger[i])) {
        const BoundInputs in = coordinate_inputs(trace.plant, cfg, trace.ladder, i);
        const double margin = (ev.t_s - last_trigger[i]) - (min_inter_event_time(in) - 2.0 * h);
        rep.min_inter_event_margin = std::min(rep.min_inter_event_margin, margin);
        if (margin < 0.0) {
          if (rep.inter_event_violations++ == 0) {
            std::ostringstream os;
            os << "inter-event: coordinate " << i << " fired " << ev.t_s - last_trigger[i]
               << " after the previous trigger at t=" << ev.t_s;
            rep.messages.push_back(os.str());
          }
        }
      }
      last_trigger[i] = ev.t_s;
    }
  }
  return rep;
}

}  // namespace etrate
