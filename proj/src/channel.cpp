#include "etrate/channel.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "etrate/errors.hpp"

namespace etrate {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Uniform double in [0, 1) from (seed, k). seed_seq and mt19937_64 are fully
// specified by the standard, so the sequence is identical across platforms.
double unit_draw(std::uint64_t seed, std::size_t k) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(std::uint64_t{k} >> 32)};
  std::mt19937_64 engine(seq);
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

}  // namespace

DelayModel::DelayModel(DelayVariant variant, double gamma) : variant_(std::move(variant)), gamma_(gamma) {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw ConfigError("delay: gamma must be >= 0");
  std::visit(Overloaded{
                 [&](const ConstantDelay& c) {
                   if (!(c.value >= 0.0 && c.value <= gamma_)) {
                     std::ostringstream os;
                     os << "delay: constant " << c.value << " outside [0, gamma=" << gamma_ << "]";
                     throw ConfigError(os.str());
                   }
                 },
                 [](const UniformDelay&) {},
                 [&](const AdversarialDelay& adv) {
                   if (!(adv.a > 0.0) || !(adv.sigma > 0.0) || !(adv.rho0 > 0.0 && adv.rho0 < 1.0)) {
                     throw ConfigError("delay: adversarial model needs a > 0, sigma > 0, rho0 in (0,1)");
                   }
                   const double b = std::log1p(2.0 * adv.rho0 * std::exp(-adv.sigma * gamma_)) / adv.a;
                   adversarial_ = b;
                   if (b > gamma_) {
                     adversarial_ = gamma_;
                     std::ostringstream os;
                     os << "adversarial delay beta=" << b << " exceeds gamma=" << gamma_
                        << "; clamped to gamma";
                     warning_ = os.str();
                   }
                 },
                 [&](const ReplayDelay& r) {
                   for (std::size_t i = 0; i < r.sequence.size(); ++i) {
                     if (!(r.sequence[i] >= 0.0 && r.sequence[i] <= gamma_)) {
                       throw ConfigError("delay: replay entry " + std::to_string(i) +
                                         " outside [0, gamma]");
                     }
                   }
                 },
             },
             variant_);
}

std::string DelayModel::describe() const {
  std::ostringstream os;
  std::visit(Overloaded{
                 [&](const ConstantDelay& c) { os << "constant:" << c.value; },
                 [&](const UniformDelay& u) { os << "uniform:" << u.seed; },
                 [&](const AdversarialDelay&) { os << "adversarial:" << adversarial_; },
                 [&](const ReplayDelay& r) { os << "replay:" << r.sequence.size(); },
             },
             variant_);
  return os.str();
}

double sample_delay(const DelayModel& model, std::size_t k) {
  return std::visit(Overloaded{
                        [](const ConstantDelay& c) { return c.value; },
                        [&](const UniformDelay& u) { return unit_draw(u.seed, k) * model.gamma_; },
                        [&](const AdversarialDelay&) { return model.adversarial_; },
                        [&](const ReplayDelay& r) {
                          if (k >= r.sequence.size()) {
                            throw ConfigError("delay: replay sequence exhausted at packet " +
                                              std::to_string(k));
                          }
                          return r.sequence[k];
                        },
                    },
                    model.variant_);
}

void InFlight::send(std::size_t coord, ScheduledPacket scheduled) {
  if (!admit(coord)) {
    throw PreconditionError("channel: coordinate " + std::to_string(coord) + " already has a packet in flight");
  }
  slots_.at(coord) = std::move(scheduled);
}

std::optional<std::size_t> InFlight::next_delivery() const {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < slots_.size(); ++i) {
    if (!slots_[i]) continue;
    if (!best || slots_[i]->t_c < slots_[*best]->t_c) best = i;
  }
  return best;
}

double InFlight::delivery_time(std::size_t coord) const {
  if (!slots_.at(coord)) throw PreconditionError("channel: no packet in flight");
  return slots_[coord]->t_c;
}

ScheduledPacket InFlight::take(std::size_t coord) {
  if (!slots_.at(coord)) throw PreconditionError("channel: no packet in flight");
  ScheduledPacket out = std::move(*slots_[coord]);
  slots_[coord].reset();
  return out;
}

bool admit(const InFlight& in_flight, std::size_t coord) { return in_flight.admit(coord); }

namespace {

double parse_number(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || !std::isfinite(value)) {
    throw ConfigError("delay: invalid " + what + " '" + text + "'");
  }
  return value;
}

}  // namespace

DelaySpec DelaySpec::parse(const std::string& text) {
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  const std::string tail = colon == std::string::npos ? std::string() : text.substr(colon + 1);
  DelaySpec spec;
  if (head == "constant") {
    spec.kind = Kind::Constant;
    spec.value = parse_number(tail, "constant delay");
  } else if (head == "uniform") {
    spec.kind = Kind::Uniform;
    if (!tail.empty()) {
      std::size_t used = 0;
      try {
        spec.seed = std::stoull(tail, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != tail.size()) throw ConfigError("delay: invalid seed '" + tail + "'");
    }
  } else if (head == "adversarial") {
    if (!tail.empty()) throw ConfigError("delay: adversarial takes no argument");
    spec.kind = Kind::Adversarial;
  } else if (head == "replay") {
    spec.kind = Kind::Replay;
    std::size_t start = 0;
    while (start <= tail.size()) {
      const auto comma = tail.find(',', start);
      const auto end = comma == std::string::npos ? tail.size() : comma;
      spec.sequence.push_back(parse_number(tail.substr(start, end - start), "replay entry"));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  } else {
    throw ConfigError("delay: unknown model '" + head +
                      "' (expected constant, uniform, adversarial or replay)");
  }
  return spec;
}

std::string DelaySpec::str() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Constant: os << "constant:" << value; break;
    case Kind::Uniform: os << "uniform:" << seed; break;
    case Kind::Adversarial: os << "adversarial"; break;
    case Kind::Replay: os << "replay:" << sequence.size(); break;
  }
  return os.str();
}

DelayModel make_delay_model(const DelaySpec& spec, double gamma, std::size_t coord, double a,
                            double sigma, double rho0) {
  switch (spec.kind) {
    case DelaySpec::Kind::Constant: return DelayModel(ConstantDelay{spec.value}, gamma);
    case DelaySpec::Kind::Uniform: return DelayModel(UniformDelay{spec.seed + coord}, gamma);
    case DelaySpec::Kind::Adversarial: return DelayModel(AdversarialDelay{a, sigma, rho0}, gamma);
    case DelaySpec::Kind::Replay: return DelayModel(ReplayDelay{spec.sequence}, gamma);
  }
  throw ConfigError("delay: unknown model");
}

}  // namespace etrate
