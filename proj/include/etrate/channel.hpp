#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "etrate/codec.hpp"

namespace etrate {

struct ConstantDelay {
  double value = 0.0;
};

/// Uniform on [0, gamma]; the k-th draw depends only on (seed, k).
struct UniformDelay {
  std::uint64_t seed = 0;
};

/// Delay beta = (1/a) ln(1 + 2 rho0 e^{-sigma gamma}), clamped to gamma.
struct AdversarialDelay {
  double a = 1.0;
  double sigma = 1.0;
  double rho0 = 0.5;
};

struct ReplayDelay {
  std::vector<double> sequence;
};

using DelayVariant = std::variant<ConstantDelay, UniformDelay, AdversarialDelay, ReplayDelay>;

class DelayModel {
 public:
  /// Validates the variant against `gamma` (ConfigError when a constant or
  /// replayed delay lies outside [0, gamma]).
  DelayModel(DelayVariant variant, double gamma);

  [[nodiscard]] double gamma() const { return gamma_; }
  [[nodiscard]] const DelayVariant& variant() const { return variant_; }
  /// Set when the adversarial delay had to be clamped to gamma.
  [[nodiscard]] const std::optional<std::string>& warning() const { return warning_; }
  [[nodiscard]] std::string describe() const;

 private:
  DelayVariant variant_;
  double gamma_;
  double adversarial_ = 0.0;
  std::optional<std::string> warning_;

  friend double sample_delay(const DelayModel& model, std::size_t k);
};

/// Delay of the k-th packet (0-based), always in [0, gamma]. Throws
/// ConfigError when a replay sequence is exhausted.
double sample_delay(const DelayModel& model, std::size_t k);

struct ScheduledPacket {
  Packet packet;
  double t_c = 0.0;
};

/// Per-coordinate channels, each holding at most one packet in flight.
class InFlight {
 public:
  explicit InFlight(std::size_t channels = 1) : slots_(channels) {}

  [[nodiscard]] std::size_t channels() const { return slots_.size(); }
  /// True iff the coordinate's channel is idle.
  [[nodiscard]] bool admit(std::size_t coord) const { return !slots_.at(coord).has_value(); }
  /// Requires admit(coord).
  void send(std::size_t coord, ScheduledPacket scheduled);
  /// Coordinate with the earliest delivery time (ties: lowest coordinate).
  [[nodiscard]] std::optional<std::size_t> next_delivery() const;
  [[nodiscard]] double delivery_time(std::size_t coord) const;
  /// Removes and returns the packet in flight on `coord`.
  ScheduledPacket take(std::size_t coord);

 private:
  std::vector<std::optional<ScheduledPacket>> slots_;
};

bool admit(const InFlight& in_flight, std::size_t coord);

/// Delay description independent of gamma, turned into a DelayModel per run
/// (sweeps rebuild it for every grid value).
struct DelaySpec {
  enum class Kind { Constant, Uniform, Adversarial, Replay };
  Kind kind = Kind::Uniform;
  double value = 0.0;               ///< Constant
  std::uint64_t seed = 0;           ///< Uniform; coordinate i uses seed + i
  std::vector<double> sequence;     ///< Replay

  /// Parses "constant:<d>", "uniform[:<seed>]", "adversarial", "replay:<d>,<d>,...".
  static DelaySpec parse(const std::string& text);
  [[nodiscard]] std::string str() const;
};

/// `a`, `sigma`, `rho0` feed the adversarial delay (block eigenvalue for a).
DelayModel make_delay_model(const DelaySpec& spec, double gamma, std::size_t coord, double a,
                            double sigma, double rho0);

}  // namespace etrate
