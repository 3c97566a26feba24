#include "etrate/codec.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "etrate/errors.hpp"

namespace etrate {
namespace {

int parity_of(std::int64_t w) { return static_cast<int>(((w % 2) + 2) % 2); }

std::uint64_t cell_count(int g) { return std::uint64_t{1} << (g - 2); }

double cell_start(double window_start, std::uint64_t idx, double delta) {
  return window_start + static_cast<double>(idx) * delta;
}

}  // namespace

std::string Packet::hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  for (std::size_t byte = 0; byte * 8 < bits.size(); ++byte) {
    unsigned value = 0;
    for (std::size_t i = 0; i < 8; ++i) {
      const std::size_t pos = byte * 8 + i;
      value = (value << 1) | (pos < bits.size() ? bits[pos] : 0u);
    }
    out.push_back(kDigits[value >> 4]);
    out.push_back(kDigits[value & 0xf]);
  }
  return out;
}

std::int64_t window_index(double t, double window) {
  auto w = static_cast<std::int64_t>(std::floor(t / window));
  while (static_cast<double>(w) * window > t) --w;
  while (static_cast<double>(w + 1) * window <= t) ++w;
  return w;
}

Packet encode(double t_s, int sign, int g, double b, double gamma, std::size_t coord) {
  if (g < 1 || g > kMaxPacketBits) {
    throw PreconditionError("encode: packet size must lie in [1, " +
                            std::to_string(kMaxPacketBits) + "], got " + std::to_string(g));
  }
  if (sign != 1 && sign != -1) throw PreconditionError("encode: sign must be +1 or -1");
  if (!(t_s >= 0.0) || !std::isfinite(t_s)) throw PreconditionError("encode: t_s must be >= 0");
  if (!(b > 1.0)) throw PreconditionError("encode: b must be > 1");
  if (!(gamma >= 0.0)) throw PreconditionError("encode: gamma must be >= 0");
  if (gamma == 0.0 && g != 1) {
    throw PreconditionError("encode: zero delay bound admits only the 1-bit sign packet");
  }

  Packet packet;
  packet.coord = coord;
  packet.t_s = t_s;
  packet.bits.assign(static_cast<std::size_t>(g), 0);
  packet.bits[0] = sign < 0 ? 1 : 0;
  if (g == 1) return packet;

  const double window = b * gamma;
  const std::int64_t w = window_index(t_s, window);
  packet.bits[1] = static_cast<std::uint8_t>(parity_of(w));
  if (g == 2) return packet;

  const std::uint64_t cells = cell_count(g);
  const double delta = window / static_cast<double>(cells);
  const double start = static_cast<double>(w) * window;
  const double scaled = std::floor((t_s - start) / delta);
  std::uint64_t idx = scaled <= 0.0 ? 0 : std::min(static_cast<std::uint64_t>(scaled), cells - 1);
  while (idx > 0 && cell_start(start, idx, delta) > t_s) --idx;
  while (idx + 1 < cells && cell_start(start, idx + 1, delta) <= t_s) ++idx;

  for (int i = 0; i < g - 2; ++i) {
    packet.bits[static_cast<std::size_t>(g - 1 - i)] = static_cast<std::uint8_t>((idx >> i) & 1u);
  }
  return packet;
}

Decoded decode(const Packet& packet, double t_c, double b, double gamma) {
  const int g = packet.g();
  if (g < 1 || g > kMaxPacketBits) throw DecodeError("decode: unsupported packet size");
  for (auto bit : packet.bits) {
    if (bit > 1) throw DecodeError("decode: bit values must be 0 or 1");
  }

  Decoded out;
  out.sign = packet.bits[0] != 0 ? -1 : 1;
  if (g == 1) {
    const double earliest = std::max(0.0, t_c - gamma);
    out.q = earliest + 0.5 * (t_c - earliest);
    return out;
  }
  if (!(gamma > 0.0)) throw DecodeError("decode: multi-bit packet requires gamma > 0");

  const double window = b * gamma;
  const std::int64_t w_late = window_index(t_c, window);
  const std::int64_t w_early = window_index(t_c - gamma, window);
  const int parity = packet.bits[1];
  std::int64_t w = 0;
  if (parity_of(w_late) == parity) {
    w = w_late;
  } else if (parity_of(w_early) == parity) {
    w = w_early;
  } else {
    throw DecodeError("decode: parity bit matches neither candidate window");
  }

  const std::uint64_t cells = cell_count(g);
  const double delta = window / static_cast<double>(cells);
  std::uint64_t idx = 0;
  for (int i = 2; i < g; ++i) idx = (idx << 1) | packet.bits[static_cast<std::size_t>(i)];

  out.q = cell_start(static_cast<double>(w) * window, idx, delta) + 0.5 * delta;
  out.outside_window = out.q < t_c - gamma || out.q > t_c;
  return out;
}

double reconstruct_error(int sign, double q, double t_c, double v0, double sigma, double lambda) {
  return sign * v0 * std::exp(-sigma * q) * std::exp(lambda * (t_c - q));
}

}  // namespace etrate
