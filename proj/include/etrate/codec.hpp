#pragma once

// Time-quantization codec.
//
// A packet of g bits carries the sign of z(t_s) and a quantized send time:
//
//   bit 0        sign (0: z >= 0, 1: z < 0)
//   bit 1        parity of floor(t_s / (b gamma))         (g >= 2)
//   bits 2..g-1  index of the cell of width delta = b gamma / 2^{g-2}
//                containing t_s inside its window, MSB first (g >= 3)
//
// The decoder knows t_c and that t_s lies in [t_c - gamma, t_c]. Because the
// windows are longer than gamma, that interval touches at most two windows
// and the parity bit selects one. q(t_s) is the midpoint of the decoded cell,
// so |t_s - q| <= b gamma / 2^{g-1}.
//
// A single-bit packet (sign only) is decoded with q at the midpoint of the
// feasible send interval [max(0, t_c - gamma), t_c]; for gamma = 0 that is t_c.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace etrate {

/// Largest supported packet size.
inline constexpr int kMaxPacketBits = 62;

struct Packet {
  std::size_t coord = 0;
  std::vector<std::uint8_t> bits;  ///< one bit per entry, values 0 or 1
  double t_s = 0.0;                ///< sender-side send time; never read by decode

  [[nodiscard]] int g() const { return static_cast<int>(bits.size()); }
  /// Bits packed MSB-first into bytes (zero padded), lowercase hex.
  [[nodiscard]] std::string hex() const;
};

struct Decoded {
  int sign = 1;
  double q = 0.0;
  /// q fell outside [t_c - gamma, t_c]. Informational; q is never clamped.
  bool outside_window = false;
};

/// Window index w with w * window <= t < (w + 1) * window, robust to rounding.
std::int64_t window_index(double t, double window);

Packet encode(double t_s, int sign, int g, double b, double gamma, std::size_t coord = 0);

Decoded decode(const Packet& packet, double t_c, double b, double gamma);

/// z_bar(t_c) = sign * v0 e^{-sigma q} e^{lambda (t_c - q)}.
double reconstruct_error(int sign, double q, double t_c, double v0, double sigma, double lambda);

}  // namespace etrate
