#include "etrate/bounds.hpp"

#include <climits>
#include <cmath>
#include <limits>
#include <string>

#include "etrate/errors.hpp"
#include "etrate/numeric.hpp"

namespace etrate {
namespace {

using numeric::clamp_nonnegative;
using numeric::kLn2;

// -ln(rho0 e^{-sigma gamma}) = sigma gamma - ln rho0, always > 0.
double neg_ln_jump(const BoundInputs& in) { return in.sigma * in.gamma - std::log(in.rho0); }

// ln(1 + rho e^{-(sigma + a) gamma})
double ln_cell(double a, double sigma, double rho, double gamma) {
  return std::log1p(rho * std::exp(-(sigma + a) * gamma));
}

// ln ln(1 + rho e^{-(sigma + a) gamma}), finite even when the inner term underflows.
double log_ln_cell(double a, double sigma, double rho, double gamma) {
  const double y = std::log(rho) - (sigma + a) * gamma;
  const double u = std::exp(y);
  if (u < 1e-8) return y + std::log1p(u * (u / 3.0 - 0.5));
  return std::log(std::log1p(u));
}

// 1 + log(b gamma (a + sigma) / ln(1 + rho e^{-(sigma + a) gamma})), before clamping.
double sufficient_bits_raw(double a, double sigma, double rho, double gamma, double b) {
  if (gamma == 0.0) return -std::numeric_limits<double>::infinity();
  return 1.0 + (std::log(b * gamma * (a + sigma)) - log_ln_cell(a, sigma, rho, gamma)) / kLn2;
}

}  // namespace

void BoundInputs::validate() const {
  if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("bounds: A must be positive");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("bounds: sigma must be positive");
  if (!(rho0 > 0.0 && rho0 < 1.0)) throw DomainError("bounds: rho0 must lie in (0, 1)");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw DomainError("bounds: gamma must be >= 0");
  if (!(b > 1.0) || !std::isfinite(b)) throw DomainError("bounds: b must be > 1");
  if (!(nu >= 1.0)) throw DomainError("bounds: nu must be >= 1");
}

int VectorBoundInputs::dimension() const {
  int n = 0;
  for (const auto& blk : blocks) n += blk.order;
  return n;
}

double VectorBoundInputs::trace() const {
  double tr = 0.0;
  for (const auto& blk : blocks) tr += blk.order * blk.lambda;
  return tr;
}

BoundInputs VectorBoundInputs::block_inputs(std::size_t j) const {
  return BoundInputs{blocks.at(j).lambda, sigma, rho0, gamma, b, nu};
}

std::vector<double> VectorBoundInputs::resolved_ladder() const {
  if (!rho.empty()) return rho;
  std::vector<double> out;
  for (const auto& blk : blocks) {
    const auto ladder = default_ladder(blk.order, rho0);
    out.insert(out.end(), ladder.begin(), ladder.end());
  }
  return out;
}

void VectorBoundInputs::validate() const {
  if (blocks.empty()) throw DomainError("bounds: at least one Jordan block is required");
  for (std::size_t j = 0; j < blocks.size(); ++j) {
    block_inputs(j).validate();
    if (blocks[j].order < 1) throw DomainError("bounds: block order must be >= 1");
  }
  if (!rho.empty() && rho.size() != static_cast<std::size_t>(dimension())) {
    throw DomainError("bounds: ladder size must equal the plant dimension");
  }
}

double access_rate_necessary(const BoundInputs& in) { return (in.a + in.sigma) / kLn2; }

double access_rate_necessary(const VectorBoundInputs& in) {
  return (in.trace() + in.dimension() * in.sigma) / kLn2;
}

double bits_lower_bound(double horizon, double l, double z0_norm, const BoundInputs& in,
                        BitsKind kind) {
  VectorBoundInputs vin{{JordanBlock{in.a, 1}}, in.sigma, in.rho0, in.gamma, in.b, in.nu, {}};
  return bits_lower_bound(horizon, l, z0_norm, vin, kind);
}

double bits_lower_bound(double horizon, double l, double z0_norm, const VectorBoundInputs& in,
                        BitsKind kind) {
  if (!(horizon >= 0.0)) throw DomainError("bits_lower_bound: horizon must be >= 0");
  const double growth = horizon * access_rate_necessary(in);
  if (kind == BitsKind::Stabilization) return growth;
  if (!(z0_norm > 0.0)) throw DomainError("bits_lower_bound: ||z(0)|| must be positive");
  if (z0_norm > l) throw DomainError("bits_lower_bound: ||z(0)|| must not exceed L");
  return growth + in.dimension() * std::log2(l / z0_norm);
}

double packet_bits_necessary(const BoundInputs& in) {
  if (in.gamma == 0.0) return 0.0;
  // log(e^{A gamma} - 1) - log(rho0) + sigma gamma / ln 2
  const double bits = numeric::log2_expm1(in.a * in.gamma) - std::log2(in.rho0) +
                      in.sigma * in.gamma / kLn2;
  return clamp_nonnegative(bits);
}

double triggering_rate_upper(const BoundInputs& in) { return (in.a + in.sigma) / neg_ln_jump(in); }

double min_inter_event_time(const BoundInputs& in) { return neg_ln_jump(in) / (in.a + in.sigma); }

double triggering_rate_lower(const BoundInputs& in) {
  if (!(in.nu >= 1.0)) throw DomainError("triggering_rate_lower: nu must be >= 1");
  return (in.a + in.sigma) /
         (std::log(in.nu) + std::log(2.0 + std::exp(in.sigma * in.gamma) / in.rho0));
}

double transmission_rate_necessary(const BoundInputs& in) {
  const double bits = packet_bits_necessary(in);
  if (bits == 0.0) return 0.0;
  return triggering_rate_lower(in) * bits;
}

double transmission_rate_necessary(const VectorBoundInputs& in) {
  double total = 0.0;
  for (std::size_t j = 0; j < in.blocks.size(); ++j) {
    total += in.blocks[j].order * transmission_rate_necessary(in.block_inputs(j));
  }
  return total;
}

double transmission_rate_necessary_approx(const BoundInputs& in) {
  if (in.gamma == 0.0) return 0.0;
  const double ratio = numeric::log2_expm1(in.a * in.gamma) / (neg_ln_jump(in) / kLn2);
  return (in.a + in.sigma) / kLn2 * clamp_nonnegative(1.0 + ratio);
}

double transmission_rate_necessary_approx(const VectorBoundInputs& in) {
  double total = 0.0;
  for (std::size_t j = 0; j < in.blocks.size(); ++j) {
    total += in.blocks[j].order * transmission_rate_necessary_approx(in.block_inputs(j));
  }
  return total;
}

double transmission_rate_sufficient(const BoundInputs& in) {
  const double bits = clamp_nonnegative(sufficient_bits_raw(in.a, in.sigma, in.rho0, in.gamma, in.b));
  if (bits == 0.0) return 0.0;
  return triggering_rate_upper(in) * bits;
}

double transmission_rate_sufficient(const VectorBoundInputs& in) {
  const auto ladder = in.resolved_ladder();
  double total = 0.0;
  std::size_t coord = 0;
  for (std::size_t j = 0; j < in.blocks.size(); ++j) {
    const BoundInputs blk = in.block_inputs(j);
    const double rate = triggering_rate_upper(blk);
    for (int i = 0; i < in.blocks[j].order; ++i, ++coord) {
      const double bits =
          clamp_nonnegative(sufficient_bits_raw(blk.a, blk.sigma, ladder[coord], blk.gamma, blk.b));
      if (bits > 0.0) total += rate * bits;
    }
  }
  return total;
}

int packet_size_sufficient(const BoundInputs& in) {
  const double raw = sufficient_bits_raw(in.a, in.sigma, in.rho0, in.gamma, in.b);
  if (!(raw > 1.0)) return 1;
  const double g = std::ceil(raw);
  if (g > static_cast<double>(INT_MAX)) throw DomainError("packet_size_sufficient: packet size overflow");
  return static_cast<int>(g);
}

double time_quantization_tolerance(const BoundInputs& in) {
  return ln_cell(in.a, in.sigma, in.rho0, in.gamma) / (in.a + in.sigma);
}

double critical_delay(const BoundInputs& in) {
  // f(0) = -rho0 < 0 and f(ln2/A) = 1 - rho0 e^{-sigma ln2/A} > 0; f is increasing.
  auto f = [&](double g) {
    return std::expm1(in.a * g) - in.rho0 * std::exp(-in.sigma * g);
  };
  return numeric::bisect(f, 0.0, equilibrium_delay(in.a)).midpoint();
}

double equilibrium_delay(double a) { return kLn2 / a; }

double rate_asymptote(const BoundInputs& in) {
  return (in.a + in.sigma) / kLn2 * (1.0 + in.a / in.sigma);
}

double beta(const BoundInputs& in) {
  return std::log1p(2.0 * in.rho0 * std::exp(-in.sigma * in.gamma)) / in.a;
}

Assumption1Window assumption1_window(const BoundInputs& in, int g) {
  if (!(in.nu >= 2.0)) throw DomainError("assumption1_window: requires nu >= 2");
  if (g < 2) throw DomainError("assumption1_window: requires g >= 2");
  if (!(in.gamma > 0.0)) throw DomainError("assumption1_window: requires gamma > 0");

  Assumption1Window w;
  const double rate = in.a + in.sigma;
  w.lower_bound = clamp_nonnegative(sufficient_bits_raw(in.a, in.sigma, in.rho0, in.gamma, in.b));
  const double jump = in.rho0 * std::exp(-in.sigma * in.gamma);
  const double inner = 1.0 / ((in.nu - 1.0) * (2.0 + 1.0 / jump));
  w.upper_bound = std::log2(in.b * in.gamma * rate / std::abs(std::log1p(-inner)));
  w.lower_ok = g >= w.lower_bound;
  w.upper_ok = g <= w.upper_bound;

  const double delta = in.b * in.gamma / std::ldexp(1.0, g - 2);
  const double ratio = std::expm1(-rate * delta / 2.0) / std::expm1(-rate * delta / 4.0);
  w.expansion_ok = ratio >= std::exp(rate * 3.0 * delta / 4.0);
  return w;
}

std::vector<int> assumption1_witnesses(const BoundInputs& in, int g_min, int g_max) {
  std::vector<int> out;
  for (int g = g_min; g <= g_max; ++g) {
    if (assumption1_window(in, g).all()) out.push_back(g);
  }
  return out;
}

CascadeBounds v0_cascade_bound(const JordanBlock& block, double sigma, double rho0, double gamma,
                               std::span<const double> ladder, std::span<const double> v0) {
  const auto p = static_cast<std::size_t>(block.order);
  if (ladder.size() != p) throw DomainError("v0_cascade_bound: ladder size must equal block order");
  if (v0.size() != p) throw DomainError("v0_cascade_bound: v0 size must equal block order");

  const double rate = block.lambda + sigma;
  const double growth = std::exp(rate * gamma);
  const double growth_m1 = std::expm1(rate * gamma);

  CascadeBounds out;
  out.envelope.reserve(p);
  for (std::size_t i = 0; i < p; ++i) out.envelope.push_back((rho0 - ladder[i]) + growth);

  for (std::size_t i = 1; i < p; ++i) {
    const double slack = rho0 - ladder[i - 1];
    if (!(slack > 0.0)) {
      throw DomainError("v0_cascade_bound: ladder value of coordinate " + std::to_string(i - 1) +
                        " must be below rho0");
    }
    if (growth_m1 == 0.0) {
      out.max_v0.push_back(std::numeric_limits<double>::infinity());
      continue;
    }
    out.max_v0.push_back(v0[i - 1] * rate * slack / (out.envelope[i] * growth_m1));
  }
  return out;
}

}  // namespace etrate
