#include "etrate/model.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "etrate/errors.hpp"

namespace etrate {
namespace {

bool finite(double v) { return std::isfinite(v); }

[[noreturn]] void domain(const std::string& what) { throw DomainError(what); }

}  // namespace

void ScalarPlant::validate() const {
  if (!(a > 0.0) || !finite(a)) domain("plant: A must be a positive finite number");
  if (!finite(b) || !finite(k)) domain("plant: B and K must be finite");
  if (!(l > 0.0) || !finite(l)) domain("plant: L must be positive");
}

int JordanPlant::dimension() const {
  int n = 0;
  for (const auto& blk : blocks) n += blk.order;
  return n;
}

double JordanPlant::trace() const {
  double tr = 0.0;
  for (const auto& blk : blocks) tr += blk.order * blk.lambda;
  return tr;
}

Eigen::MatrixXd JordanPlant::system_matrix() const {
  const int n = dimension();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  int offset = 0;
  for (const auto& blk : blocks) {
    for (int i = 0; i < blk.order; ++i) {
      a(offset + i, offset + i) = blk.lambda;
      if (i + 1 < blk.order) a(offset + i, offset + i + 1) = 1.0;
    }
    offset += blk.order;
  }
  return a;
}

std::pair<std::size_t, int> JordanPlant::locate(std::size_t coord) const {
  std::size_t offset = 0;
  for (std::size_t j = 0; j < blocks.size(); ++j) {
    const auto order = static_cast<std::size_t>(blocks[j].order);
    if (coord < offset + order) return {j, static_cast<int>(coord - offset)};
    offset += order;
  }
  throw DomainError("plant: coordinate " + std::to_string(coord) + " out of range");
}

double JordanPlant::eigenvalue_of(std::size_t coord) const {
  return blocks[locate(coord).first].lambda;
}

void JordanPlant::validate() const {
  if (blocks.empty()) domain("plant: at least one Jordan block is required");
  for (std::size_t j = 0; j < blocks.size(); ++j) {
    if (!(blocks[j].lambda > 0.0) || !finite(blocks[j].lambda)) {
      domain("plant: eigenvalue of block " + std::to_string(j) + " must be positive");
    }
    if (blocks[j].order < 1) {
      domain("plant: order of block " + std::to_string(j) + " must be >= 1");
    }
  }
  const int n = dimension();
  if (b.rows() != n) domain("plant: B must have " + std::to_string(n) + " rows");
  if (k.cols() != n) domain("plant: K must have " + std::to_string(n) + " columns");
  if (k.rows() != b.cols()) domain("plant: K rows must equal B columns");
  if (!b.allFinite() || !k.allFinite()) domain("plant: B and K must be finite");
  if (!(l > 0.0) || !finite(l)) domain("plant: L must be positive");
}

JordanPlant JordanPlant::from_scalar(const ScalarPlant& plant) {
  plant.validate();
  JordanPlant out;
  out.blocks = {JordanBlock{plant.a, 1}};
  out.b = Eigen::MatrixXd::Constant(1, 1, plant.b);
  out.k = Eigen::MatrixXd::Constant(1, 1, plant.k);
  out.l = plant.l;
  return out;
}

std::vector<double> default_ladder(int order, double rho0) {
  std::vector<double> ladder(static_cast<std::size_t>(order));
  for (int i = 1; i <= order; ++i) ladder[static_cast<std::size_t>(i - 1)] = rho0 * i / order;
  ladder.back() = rho0;
  return ladder;
}

TriggerConfig TriggerConfig::scalar(double v0, double sigma, double rho0, double gamma, double b) {
  TriggerConfig cfg;
  cfg.v0 = {v0};
  cfg.sigma = sigma;
  cfg.rho0 = rho0;
  cfg.gamma = gamma;
  cfg.b = b;
  return cfg;
}

double TriggerConfig::v0_at(std::size_t coord) const {
  if (v0.empty()) throw DomainError("trigger: v0 is empty");
  return v0.size() == 1 ? v0.front() : v0.at(coord);
}

std::vector<double> TriggerConfig::resolved_ladder(const JordanPlant& plant) const {
  if (!rho.empty()) return rho;
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(plant.dimension()));
  for (const auto& blk : plant.blocks) {
    const auto ladder = default_ladder(blk.order, rho0);
    out.insert(out.end(), ladder.begin(), ladder.end());
  }
  return out;
}

void TriggerConfig::validate() const {
  if (!(sigma > 0.0) || !finite(sigma)) domain("trigger: sigma must be positive");
  if (!(rho0 > 0.0 && rho0 < 1.0)) domain("trigger: rho0 must lie in (0, 1)");
  if (!(gamma >= 0.0) || !finite(gamma)) domain("trigger: gamma must be >= 0");
  if (!(b > 1.0) || !finite(b)) domain("trigger: b must be > 1");
  if (v0.empty()) domain("trigger: v0 is required");
  for (double v : v0) {
    if (!(v > 0.0) || !finite(v)) domain("trigger: every v0 must be positive");
  }
}

void TriggerConfig::validate(const JordanPlant& plant) const {
  validate();
  const auto n = static_cast<std::size_t>(plant.dimension());
  if (v0.size() != 1 && v0.size() != n) {
    domain("trigger: v0 needs 1 or " + std::to_string(n) + " entries, got " +
           std::to_string(v0.size()));
  }
  if (rho.empty()) return;
  if (rho.size() != n) {
    domain("trigger: rho ladder needs " + std::to_string(n) + " entries, got " +
           std::to_string(rho.size()));
  }
  std::size_t offset = 0;
  for (std::size_t j = 0; j < plant.blocks.size(); ++j) {
    const auto order = static_cast<std::size_t>(plant.blocks[j].order);
    for (std::size_t i = 0; i < order; ++i) {
      const double r = rho[offset + i];
      if (!(r > 0.0)) domain("trigger: ladder values must be positive");
      if (i > 0 && !(r > rho[offset + i - 1])) {
        domain("trigger: ladder of block " + std::to_string(j) + " must be strictly increasing");
      }
    }
    if (rho[offset + order - 1] != rho0) {
      domain("trigger: ladder of block " + std::to_string(j) + " must end at rho0");
    }
    offset += order;
  }
}

double trigger_value(const TriggerConfig& cfg, std::size_t coord, double t) {
  return cfg.v0_at(coord) * std::exp(-cfg.sigma * t);
}

Eigen::MatrixXd jordan_block_exponential(double lambda, int order, double h) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(order, order);
  const double growth = std::exp(lambda * h);
  double term = 1.0;  // h^k / k!
  for (int k = 0; k < order; ++k) {
    for (int i = 0; i + k < order; ++i) m(i, i + k) = growth * term;
    term *= h / (k + 1);
  }
  return m;
}

Propagator::Propagator(const JordanPlant& plant, Integrator integrator)
    : blocks_(plant.blocks),
      a_(plant.system_matrix()),
      closed_loop_(a_ - plant.b * plant.k),
      integrator_(integrator) {}

Eigen::MatrixXd Propagator::error_transition(double h) const {
  const auto n = a_.rows();
  if (integrator_ == Integrator::Euler) {
    return Eigen::MatrixXd::Identity(n, n) + h * a_;
  }
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  Eigen::Index offset = 0;
  for (const auto& blk : blocks_) {
    m.block(offset, offset, blk.order, blk.order) =
        jordan_block_exponential(blk.lambda, blk.order, h);
    offset += blk.order;
  }
  return m;
}

Transition Propagator::transition(double h) const {
  Transition step;
  step.h = h;
  step.error = error_transition(h);
  if (integrator_ == Integrator::Euler) {
    const auto n = closed_loop_.rows();
    step.estimate = Eigen::MatrixXd::Identity(n, n) + h * closed_loop_;
  } else {
    step.estimate = (closed_loop_ * h).exp();
  }
  return step;
}

SimState Propagator::apply(const Transition& step, const SimState& state) const {
  SimState next;
  next.t = state.t + step.h;
  const Eigen::VectorXd z = step.error * state.error();
  next.xhat = step.estimate * state.xhat;
  next.x = next.xhat + z;
  if (!next.x.allFinite() || !next.xhat.allFinite()) {
    std::ostringstream os;
    os << "propagate: non-finite state at t=" << next.t;
    throw DivergenceError(os.str());
  }
  return next;
}

SimState Propagator::advance(const SimState& state, double h) const {
  return apply(transition(h), state);
}

SimState propagate(const SimState& state, const JordanPlant& plant, double h,
                   Integrator integrator) {
  if (!(h > 0.0)) throw PreconditionError("propagate: step must be positive");
  if (state.x.size() != plant.dimension() || state.xhat.size() != plant.dimension()) {
    throw PreconditionError("propagate: state dimension does not match plant");
  }
  return Propagator(plant, integrator).advance(state, h);
}

SimState propagate(const SimState& state, const ScalarPlant& plant, double h) {
  return propagate(state, JordanPlant::from_scalar(plant), h);
}

SimState apply_jump(const SimState& state, std::size_t coord, double z_bar) {
  SimState next = state;
  next.xhat(static_cast<Eigen::Index>(coord)) += z_bar;
  return next;
}

}  // namespace etrate
