#pragma once

// Plant, triggering configuration and exact closed-loop propagation between
// communication events.
//
// The closed loop with u = -K x_hat is linear in (x, x_hat). It is propagated
// in the equivalent coordinates (z, x_hat) with z = x - x_hat, where the two
// parts decouple:
//
//   z'     = A z              (A is in Jordan form: closed-form exponential)
//   x_hat' = (A - B K) x_hat  (Pade scaling-and-squaring exponential)
//
// so the estimation error advances exactly as e^{Ah} z between events.

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace etrate {

struct ScalarPlant {
  double a = 1.0;  ///< growth rate, 1/s
  double b = 1.0;  ///< input gain
  double k = 0.0;  ///< feedback gain, u = -k x_hat
  double l = 1.0;  ///< bound on |x(0)|

  void validate() const;
};

struct JordanBlock {
  double lambda = 1.0;  ///< real eigenvalue, 1/s
  int order = 1;
};

/// Vector plant with A = diag[J_1, ..., J_q] (upper Jordan blocks).
struct JordanPlant {
  std::vector<JordanBlock> blocks;
  Eigen::MatrixXd b;  ///< n x m input map
  Eigen::MatrixXd k;  ///< m x n feedback gain, u = -K x_hat
  double l = 1.0;     ///< bound on ||x(0)||

  [[nodiscard]] int dimension() const;
  [[nodiscard]] double trace() const;
  [[nodiscard]] Eigen::MatrixXd system_matrix() const;
  /// Eigenvalue of the block owning coordinate `coord`.
  [[nodiscard]] double eigenvalue_of(std::size_t coord) const;
  /// Index of the block owning `coord` and the coordinate's position (0-based)
  /// inside that block.
  [[nodiscard]] std::pair<std::size_t, int> locate(std::size_t coord) const;

  void validate() const;

  static JordanPlant from_scalar(const ScalarPlant& plant);
};

/// Default ladder rho_i = rho0 * i / p for a block of order p.
std::vector<double> default_ladder(int order, double rho0);

/// Triggering design: v_i(t) = v0_i e^{-sigma t}, jump fraction rho0, delay
/// bound gamma, time-window factor b, and per-coordinate ladder values rho_i.
struct TriggerConfig {
  std::vector<double> v0;   ///< per coordinate; a single entry applies to all
  double sigma = 1.0;
  double rho0 = 0.5;
  double gamma = 0.0;
  double b = 1.0001;
  std::vector<double> rho;  ///< per coordinate; empty selects default_ladder

  static TriggerConfig scalar(double v0, double sigma, double rho0, double gamma, double b);

  [[nodiscard]] double v0_at(std::size_t coord) const;
  /// Ladder value for every coordinate of `plant`, defaults filled in.
  [[nodiscard]] std::vector<double> resolved_ladder(const JordanPlant& plant) const;

  /// Parameter ranges only.
  void validate() const;
  /// Parameter ranges plus dimensions and ladder shape against `plant`.
  void validate(const JordanPlant& plant) const;
};

struct SimState {
  double t = 0.0;
  Eigen::VectorXd x;
  Eigen::VectorXd xhat;

  [[nodiscard]] Eigen::VectorXd error() const { return x - xhat; }
  [[nodiscard]] Eigen::VectorXd input(const JordanPlant& plant) const { return -plant.k * xhat; }
};

double trigger_value(const TriggerConfig& cfg, std::size_t coord, double t);

enum class Integrator { Exact, Euler };

/// Transition matrices for one step of length h.
struct Transition {
  double h = 0.0;
  Eigen::MatrixXd error;     ///< z(t+h) = error * z(t)
  Eigen::MatrixXd estimate;  ///< x_hat(t+h) = estimate * x_hat(t)
};

class Propagator {
 public:
  explicit Propagator(const JordanPlant& plant, Integrator integrator = Integrator::Exact);

  [[nodiscard]] Transition transition(double h) const;
  /// Error-only transition (cheap; used for crossing searches).
  [[nodiscard]] Eigen::MatrixXd error_transition(double h) const;

  /// Throws DivergenceError when the result is not finite.
  [[nodiscard]] SimState apply(const Transition& step, const SimState& state) const;
  [[nodiscard]] SimState advance(const SimState& state, double h) const;

  [[nodiscard]] Integrator integrator() const { return integrator_; }

 private:
  std::vector<JordanBlock> blocks_;
  Eigen::MatrixXd a_;
  Eigen::MatrixXd closed_loop_;  // A - B K
  Integrator integrator_;
};

/// e^{lambda h} times the upper-triangular Toeplitz matrix of h^k / k!.
Eigen::MatrixXd jordan_block_exponential(double lambda, int order, double h);

SimState propagate(const SimState& state, const JordanPlant& plant, double h,
                   Integrator integrator = Integrator::Exact);
SimState propagate(const SimState& state, const ScalarPlant& plant, double h);

/// Jump strategy x_hat(t_c+) = x_hat(t_c) + z_bar on one coordinate.
SimState apply_jump(const SimState& state, std::size_t coord, double z_bar);

}  // namespace etrate
