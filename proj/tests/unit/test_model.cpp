#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "etrate/errors.hpp"
#include "etrate/model.hpp"

using namespace etrate;
using Catch::Approx;

namespace {

// Classic RK4 on the closed loop [x; xhat]' = [[A, -BK], [0, A - BK]] [x; xhat].
SimState rk4(const JordanPlant& plant, const SimState& s, double h, int steps) {
  const Eigen::MatrixXd a = plant.system_matrix();
  const Eigen::MatrixXd bk = plant.b * plant.k;
  const auto n = a.rows();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  m.topLeftCorner(n, n) = a;
  m.topRightCorner(n, n) = -bk;
  m.bottomRightCorner(n, n) = a - bk;
  Eigen::VectorXd y(2 * n);
  y << s.x, s.xhat;
  const double dt = h / steps;
  for (int i = 0; i < steps; ++i) {
    const Eigen::VectorXd k1 = m * y;
    const Eigen::VectorXd k2 = m * (y + 0.5 * dt * k1);
    const Eigen::VectorXd k3 = m * (y + 0.5 * dt * k2);
    const Eigen::VectorXd k4 = m * (y + dt * k3);
    y += dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return SimState{s.t + h, y.head(n), y.tail(n)};
}

JordanPlant mixed_plant() {
  JordanPlant p;
  p.blocks = {JordanBlock{0.7, 3}, JordanBlock{1.3, 1}};
  p.b = Eigen::MatrixXd(4, 2);
  p.b << 1, 0, 0, 0.5, 0.2, 1, 0, 1;
  p.k = Eigen::MatrixXd(2, 4);
  p.k << 2, 0.3, 0.1, 0, 0.5, 1.5, 0.2, 3;
  p.l = 2.0;
  return p;
}

}  // namespace

TEST_CASE("pure exponential growth doubles over ln 2", "[model]") {
  const ScalarPlant plant{1.0, 0.0, 0.0, 1.0};
  Eigen::VectorXd x(1), xh(1);
  x << 1.0;
  xh << 0.0;
  const SimState out = propagate(SimState{0.0, x, xh}, plant, std::log(2.0));
  CHECK(out.x(0) == Approx(2.0).epsilon(1e-14));
  CHECK(out.xhat(0) == 0.0);
  CHECK(out.error()(0) == Approx(2.0).epsilon(1e-14));
}

TEST_CASE("zero estimation error stays zero", "[model]") {
  const ScalarPlant plant{1.0, 0.2, 8.0, 1.0};
  Eigen::VectorXd x(1);
  x << 0.3;
  for (double h : {1e-4, 0.1, 1.0, 5.0}) {
    const SimState out = propagate(SimState{0.0, x, x}, plant, h);
    CHECK(out.error()(0) == 0.0);
  }
}

TEST_CASE("Jordan block coupling feeds the upper coordinate", "[model]") {
  const Eigen::MatrixXd e = jordan_block_exponential(1.0, 2, 1.0);
  Eigen::Vector2d z(0.0, 1.0);
  const Eigen::VectorXd out = e * z;
  CHECK(out(0) == Approx(std::exp(1.0)).epsilon(1e-15));
  CHECK(out(1) == Approx(std::exp(1.0)).epsilon(1e-15));

  const Eigen::MatrixXd e3 = jordan_block_exponential(-0.4, 3, 2.0);
  const double s = std::exp(-0.8);
  CHECK(e3(0, 0) == Approx(s).epsilon(1e-15));
  CHECK(e3(0, 1) == Approx(s * 2.0).epsilon(1e-15));
  CHECK(e3(1, 2) == Approx(s * 2.0).epsilon(1e-15));
  CHECK(e3(0, 2) == Approx(s * 4.0 / 2.0).epsilon(1e-15));
  CHECK(e3(2, 0) == 0.0);
}

TEST_CASE("exact propagation matches fine-step integration", "[model]") {
  const JordanPlant plant = mixed_plant();
  Eigen::VectorXd x(4), xh(4);
  x << 0.3, -0.2, 0.1, 0.4;
  xh << 0.25, -0.1, 0.0, 0.35;
  const SimState s{0.0, x, xh};
  for (double h : {0.05, 0.5, 1.5}) {
    const SimState exact = propagate(s, plant, h);
    const SimState ref = rk4(plant, s, h, 20000);
    const double scale = ref.x.norm() + ref.xhat.norm();
    CHECK((exact.x - ref.x).norm() / scale < 1e-9);
    CHECK((exact.xhat - ref.xhat).norm() / scale < 1e-9);
    const Eigen::VectorXd z_exact = exact.error();
    const Eigen::VectorXd z_ref = ref.x - ref.xhat;
    CHECK((z_exact - z_ref).norm() / z_ref.norm() < 1e-9);
  }
}

TEST_CASE("propagation is additive in time", "[model]") {
  const JordanPlant plant = mixed_plant();
  Eigen::VectorXd x(4), xh(4);
  x << 0.3, -0.2, 0.1, 0.4;
  xh << 0.25, -0.1, 0.0, 0.35;
  const SimState s{0.0, x, xh};
  const SimState once = propagate(s, plant, 0.9);
  const SimState twice = propagate(propagate(s, plant, 0.4), plant, 0.5);
  CHECK((once.x - twice.x).norm() <= 1e-12 * once.x.norm());
  CHECK((once.xhat - twice.xhat).norm() <= 1e-12 * once.xhat.norm());
  CHECK(twice.t == Approx(0.9));
}

TEST_CASE("Euler mode takes one explicit step", "[model]") {
  const ScalarPlant sp{1.0, 0.2, 8.0, 1.0};
  const JordanPlant plant = JordanPlant::from_scalar(sp);
  Eigen::VectorXd x(1), xh(1);
  x << 0.2;
  xh << 0.1;
  const double h = 0.0002;
  const SimState out = propagate(SimState{0.0, x, xh}, plant, h, Integrator::Euler);
  const double u = -8.0 * 0.1;
  CHECK(out.x(0) == Approx(0.2 + h * (0.2 + 0.2 * u)).epsilon(1e-14));
  CHECK(out.xhat(0) == Approx(0.1 + h * (0.1 + 0.2 * u)).epsilon(1e-14));
}

TEST_CASE("propagate rejects bad steps and mismatched states", "[model]") {
  const ScalarPlant plant{1.0, 1.0, 0.0, 1.0};
  Eigen::VectorXd x(1), xh(1);
  x << 1.0;
  xh << 0.0;
  CHECK_THROWS_AS(propagate(SimState{0.0, x, xh}, plant, 0.0), PreconditionError);
  CHECK_THROWS_AS(propagate(SimState{0.0, x, xh}, plant, -1.0), PreconditionError);
  Eigen::VectorXd x2(2);
  x2 << 1.0, 2.0;
  CHECK_THROWS_AS(propagate(SimState{0.0, x2, xh}, plant, 1.0), PreconditionError);
}

TEST_CASE("overflow is reported as divergence", "[model]") {
  const ScalarPlant plant{50.0, 0.0, 0.0, 1.0};
  Eigen::VectorXd x(1), xh(1);
  x << 1.0;
  xh << 0.0;
  CHECK_THROWS_AS(propagate(SimState{0.0, x, xh}, plant, 100.0), DivergenceError);
}

TEST_CASE("triggering function values", "[model]") {
  const auto cfg = TriggerConfig::scalar(0.2671, 0.1, 0.1, 1.2, 1.0001);
  CHECK(trigger_value(cfg, 0, 0.0) == 0.2671);
  const auto unit = TriggerConfig::scalar(1.0, 1.0, 0.5, 0.0, 1.0001);
  CHECK(trigger_value(unit, 0, std::log(2.0)) == Approx(0.5).epsilon(1e-15));
  double prev = trigger_value(unit, 0, 0.0);
  for (double t = 0.5; t < 50.0; t += 0.5) {
    const double v = trigger_value(unit, 0, t);
    CHECK(v < prev);
    prev = v;
  }
  CHECK(prev < 1e-20);
}

TEST_CASE("jump strategy corrects only the estimate", "[model]") {
  Eigen::VectorXd x(1), xh(1);
  x << 1.0;
  xh << 0.4;
  const SimState s{0.0, x, xh};
  const SimState j = apply_jump(s, 0, 0.6);
  CHECK(j.xhat(0) == Approx(1.0));
  CHECK(j.error()(0) == Approx(0.0).margin(1e-15));
  CHECK(j.x(0) == s.x(0));

  const SimState same = apply_jump(s, 0, 0.0);
  CHECK(same.x(0) == s.x(0));
  CHECK(same.xhat(0) == s.xhat(0));

  x << 0.2;
  xh << 0.1;
  const SimState k = apply_jump(SimState{0.0, x, xh}, 0, 0.095);
  CHECK(k.error()(0) == Approx(0.005).epsilon(1e-12));
}

TEST_CASE("plant and trigger validation", "[model]") {
  JordanPlant plant = mixed_plant();
  CHECK_NOTHROW(plant.validate());
  CHECK(plant.dimension() == 4);
  CHECK(plant.trace() == Approx(3 * 0.7 + 1.3));
  CHECK(plant.eigenvalue_of(2) == 0.7);
  CHECK(plant.eigenvalue_of(3) == 1.3);
  CHECK(plant.locate(1) == std::pair<std::size_t, int>{0, 1});

  TriggerConfig cfg;
  cfg.v0 = {1.0};
  cfg.sigma = 1.0;
  cfg.rho0 = 0.5;
  cfg.rho = {0.1, 0.3, 0.5, 0.5};
  CHECK_NOTHROW(cfg.validate(plant));
  cfg.rho = {0.3, 0.1, 0.5, 0.5};
  CHECK_THROWS_AS(cfg.validate(plant), DomainError);
  cfg.rho = {0.1, 0.3, 0.4, 0.5};
  CHECK_THROWS_AS(cfg.validate(plant), DomainError);
  cfg.rho.clear();
  const auto ladder = cfg.resolved_ladder(plant);
  REQUIRE(ladder.size() == 4);
  CHECK(ladder[0] == Approx(0.5 / 3));
  CHECK(ladder[2] == 0.5);
  CHECK(ladder[3] == 0.5);

  cfg.rho0 = 1.0;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
}
