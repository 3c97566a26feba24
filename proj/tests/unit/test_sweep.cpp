#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "etrate/bounds.hpp"
#include "etrate/errors.hpp"
#include "etrate/sweep.hpp"

using namespace etrate;
using Catch::Approx;

namespace {

SimSweepSpec fig8_spec() {
  SimSweepSpec s;
  s.plant = ScalarPlant{2.4, 1.0, 8.0, 1.0};
  s.v0 = 0.0442;
  s.sigma = 0.2;
  s.rho0 = 0.1;
  s.b = 1.0001;
  s.delay = DelaySpec::parse("uniform:1");
  s.x0 = 0.201;
  s.xhat0 = 0.2;
  s.options.horizon = 7.0;
  s.options.step = 0.0002;
  return s;
}

}  // namespace

TEST_CASE("grid parsing", "[sweep]") {
  const auto g = parse_grid("0.0005:0.2:2.0005");
  REQUIRE(g.size() == 11);
  CHECK(g.front() == 0.0005);
  CHECK(g.back() == Approx(2.0005).epsilon(1e-15));
  CHECK(parse_grid("0:0.05:5").size() == 101);
  CHECK(parse_grid("1, 2,3") == std::vector<double>{1, 2, 3});
  CHECK(parse_grid("0.5") == std::vector<double>{0.5});
  CHECK_THROWS_AS(parse_grid(""), ConfigError);
  CHECK_THROWS_AS(parse_grid("1:0:2"), ConfigError);
  CHECK_THROWS_AS(parse_grid("2:0.1:1"), ConfigError);
  CHECK_THROWS_AS(parse_grid("1,x"), ConfigError);
}

TEST_CASE("closed-loop sweep crosses the access rate", "[sweep]") {
  const auto rows = sweep_gamma(fig8_spec(), parse_grid("0.0005:0.2:2.0005"));
  REQUIRE(rows.size() == 11);
  const double access = access_rate_necessary(BoundInputs{2.4, 0.2, 0.1, 0.0, 1.0001, 1.0});
  for (const auto& r : rows) {
    CHECK(r.error.empty());
    REQUIRE(r.rate_empirical);
    CHECK(r.rate_access == access);
    CHECK(*r.xT_norm < *r.x0_norm);
  }
  CHECK(*rows.front().rate_empirical < access);
  CHECK(*rows.back().rate_empirical > access);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].packet_bits >= rows[i - 1].packet_bits);
}

TEST_CASE("sweeps are deterministic and independent of the worker count", "[sweep]") {
  auto spec = fig8_spec();
  spec.options.horizon = 2.0;
  const auto grid = parse_grid("0.0005:0.4:2.0005");
  const auto a = sweep_gamma(spec, grid, 1);
  const auto b = sweep_gamma(spec, grid, 4);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].gamma == b[i].gamma);
    CHECK(*a[i].rate_empirical == *b[i].rate_empirical);
    CHECK(*a[i].triggers == *b[i].triggers);
    CHECK(*a[i].xT_norm == *b[i].xT_norm);
  }
}

TEST_CASE("closed-loop sweeps reject non-positive delay bounds", "[sweep]") {
  CHECK_THROWS_AS(sweep_gamma(fig8_spec(), {0.0, 0.2}), ConfigError);
}

TEST_CASE("per-row failures are recorded", "[sweep]") {
  auto spec = fig8_spec();
  spec.plant = ScalarPlant{5.0, 0.0, 0.0, 1.0};
  spec.v0 = 1.0;
  spec.x0 = 1.0;
  spec.xhat0 = 0.5;
  const auto rows = sweep_gamma(spec, {0.1, 0.2});
  REQUIRE(rows.size() == 2);
  for (const auto& r : rows) CHECK_FALSE(r.error.empty());
}

TEST_CASE("phase curves for A = 5, sigma = 3", "[sweep]") {
  PhaseSpec spec;
  spec.a = 5;
  spec.sigma = 3;
  spec.rho0s = {0.7};
  const auto grid = parse_grid("0:0.005:0.5");
  const auto rows = phase_curves(spec, grid);
  REQUIRE(rows.size() == grid.size());
  const auto markers = phase_markers(spec);
  REQUIRE(markers.size() == 1);
  CHECK(markers[0].gamma_c == Approx(0.0864).margin(5e-5));
  CHECK(markers[0].gamma_eq == Approx(0.1386).margin(5e-5));
  CHECK(markers[0].access_rate == Approx(11.5416).margin(5e-5));
  for (const auto& r : rows) {
    if (r.gamma <= markers[0].gamma_c) {
      CHECK(r.rate_necessary == 0.0);
    } else {
      CHECK(r.rate_necessary > 0.0);
    }
    CHECK_FALSE(r.rate_empirical);
    CHECK(r.rate_access == markers[0].access_rate);
  }
}

TEST_CASE("curve order over rho0 swaps at the equilibrium delay", "[sweep]") {
  PhaseSpec spec;
  spec.a = 1;
  spec.sigma = 0.5;
  spec.rho0s = {0.1, 0.3, 0.5, 0.7, 0.9};
  const auto grid = parse_grid("0.05:0.05:5");
  const auto rows = phase_curves(spec, grid);
  REQUIRE(rows.size() == grid.size() * spec.rho0s.size());
  const double eq = std::log(2.0);
  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    const double gamma = grid[gi];
    if (std::abs(gamma - eq) < 0.02) continue;
    for (std::size_t j = 1; j < spec.rho0s.size(); ++j) {
      const auto& small = rows[(j - 1) * grid.size() + gi];
      const auto& large = rows[j * grid.size() + gi];
      REQUIRE(small.rho0 < large.rho0);
      if (gamma < eq) {
        // Both curves may still sit at the zero clamp.
        CHECK(small.rate_necessary_approx >= large.rate_necessary_approx);
        if (large.rate_necessary_approx > 0.0) CHECK(small.rate_necessary_approx > large.rate_necessary_approx);
      } else {
        CHECK(small.rate_necessary_approx < large.rate_necessary_approx);
      }
    }
  }
  for (const auto& r : phase_curves(spec, {eq})) {
    CHECK(r.rate_necessary_approx == Approx(r.rate_access).epsilon(1e-12));
  }
}

TEST_CASE("sup over a sigma grid", "[sweep]") {
  PhaseSpec spec;
  spec.a = 1.3;
  spec.sigma = 1;
  spec.rho0s = {0.9};
  spec.sigma_grid = {0.1, 0.5, 1.0, 3.0};
  const auto rows = phase_curves(spec, parse_grid("0:0.5:10"));
  for (const auto& r : rows) {
    REQUIRE(r.rate_necessary_sup);
    CHECK(*r.rate_necessary_sup >= r.rate_necessary);
    double best = 0.0;
    for (double s : spec.sigma_grid) {
      best = std::max(best, transmission_rate_necessary(BoundInputs{1.3, s, 0.9, r.gamma, 1.0001, 1.0}));
    }
    CHECK(*r.rate_necessary_sup == best);
  }
  CHECK(ordering_violations(rows).empty());
}
