#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <sstream>

#include "etrate/commands.hpp"
#include "etrate/errors.hpp"
#include "etrate/run_config.hpp"

using namespace etrate;
using Catch::Approx;
using Catch::Matchers::ContainsSubstring;

namespace {

RunConfig parse(const std::string& text) {
  std::istringstream in(text);
  return RunConfig::parse(in, "test.conf");
}

std::map<std::string, double> table(const std::string& text) {
  std::map<std::string, double> out;
  for (const auto& [k, v] : cli::bounds_table(parse(text))) out.emplace(k, v);
  return out;
}

}  // namespace

TEST_CASE("config values and origins", "[config]") {
  const RunConfig c = parse("# comment\nplant.a = 2.5\n\ntrigger.rho0=0.3  # trailing\nsweep.rho0 = 0.1, 0.2\n");
  CHECK(c.number("plant.a") == 2.5);
  CHECK(c.number("trigger.rho0") == 0.3);
  CHECK(c.origin("plant.a") == "test.conf:2");
  CHECK(c.numbers("sweep.rho0") == std::vector<double>{0.1, 0.2});
  CHECK(c.number("plant.b", 1.0) == 1.0);
  CHECK_FALSE(c.has("plant.b"));
}

TEST_CASE("config errors point at the offending line", "[config]") {
  CHECK_THROWS_WITH(parse("plant.a = 1\nnot a pair\n"), ContainsSubstring("test.conf:2"));
  CHECK_THROWS_WITH(parse("plant.a = 1\nplant.a = 2\n"), ContainsSubstring("test.conf:2"));
  const RunConfig c = parse("plant.a = 1\ntrigger.sigma = fast\n");
  CHECK_THROWS_WITH(c.number("trigger.sigma"), ContainsSubstring("test.conf:2"));
  CHECK_THROWS_AS(c.number("trigger.rho0"), ConfigError);
  CHECK_THROWS_WITH(parse("plant.q = 1\n").require_known(cli::known_keys()), ContainsSubstring("plant.q"));
}

TEST_CASE("flag overrides win over the file", "[config]") {
  RunConfig c = parse("trigger.gamma = 0.5\n");
  c.set_assignment("trigger.gamma=0.7");
  CHECK(c.number("trigger.gamma") == 0.7);
  CHECK(c.origin("trigger.gamma") == "--set");
  CHECK_THROWS_AS(c.set_assignment("no-equals"), ConfigError);
}

TEST_CASE("bounds table for A = 5, sigma = 3, rho0 = 0.7", "[config]") {
  const auto t = table("plant.a = 5\ntrigger.sigma = 3\ntrigger.rho0 = 0.7\n");
  CHECK(t.at("access_rate") == Approx(11.5416).margin(5e-5));
  CHECK(t.at("gamma_eq") == Approx(0.1386).margin(5e-5));
  CHECK(t.at("gamma_c") == Approx(0.0864).margin(5e-5));
  CHECK(t.at("rate_necessary") == 0.0);
}

TEST_CASE("bounds table for A = 1, sigma = 1", "[config]") {
  const auto t = table("plant.a = 1\ntrigger.sigma = 1\ntrigger.rho0 = 0.5\ntrigger.b = 1.0001\n");
  CHECK(t.at("asymptote") == Approx(5.7708).margin(5e-5));
}

TEST_CASE("assumption-1 rows", "[config]") {
  const std::string base =
      "plant.a = 1\ntrigger.sigma = 1\ntrigger.rho0 = 0.5\ntrigger.gamma = 0.5\nbounds.assumption1 = true\n";
  const auto t = table(base + "bounds.nu = 10\n");
  CHECK(t.at("assumption1_witness_count") == 2);
  CHECK_THROWS_AS(cli::bounds_table(parse(base + "bounds.nu = 1\n")), DomainError);
  const auto empty = table(base + "bounds.nu = 4\n");
  CHECK(empty.at("assumption1_witness_count") == 0);
}

TEST_CASE("cli bounds output", "[config]") {
  std::ostringstream out;
  CHECK(cli::cmd_bounds(parse("plant.a = 5\ntrigger.sigma = 3\ntrigger.rho0 = 0.7\n"), out, std::nullopt) == 0);
  CHECK_THAT(out.str(), ContainsSubstring("11.5416"));
  CHECK_THAT(out.str(), ContainsSubstring("0.138629"));
  CHECK_THAT(out.str(), ContainsSubstring("0.0863821"));
}

TEST_CASE("simulation setup from a config", "[config]") {
  const auto s = cli::build_simulation(parse(
      "plant.a = 1\nplant.b = 0.2\nplant.k = 8\ntrigger.v0 = 0.2671\ntrigger.sigma = 0.1\n"
      "trigger.rho0 = 0.1\ntrigger.gamma = 1.2\ninit.x0 = 0.2\ninit.xhat0 = 0.1\nseed = 9\n"));
  CHECK(s.scalar);
  CHECK(s.delay.kind == DelaySpec::Kind::Uniform);
  CHECK(s.delay.seed == 9);
  CHECK(s.plant.dimension() == 1);
  CHECK(s.x0(0) == 0.2);
  CHECK(s.delay_models().size() == 1);
}

TEST_CASE("exit codes by error kind", "[config]") {
  CHECK(cli::exit_code_for(ConfigError("x")) == cli::kUsage);
  CHECK(cli::exit_code_for(DomainError("x")) == cli::kUsage);
  CHECK(cli::exit_code_for(PreconditionError("x")) == cli::kUsage);
  CHECK(cli::exit_code_for(DivergenceError("x")) == cli::kDivergence);
  CHECK(cli::exit_code_for(DecodeError("x")) == cli::kInvariant);
}
