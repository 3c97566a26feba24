#include <catch2/catch_amalgamated.hpp>

#include "etrate/channel.hpp"
#include "etrate/errors.hpp"

using namespace etrate;
using Catch::Approx;

TEST_CASE("constant delay", "[channel]") {
  const DelayModel m(ConstantDelay{0.3}, 1.2);
  for (std::size_t k = 0; k < 5; ++k) CHECK(sample_delay(m, k) == 0.3);
  CHECK_FALSE(m.warning());
  CHECK_THROWS_AS(DelayModel(ConstantDelay{1.3}, 1.2), ConfigError);
  CHECK_THROWS_AS(DelayModel(ConstantDelay{-0.1}, 1.2), ConfigError);
  CHECK_NOTHROW(DelayModel(ConstantDelay{0.0}, 0.0));
}

TEST_CASE("adversarial delay", "[channel]") {
  const DelayModel m(AdversarialDelay{1.0, 0.1, 0.1}, 1.2);
  CHECK(sample_delay(m, 0) == Approx(0.163295).margin(1e-6));
  CHECK(sample_delay(m, 7) == sample_delay(m, 0));
  CHECK_FALSE(m.warning());

  const DelayModel clamped(AdversarialDelay{1.0, 0.1, 0.1}, 0.01);
  CHECK(sample_delay(clamped, 0) == 0.01);
  CHECK(clamped.warning());
}

TEST_CASE("uniform delay is seeded and stays in range", "[channel]") {
  const DelayModel a(UniformDelay{42}, 0.8);
  const DelayModel b(UniformDelay{42}, 0.8);
  const DelayModel c(UniformDelay{43}, 0.8);
  double sum = 0.0;
  int differ = 0;
  for (std::size_t k = 0; k < 20000; ++k) {
    const double d = sample_delay(a, k);
    REQUIRE(d >= 0.0);
    REQUIRE(d < 0.8);
    CHECK(d == sample_delay(b, k));
    if (d != sample_delay(c, k)) ++differ;
    sum += d;
  }
  CHECK(differ > 19990);
  CHECK(sum / 20000 == Approx(0.4).margin(0.01));
  // Draws are indexed, not streamed: order of evaluation does not matter.
  CHECK(sample_delay(a, 1234) == sample_delay(b, 1234));
  CHECK(sample_delay(DelayModel(UniformDelay{1}, 0.0), 3) == 0.0);
}

TEST_CASE("replay delay", "[channel]") {
  const DelayModel m(ReplayDelay{{0.1, 0.0, 0.5}}, 0.5);
  CHECK(sample_delay(m, 0) == 0.1);
  CHECK(sample_delay(m, 1) == 0.0);
  CHECK(sample_delay(m, 2) == 0.5);
  CHECK_THROWS_AS(sample_delay(m, 3), ConfigError);
  CHECK_THROWS_AS(DelayModel(ReplayDelay{{0.1, 0.6}}, 0.5), ConfigError);
}

TEST_CASE("in-flight slots admit one packet per channel", "[channel]") {
  InFlight f(3);
  CHECK(f.channels() == 3);
  CHECK(admit(f, 0));
  CHECK_FALSE(f.next_delivery());

  ScheduledPacket p;
  p.packet.coord = 1;
  p.t_c = 0.7;
  f.send(1, p);
  CHECK_FALSE(f.admit(1));
  CHECK(f.admit(0));
  CHECK_THROWS_AS(f.send(1, p), PreconditionError);

  p.packet.coord = 2;
  p.t_c = 0.4;
  f.send(2, p);
  p.packet.coord = 0;
  p.t_c = 0.4;
  f.send(0, p);
  REQUIRE(f.next_delivery());
  CHECK(*f.next_delivery() == 0);  // tie at 0.4 goes to the lower coordinate
  CHECK(f.delivery_time(0) == 0.4);
  CHECK(f.take(0).packet.coord == 0);
  CHECK(*f.next_delivery() == 2);
  f.take(2);
  CHECK(*f.next_delivery() == 1);
  f.take(1);
  CHECK_FALSE(f.next_delivery());
  CHECK(admit(f, 1));
}

TEST_CASE("delay spec parsing", "[channel]") {
  auto c = DelaySpec::parse("constant:0.25");
  CHECK(c.kind == DelaySpec::Kind::Constant);
  CHECK(c.value == 0.25);
  CHECK(DelaySpec::parse(c.str()).value == 0.25);

  auto u = DelaySpec::parse("uniform:17");
  CHECK(u.kind == DelaySpec::Kind::Uniform);
  CHECK(u.seed == 17);
  CHECK(DelaySpec::parse("uniform").seed == 0);

  CHECK(DelaySpec::parse("adversarial").kind == DelaySpec::Kind::Adversarial);

  auto r = DelaySpec::parse("replay:0.1,0.2,0");
  CHECK(r.kind == DelaySpec::Kind::Replay);
  CHECK(r.sequence == std::vector<double>{0.1, 0.2, 0.0});

  CHECK_THROWS_AS(DelaySpec::parse("sometimes"), ConfigError);
  CHECK_THROWS_AS(DelaySpec::parse("constant:abc"), ConfigError);
  CHECK_THROWS_AS(DelaySpec::parse("replay:"), ConfigError);
}

TEST_CASE("per-coordinate uniform models use distinct streams", "[channel]") {
  const auto spec = DelaySpec::parse("uniform:5");
  const DelayModel m0 = make_delay_model(spec, 1.0, 0, 1.0, 1.0, 0.5);
  const DelayModel m1 = make_delay_model(spec, 1.0, 1, 1.0, 1.0, 0.5);
  CHECK(sample_delay(m0, 0) != sample_delay(m1, 0));
  CHECK(sample_delay(m1, 0) == sample_delay(DelayModel(UniformDelay{6}, 1.0), 0));
  const DelayModel adv = make_delay_model(DelaySpec::parse("adversarial"), 1.2, 0, 1.0, 0.1, 0.1);
  CHECK(sample_delay(adv, 0) == Approx(0.163295).margin(1e-6));
}
