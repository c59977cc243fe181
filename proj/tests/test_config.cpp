#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include "pfcsim/config.hpp"
#include "pfcsim/errors.hpp"
#include "support.hpp"

using namespace pfc;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

ScenarioConfig valid() {
  ScenarioConfig c;
  c.duration = 0.2;
  return c;
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("parse basic settings") {
  const ScenarioConfig c = parse_config(
      "# comment line\n"
      "plant.L = 2e-3\n"
      "   plant.G=0.03   # trailing comment\n"
      "\n"
      "controller.mode = observer-only\n"
      "sim.stride = 4\n"
      "controller.d = 55\n"
      "estimator.J12 = 0.25\n"
      "plant.model = switched\n");
  CHECK(c.plant.L == 2e-3);
  CHECK(c.plant.G == 0.03);
  CHECK(c.mode == ControlMode::observer_only);
  CHECK(c.stride == 4);
  REQUIRE(c.controller.d.has_value());
  CHECK(*c.controller.d == 55.0);
  CHECK(c.estimator.J(0, 1) == 0.25);
  CHECK(c.estimator.J(1, 0) == 0.25);
  CHECK(c.model == PlantModel::switched);
  // Untouched keys keep their defaults.
  CHECK(c.plant.C == ScenarioConfig{}.plant.C);
}

TEST_CASE("auto values") {
  ScenarioConfig c = parse_config("controller.d = 12\npe.T0 = 0.5\n");
  CHECK(c.pe_T0.has_value());
  c = parse_config("controller.d = auto\npe.T0 = auto\n", c);
  CHECK_FALSE(c.controller.d.has_value());
  CHECK_FALSE(c.pe_T0.has_value());
  CHECK(c.pe_config().T0 == doctest::Approx(c.plant.period()));
}

TEST_CASE("errors carry line numbers") {
  CHECK(error_of("plant.L = 1e-3\nplant.Cap = 3\n").find("line 2") != std::string::npos);
  CHECK(error_of("plant.L = 1e-3\nplant.Cap = 3\n").find("plant.Cap") != std::string::npos);
  CHECK(error_of("\n\nplant.L = abc\n").find("line 3") != std::string::npos);
  CHECK(error_of("just words\n").find("line 1") != std::string::npos);
  CHECK(error_of("sim.stride = 2.5\n").find("integer") != std::string::npos);
  CHECK(error_of("controller.mode = fast\n").find("controller.mode") != std::string::npos);
  CHECK(error_of("plant.E = 1e999\n").size() > 0);
  CHECK(error_of("plant.E = nan\n").size() > 0);
}

TEST_CASE("unknown key via apply_setting") {
  ScenarioConfig c;
  CHECK_THROWS_AS(apply_setting(c, "plant.X", "1"), ConfigError);
  CHECK_THROWS_AS(get_setting(c, "nope"), ConfigError);
  apply_setting(c, "plant.E", "120");
  CHECK(get_setting(c, "plant.E") == "120");
}

TEST_CASE("events") {
  const auto ev = parse_events("[t=0.5 G=0.03] [t=0.8 E=140 R_s=0.2]");
  REQUIRE(ev.size() == 3);
  CHECK(ev[0].t == 0.5);
  CHECK(ev[0].target == Event::Target::G);
  CHECK(ev[0].value == 0.03);
  CHECK(ev[1].t == 0.8);
  CHECK(ev[2].target == Event::Target::R_s);
  CHECK(parse_events("").empty());
  CHECK(parse_events("[]").empty());
  CHECK_THROWS_AS(parse_events("[t=0.5 X=1]"), ConfigError);
  CHECK_THROWS_AS(parse_events("[G=1]"), ConfigError);
  CHECK_THROWS_AS(parse_events("[t=0.5]"), ConfigError);
  CHECK_THROWS_AS(parse_events("[t=0.5 G=1"), ConfigError);
  CHECK_THROWS_AS(parse_events("junk [t=0.5 G=1]"), ConfigError);
}

TEST_CASE("parameters in force after events") {
  ScenarioConfig c;
  c.events = parse_events("[t=0.5 G=0.03] [t=0.8 E=140]");
  CHECK(params_at(c, 0.49).G == c.plant.G);
  CHECK(params_at(c, 0.5).G == 0.03);
  CHECK(params_at(c, 0.79).E == c.plant.E);
  CHECK(params_at(c, 1.0).E == 140.0);
  CHECK(params_at(c, 1.0).G == 0.03);
}

TEST_CASE("text round trip") {
  testing::Gen gen(71);
  for (int n = 0; n < 50; ++n) {
    ScenarioConfig c;
    c.plant.L = gen.log_uniform(1e-4, 1e-2);
    c.plant.G = gen.uniform(0.01, 0.05) / 3.0;
    c.estimator.J(1, 1) = gen.log_uniform(1e-7, 1e-3);
    c.controller.a = gen.uniform(100, 5000);
    c.controller.d = gen.uniform(1, 100);
    c.dt = 1e-5 / gen.integer(1, 10);
    c.events = {{gen.uniform(0.1, 0.2), Event::Target::G, gen.uniform(0.01, 0.04)},
                {gen.uniform(0.3, 0.4), Event::Target::E, gen.uniform(100, 150)}};
    c.trace_path = "out/trace.csv";
    const std::string text = to_config_text(c);
    const ScenarioConfig back = parse_config(text);
    CHECK(to_config_text(back) == text);
    CHECK(back.plant.L == c.plant.L);
    CHECK(back.plant.G == c.plant.G);
    CHECK(back.estimator.J(1, 1) == c.estimator.J(1, 1));
    CHECK(back.dt == c.dt);
    REQUIRE(back.events.size() == 2);
    CHECK(back.events[1].value == c.events[1].value);
    CHECK(back.trace_path == c.trace_path);
  }
}

TEST_CASE("every key has help and is settable from its own output") {
  const ScenarioConfig c;
  for (const ConfigKey& k : config_keys()) {
    CHECK_FALSE(k.help.empty());
    ScenarioConfig d;
    CHECK_NOTHROW(apply_setting(d, k.name, get_setting(c, k.name)));
  }
}

TEST_CASE("validation") {
  CHECK_NOTHROW(valid().validate());

  ScenarioConfig c = valid();
  c.duration = 0.1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  CHECK_NOTHROW(c.validate_structure());

  c = valid();
  c.controller.V_d = 100.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);

  c = valid();
  c.plant.L = -1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);

  c = valid();
  c.pe_stride = 1.5e-5;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.pe_stride = 3e-5;
  CHECK_NOTHROW(c.validate());

  c = valid();
  c.model = PlantModel::switched;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.dt = 1e-6;
  CHECK_NOTHROW(c.validate());

  c = valid();
  c.events = {{0.5, Event::Target::G, 0.03}, {0.4, Event::Target::E, 140}};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.events = {{0.5, Event::Target::G, -0.03}};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.events = {{0.5, Event::Target::R_s, 0.0}};
  CHECK_NOTHROW(c.validate());

  c = valid();
  c.controller_init.u = 1.5;
  CHECK_THROWS_AS(c.validate(), ConfigError);

  c = valid();
  c.plant_init.v = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);

  c = valid();
  c.metrics_cycles = 13;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("format_double round trips with 17 significant digits") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(2.0) == "2");
  testing::Gen gen(72);
  for (int n = 0; n < 1000; ++n) {
    const double x = gen.uniform(-1, 1) * std::pow(10.0, gen.integer(-300, 300));
    CHECK(std::strtod(format_double(x).c_str(), nullptr) == x);
  }
  CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
}

}  // TEST_SUITE
