#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qxval/config_io.h"

using namespace qxval;

TEST_CASE("happy-path parse with comments, blanks and unit conversions") {
  const std::string text = R"(# canonical link
geometry.L_km = 20.0
geometry.d_km = 10

  hardware.n_memories =  4
noise.coherence_time_s = inf
experiment.id = 2
experiment.tau_sweep_ms = 18, 55, inf
experiment.n_mem_sweep = 1,2,4
)";
  const ParsedConfig parsed = parse_config_text(text);
  CHECK(parsed.domain.geometry.node_distance_km == 20.0);
  CHECK(parsed.domain.hardware.n_memories == 4);
  CHECK(std::isinf(parsed.domain.noise.coherence_time_s));
  REQUIRE(parsed.experiment.experiment.has_value());
  CHECK(*parsed.experiment.experiment == 2);
  REQUIRE(parsed.experiment.tau_sweep_s.has_value());
  CHECK(parsed.experiment.tau_sweep_s->at(0) == doctest::Approx(18e-3));
  CHECK(std::isinf(parsed.experiment.tau_sweep_s->at(2)));
  REQUIRE(parsed.experiment.n_mem_sweep.has_value());
  CHECK(*parsed.experiment.n_mem_sweep == std::vector<int>{1, 2, 4});
}

TEST_CASE("unset keys keep their defaults") {
  const ParsedConfig parsed = parse_config_text("geometry.L_km = 30\n");
  CHECK(parsed.domain.geometry.node_distance_km == 30.0);
  CHECK(parsed.domain.geometry.attenuation_db_km == 0.2);
  CHECK(parsed.domain.hardware.p_bsm == 0.5);
  CHECK_FALSE(parsed.experiment.experiment.has_value());
  CHECK_FALSE(parsed.experiment.seed.has_value());
}

TEST_CASE("unknown keys are errors and every problem is reported") {
  try {
    parse_config_text("geometry.L_km = 20\nbogus.key = 1\nhardware.p_bsm = x\n");
    FAIL("expected ConfigParseError");
  } catch (const ConfigParseError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("bogus.key") != std::string::npos);
    CHECK(msg.find("hardware.p_bsm") != std::string::npos);
  }
}

TEST_CASE("duplicate keys are rejected with both line numbers") {
  try {
    parse_config_text("request.n_bell = 10\nrequest.n_bell = 20\n");
    FAIL("expected ConfigParseError");
  } catch (const ConfigParseError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("duplicate") != std::string::npos);
    CHECK(msg.find("line 2") != std::string::npos);
    CHECK(msg.find("line 1") != std::string::npos);
  }
}

TEST_CASE("missing '=' and malformed lists are flagged by line") {
  CHECK_THROWS_AS(parse_config_text("geometry.L_km 20\n"), ConfigParseError);
  CHECK_THROWS_AS(parse_config_text("experiment.d_sweep_km = 1,,3\n"), ConfigParseError);
  CHECK_THROWS_AS(parse_config_text("noise.pauli_weights = 0.5, 0.5\n"), ConfigParseError);
  CHECK_THROWS_AS(parse_config_text("experiment.n_mem_sweep = 1.5, 2\n"), ConfigParseError);
}

TEST_CASE("pauli weight lists of the right arity are applied") {
  std::string line = "noise.pauli_weights = ";
  for (int i = 0; i < 15; ++i) line += (i ? ", " : "") + std::string(i == 2 ? "0.2" : "0.05714285714285715");
  const ParsedConfig parsed = parse_config_text(line + "\n");
  CHECK(parsed.domain.noise.pauli_weights[2] == 0.2);
}

TEST_CASE("missing files surface as ConfigParseError") {
  CHECK_THROWS_AS(parse_config_file("/nonexistent/qxval.cfg"), ConfigParseError);
}

TEST_CASE("the advertised key list covers every parser entry") {
  const auto& keys = known_config_keys();
  CHECK(keys.size() == 28);
  for (const auto& key : keys) {
    CHECK_NOTHROW(parse_config_text(key.find("sweep") != std::string::npos ||
                                            key.find("grid") != std::string::npos ||
                                            key.find("weights") != std::string::npos
                                        ? std::string()
                                        : key + " = 1\n"));
  }
}
