#include <doctest.h>

#include <string>

#include "logem/config.hpp"
#include "logem/errors.hpp"

using namespace logem;

namespace {

const char* kMinimal = R"({
  "scenario": {
    "b": 1.0, "T": 2.0,
    "f": [[0.3]], "g": [[0.1]], "phi": [1.0],
    "levy": [{"rate": 1.0, "law": {"family": "uniform", "lo": -0.5, "hi": 0.5}}]
  }
})";

std::string config_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Configuration);
    return e.what();
  }
  FAIL("expected a configuration error");
  return {};
}

std::string replace(std::string text, const std::string& from, const std::string& to) {
  const auto pos = text.find(from);
  REQUIRE(pos != std::string::npos);
  return text.replace(pos, from.size(), to);
}

}  // namespace

TEST_CASE("minimal config takes defaults") {
  const RunConfig cfg = parse_config(kMinimal);
  CHECK(cfg.p == 2.0);
  CHECK(cfg.format == OutputFormat::Csv);
  CHECK(cfg.m == 16);
  CHECK(cfg.scenario.dim() == 1);
  CHECK(cfg.scenario.positivity_mode);
  CHECK(cfg.scenario_hash.size() == 16);
  CHECK(*cfg.scenario.field.f(0, 0).constant_value() == 0.3);
}

TEST_CASE("diagnostics name the key path") {
  CHECK(config_error(replace(kMinimal, "\"b\": 1.0", "\"b\": -1.0")).find("scenario.b") == 0);
  CHECK(config_error(replace(kMinimal, "\"b\": 1.0", "\"b\": 1.0, \"bogus\": 1"))
            .find("scenario.bogus: unknown key") != std::string::npos);
  CHECK(config_error(replace(kMinimal, "\"rate\": 1.0", "\"rate\": -2"))
            .find("scenario.levy[0].rate") != std::string::npos);
  CHECK(config_error(replace(kMinimal, "\"hi\": 0.5", "\"hi\": -0.5"))
            .find("scenario.levy[0].law") != std::string::npos);
  CHECK(config_error(replace(kMinimal, "[[0.1]]", "[[{\"family\": \"cubic\"}]]"))
            .find("scenario.g[0][0]") != std::string::npos);
  CHECK(config_error("{\"scenario\": ").find("malformed") != std::string::npos);
  CHECK(config_error(replace(kMinimal, "\"phi\": [1.0]", "\"phi\": [1.0, 2.0]"))
            .find("scenario.phi") != std::string::npos);
}

TEST_CASE("grid constraints are checked up front") {
  // b = 4 with m = 2 gives Δ = 2
  const std::string big_delay = replace(kMinimal, "\"b\": 1.0", "\"b\": 4.0");
  const std::string with_m = replace(big_delay, "\n}", ", \"run\": {\"m\": 2}\n}");
  const std::string msg = config_error(with_m);
  CHECK(msg.find("run.m") == 0);
  CHECK(msg.find("Δ < 1") != std::string::npos);

  CHECK(config_error(replace(kMinimal, "\n}", ", \"run\": {\"m\": 1}\n}")).find("run.m") == 0);
}

TEST_CASE("run section") {
  const std::string text = replace(kMinimal, "\n}",
                                   ", \"run\": {\"m\": 8, \"seed\": 42, \"format\": \"json\", "
                                   "\"coarse_m\": [2, 4], \"fine_m\": 64, \"q\": [3]}\n}");
  const RunConfig cfg = parse_config(text);
  CHECK(cfg.m == 8);
  CHECK(cfg.seed == 42);
  CHECK(cfg.format == OutputFormat::Json);
  CHECK(cfg.coarse_m == std::vector<int>{2, 4});
  CHECK(cfg.q == std::vector<double>{3.0});
  CHECK(config_error(replace(kMinimal, "\n}", ", \"run\": {\"format\": \"xml\"}\n}"))
            .find("run.format") == 0);
}

TEST_CASE("canonical scenario JSON round-trips and hashes stably") {
  const std::string rich = R"({
    "scenario": {
      "b": 0.5, "T": 1.0, "positivity_mode": true,
      "f": [[-0.2, {"family": "bounded_affine", "c0": 0.1, "c1": 0.2, "clip_lo": 0.0, "clip_hi": 0.4, "w": [1, 0]}],
            [0.1, -0.3]],
      "g": [[{"family": "sigmoid", "c0": 0.0, "amplitude": 0.3, "w": [0.5, 0.5]}, 0.0], [0.0, 0.1]],
      "phi": [{"family": "holder_poly", "c0": 1.0, "c1": 0.2, "exponent": 0.5}, 2.0],
      "levy": [{"rate": 1.0, "law": {"family": "shifted_exponential", "scale": 0.3, "shift": -0.2}},
               {"rate": 0.5, "law": {"family": "two_point", "z1": -0.1, "prob1": 0.4, "z2": 0.3}}]
    }
  })";
  const RunConfig cfg = parse_config(rich);
  const auto canonical = scenario_to_json(cfg.scenario);
  const Scenario back = scenario_from_json(canonical);
  CHECK(scenario_to_json(back) == canonical);
  CHECK(scenario_hash(back) == cfg.scenario_hash);

  const RunConfig other = parse_config(replace(rich, "\"rate\": 0.5", "\"rate\": 0.6"));
  CHECK(other.scenario_hash != cfg.scenario_hash);
}
