#include <doctest.h>

#include "humanfov/config.hpp"

using namespace humanfov;
using nlohmann::json;

TEST_CASE("config: defaults match the documented values") {
  const PipelineConfig cfg;
  CHECK(cfg.confidence_threshold == 0.5);
  CHECK(cfg.sample_radius_px == 5);
  CHECK(cfg.fov_deg == 120.0);
  CHECK(cfg.kalman.q == 0.5);
  CHECK(cfg.kalman.r == 0.01);
  CHECK(cfg.track.gate_m == 0.75);
  CHECK(cfg.track.expiry_frames == 30);
  CHECK(cfg.leveling == UnitQuaternion{});
  CHECK(cfg.fov_config().horizontal_fov == doctest::Approx(2.0 * kPi / 3.0));
}

TEST_CASE("config: JSON round-trip preserves every field") {
  PipelineConfig cfg;
  cfg.confidence_threshold = 0.3;
  cfg.sample_radius_px = 7;
  cfg.fov_deg = 90.0;
  cfg.kalman.q = 0.1;
  cfg.kalman.r = 0.02;
  cfg.track.gate_m = 1.0;
  cfg.track.expiry_frames = 15;
  cfg.leveling = UnitQuaternion::from_yaw(0.2);
  CHECK(PipelineConfig::from_json(cfg.to_json()) == cfg);
}

TEST_CASE("config: empty object gives defaults, partial objects override") {
  CHECK(PipelineConfig::from_json(json::object()) == PipelineConfig{});
  const PipelineConfig cfg = PipelineConfig::from_json(json{{"kalman", json{{"q", 0.25}}}});
  CHECK(cfg.kalman.q == 0.25);
  CHECK(cfg.kalman.r == 0.01);
}

TEST_CASE("config: unknown keys are rejected by name, including nested ones") {
  CHECK_THROWS_WITH_AS(PipelineConfig::from_json(json{{"confidencethreshold", 0.4}}),
                       doctest::Contains("confidencethreshold"), BadConfig);
  CHECK_THROWS_WITH_AS(PipelineConfig::from_json(json{{"kalman", json{{"sigma", 1.0}}}}),
                       doctest::Contains("kalman.sigma"), BadConfig);
  CHECK_THROWS_WITH_AS(PipelineConfig::from_json(json{{"track", json{{"gate", 1.0}}}}),
                       doctest::Contains("track.gate"), BadConfig);
}

TEST_CASE("config: value validation") {
  CHECK_THROWS_AS(PipelineConfig::from_json(json{{"confidence_threshold", 1.5}}), BadConfig);
  CHECK_THROWS_AS(PipelineConfig::from_json(json{{"sample_radius_px", -1}}), BadConfig);
  CHECK_THROWS_AS(PipelineConfig::from_json(json{{"fov_deg", 0.0}}), BadConfig);
  CHECK_THROWS_AS(PipelineConfig::from_json(json{{"fov_deg", 400.0}}), BadConfig);
  CHECK_THROWS_AS(PipelineConfig::from_json(json{{"kalman", json{{"r", 0.0}}}}), BadConfig);
  CHECK_THROWS_AS(PipelineConfig::from_json(json{{"leveling", json::array({1, 1, 0, 0})}}),
                  BadConfig);
  CHECK_THROWS_AS(PipelineConfig::from_json(json{{"leveling", json::array({1, 0, 0})}}),
                  BadConfig);
}
