#pragma once

#include <filesystem>

#include <json.hpp>

#include "humanfov/fov.hpp"
#include "humanfov/geometry.hpp"
#include "humanfov/tracking.hpp"

namespace humanfov {

struct BadConfig : Error {
  using Error::Error;
};

/// Pipeline tunables. JSON keys mirror the field paths below; an unknown key
/// anywhere is rejected with an error naming it.
///
/// {
///   "confidence_threshold": 0.5,
///   "sample_radius_px": 5,
///   "fov_deg": 120.0,
///   "kalman": {"q": 0.5, "r": 0.01},
///   "track": {"gate_m": 0.75, "expiry_frames": 30},
///   "leveling": [1, 0, 0, 0]
/// }
struct PipelineConfig {
  double confidence_threshold = 0.5;
  int sample_radius_px = 5;
  double fov_deg = 120.0;
  KalmanParams kalman{};
  TrackParams track{};
  UnitQuaternion leveling{};  // camera-to-social leveling rotation

  FovConfig fov_config() const { return {deg_to_rad(fov_deg)}; }
  FrameConvention frame_convention() const { return {leveling}; }

  static PipelineConfig from_json(const nlohmann::json& j);
  static PipelineConfig load(const std::filesystem::path& path);
  nlohmann::json to_json() const;

  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

}  // namespace humanfov
