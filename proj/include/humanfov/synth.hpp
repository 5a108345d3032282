#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "humanfov/config.hpp"
#include "humanfov/io.hpp"

namespace humanfov {

/// Activity patterns mirroring the recorded trial set: straight walking,
/// walking with crossed arms, walking with sudden dodges, and a camera-facing
/// zigzag with pronounced head turns.
enum class TrajectoryKind {
  WalkStraight,
  ArmsCrossedWalk,
  SuddenDodge,
  ZigzagHeadTurns,
};

std::string_view trajectory_name(TrajectoryKind kind);
std::optional<TrajectoryKind> trajectory_from_name(std::string_view name);
const std::vector<std::string_view>& trajectory_names();

struct NoiseModel {
  double sigma_px = 0.0;  // keypoint pixel jitter
  double sigma_mm = 0.0;  // per-pixel depth jitter on body surfaces
  double dropout = 0.0;   // per-joint per-frame dropout probability

  friend bool operator==(const NoiseModel&, const NoiseModel&) = default;
};

struct SyntheticScenario {
  std::uint64_t seed = 1;
  double duration_s = 5.0;
  double fps = 30.0;
  TrajectoryKind trajectory = TrajectoryKind::WalkStraight;
  NoiseModel noise{};

  static SyntheticScenario from_json(const nlohmann::json& j);
  static SyntheticScenario load(const std::filesystem::path& path);
  nlohmann::json to_json() const;

  friend bool operator==(const SyntheticScenario&, const SyntheticScenario&) = default;
};

struct SynthFrame {
  double timestamp = 0.0;
  std::vector<Skeleton2D> detections;
  DepthFrame depth;
  GroundTruthFrame truth;  // world-frame joints plus exact headings
};

/// Deterministic scene generator: a 15-joint parametric body (COCO minus the
/// ears) animated along the scenario trajectory, rendered as per-joint depth
/// disks over a far background. Frames derive their randomness from
/// (seed, index) alone, so they can be produced in any order.
class SyntheticScene {
 public:
  SyntheticScene(const SyntheticScenario& scenario, const CameraIntrinsics& k);

  int frame_count() const { return frame_count_; }
  const CameraIntrinsics& intrinsics() const { return k_; }

  SynthFrame frame(int index) const;

  /// Camera-to-world: world shares the social axes with its origin on the
  /// floor directly below the camera, which sits 1.25 m up.
  Extrinsics extrinsics() const;

 private:
  SyntheticScenario scenario_;
  CameraIntrinsics k_;
  int frame_count_ = 0;
};

/// Renders the scenario into a recording directory with ground truth
/// alongside: intrinsics.json, frames.jsonl, depth/NNNNNN.pgm, gt.jsonl,
/// extrinsics.json.
void generate(const SyntheticScenario& scenario, const CameraIntrinsics& k,
              const std::filesystem::path& out_dir);

}  // namespace humanfov
