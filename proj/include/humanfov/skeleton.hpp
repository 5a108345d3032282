#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "humanfov/geometry.hpp"

namespace humanfov {

/// The 17 COCO keypoints in detector order, plus the two derived joints the
/// orientation math needs. Derived joints never appear in 2D detections.
enum class JointId : int {
  Nose = 0,
  EyeL,
  EyeR,
  EarL,
  EarR,
  ShoulderL,
  ShoulderR,
  ElbowL,
  ElbowR,
  WristL,
  WristR,
  HipL,
  HipR,
  KneeL,
  KneeR,
  AnkleL,
  AnkleR,
  Pelvis,
  Neck,
};

inline constexpr int kCocoJointCount = 17;
inline constexpr int kJointCount = 19;

std::string_view joint_name(JointId id);
std::optional<JointId> joint_from_name(std::string_view name);

inline bool is_derived(JointId id) { return id == JointId::Pelvis || id == JointId::Neck; }

inline std::size_t joint_index(JointId id) { return static_cast<std::size_t>(id); }

struct Joint2D {
  double u = 0.0;
  double v = 0.0;
  double confidence = 0.0;

  friend bool operator==(const Joint2D&, const Joint2D&) = default;
};

/// One person's detected 2D keypoints for one frame.
struct Skeleton2D {
  std::array<std::optional<Joint2D>, kCocoJointCount> joints{};
  double timestamp = 0.0;
  double confidence = 1.0;  // whole-detection score

  const std::optional<Joint2D>& joint(JointId id) const { return joints[joint_index(id)]; }
  void set(JointId id, const Joint2D& j) { joints[joint_index(id)] = j; }

  int present_count() const;

  friend bool operator==(const Skeleton2D&, const Skeleton2D&) = default;
};

/// Dense depth image, row-major uint16 millimetres. 0 marks an invalid pixel.
struct DepthFrame {
  int width = 0;
  int height = 0;
  std::vector<std::uint16_t> data;
  double timestamp = 0.0;

  bool in_bounds(int u, int v) const { return u >= 0 && u < width && v >= 0 && v < height; }

  std::uint16_t at(int u, int v) const {
    return data[static_cast<std::size_t>(v) * static_cast<std::size_t>(width) + u];
  }
  std::uint16_t& at(int u, int v) {
    return data[static_cast<std::size_t>(v) * static_cast<std::size_t>(width) + u];
  }

  static DepthFrame filled(int width, int height, std::uint16_t value, double timestamp = 0.0);

  friend bool operator==(const DepthFrame&, const DepthFrame&) = default;
};

/// Named 3D joints in the social frame, including the derived pelvis and neck.
struct Skeleton3D {
  std::array<std::optional<SocialPoint>, kJointCount> joints{};
  double timestamp = 0.0;
  int track_id = -1;

  bool has(JointId id) const { return joints[joint_index(id)].has_value(); }
  const std::optional<SocialPoint>& joint(JointId id) const { return joints[joint_index(id)]; }
  void set(JointId id, const SocialPoint& p) { joints[joint_index(id)] = p; }

  int present_count() const;
  std::vector<JointId> present() const;

  friend bool operator==(const Skeleton3D&, const Skeleton3D&) = default;
};

/// Minimum valid depth inside the pixel disk (u'-u)^2 + (v'-v)^2 <= radius^2,
/// clipped at the image borders. Picks the foreground surface over the
/// background around a keypoint. Empty optional when the whole disk is
/// invalid; throws OutOfBounds when the centre is outside the image.
std::optional<std::uint16_t> sample_depth(const DepthFrame& frame, int u, int v, int radius = 5);

/// Lifts a 2D detection into a 3D skeleton: per joint, threshold on
/// confidence, sample depth around the (rounded) pixel, back-project the
/// full-precision pixel and map into the social frame. Joints failing any
/// step are absent; pelvis and neck are derived as midpoints afterwards.
Skeleton3D lift_skeleton(const Skeleton2D& kp, const DepthFrame& depth,
                         const CameraIntrinsics& k, const FrameConvention& conv = {},
                         double conf_threshold = 0.5, int sample_radius = 5);

}  // namespace humanfov
