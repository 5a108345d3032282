#pragma once

#include "humanfov/orientation.hpp"

namespace humanfov {

/// Horizontal field-of-view cone. 120 degrees by default; the boundary is
/// inclusive (an offset of exactly half the cone counts as inside).
struct FovConfig {
  double horizontal_fov = 2.0 * kPi / 3.0;
};

struct FovResult {
  bool inside = false;
  double angular_offset = 0.0;  // planar angle between gaze and bearing, in [0, pi]
};

struct InvalidGaze : Error {
  InvalidGaze() : Error("direction estimate is not valid") {}
};

struct CoincidentPoints : Error {
  CoincidentPoints() : Error("subject and target coincide in the ground plane") {}
};

/// Whether `target` lies within the subject's horizontal FOV cone around the
/// gaze direction. Purely planar: heights are ignored.
FovResult fov_test(const DirectionEstimate& gaze, const SocialPoint& subject_pos,
                   const SocialPoint& target, const FovConfig& cfg = {});

/// fov_test against the camera/robot at the social-frame origin.
FovResult sees_camera(const DirectionEstimate& gaze, const SocialPoint& subject_pos,
                      const FovConfig& cfg = {});

}  // namespace humanfov
