#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "humanfov/skeleton.hpp"

namespace humanfov {

enum class DirectionKind { Torso, Gaze };

std::string_view direction_kind_name(DirectionKind kind);

/// Planar body or gaze direction derived from a 3D skeleton. When `valid`,
/// `direction` is a unit vector in the ground plane, `heading` its angle from
/// +X toward +Y, and `quaternion` the rotation about +Z taking [1,0,0] onto
/// `direction`.
struct DirectionEstimate {
  DirectionKind kind = DirectionKind::Torso;
  bool valid = false;
  Eigen::Vector3d raw_normal = Eigen::Vector3d::Zero();
  Eigen::Vector3d direction = Eigen::Vector3d::Zero();
  double heading = 0.0;
  UnitQuaternion quaternion{};
};

class MissingJoints : public Error {
 public:
  explicit MissingJoints(std::vector<JointId> missing);
  const std::vector<JointId>& missing() const { return missing_; }

 private:
  std::vector<JointId> missing_;
};

/// (P_shoulder.L - P_pelvis) x (P_shoulder.R - P_pelvis).
/// Points out of the chest; throws MissingJoints when a required joint is absent.
Eigen::Vector3d torso_normal(const Skeleton3D& s);

/// (P_eye.L - P_neck) x (P_eye.R - P_neck). Points out of the face.
Eigen::Vector3d gaze_normal(const Skeleton3D& s);

/// Projects a normal onto the ground plane and normalizes. Empty when the
/// planar component is shorter than eps (near-vertical or zero normal).
std::optional<Eigen::Vector3d> ground_direction(const Eigen::Vector3d& n, double eps = 1e-6);

/// Rotation about +Z by atan2(d.y, d.x); rotating [1,0,0] by the result
/// yields d. Expects a unit vector with d.z = 0.
UnitQuaternion heading_quaternion(const Eigen::Vector3d& d);

/// Builds a full estimate from a raw normal; invalid when the planar
/// projection is degenerate.
DirectionEstimate make_direction_estimate(DirectionKind kind, const Eigen::Vector3d& raw_normal);

/// Runs the normal -> ground direction -> heading quaternion chain for torso
/// and gaze independently. Missing joints or degenerate normals yield an
/// invalid estimate of that kind, never an abort.
std::pair<DirectionEstimate, DirectionEstimate> estimate_orientation(const Skeleton3D& s);

}  // namespace humanfov
