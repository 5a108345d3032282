#include "humanfov/orientation.hpp"

#include <cmath>

namespace humanfov {

namespace {

std::string missing_message(const std::vector<JointId>& missing) {
  std::string msg = "missing joints:";
  for (JointId id : missing) {
    msg += ' ';
    msg += joint_name(id);
  }
  return msg;
}

std::vector<JointId> absent(const Skeleton3D& s, std::initializer_list<JointId> required) {
  std::vector<JointId> out;
  for (JointId id : required) {
    if (!s.has(id)) {
      out.push_back(id);
    }
  }
  return out;
}

Eigen::Vector3d plane_normal(const Skeleton3D& s, JointId left, JointId right, JointId base) {
  if (auto missing = absent(s, {left, right, base}); !missing.empty()) {
    throw MissingJoints(std::move(missing));
  }
  const Eigen::Vector3d b = s.joint(base)->vec();
  return (s.joint(left)->vec() - b).cross(s.joint(right)->vec() - b);
}

}  // namespace

std::string_view direction_kind_name(DirectionKind kind) {
  return kind == DirectionKind::Torso ? "torso" : "gaze";
}

MissingJoints::MissingJoints(std::vector<JointId> missing)
    : Error(missing_message(missing)), missing_(std::move(missing)) {}

Eigen::Vector3d torso_normal(const Skeleton3D& s) {
  return plane_normal(s, JointId::ShoulderL, JointId::ShoulderR, JointId::Pelvis);
}

Eigen::Vector3d gaze_normal(const Skeleton3D& s) {
  return plane_normal(s, JointId::EyeL, JointId::EyeR, JointId::Neck);
}

std::optional<Eigen::Vector3d> ground_direction(const Eigen::Vector3d& n, double eps) {
  const double planar = std::hypot(n.x(), n.y());
  if (planar < eps) {
    return std::nullopt;
  }
  return Eigen::Vector3d(n.x() / planar, n.y() / planar, 0.0);
}

UnitQuaternion heading_quaternion(const Eigen::Vector3d& d) {
  return UnitQuaternion::from_yaw(std::atan2(d.y(), d.x()));
}

DirectionEstimate make_direction_estimate(DirectionKind kind, const Eigen::Vector3d& raw_normal) {
  DirectionEstimate e;
  e.kind = kind;
  e.raw_normal = raw_normal;
  const auto dir = ground_direction(raw_normal);
  if (!dir.has_value()) {
    return e;  // degenerate: near-vertical or zero normal
  }
  e.valid = true;
  e.direction = *dir;
  e.heading = std::atan2(dir->y(), dir->x());
  e.quaternion = UnitQuaternion::from_yaw(e.heading);
  return e;
}

std::pair<DirectionEstimate, DirectionEstimate> estimate_orientation(const Skeleton3D& s) {
  DirectionEstimate torso;
  torso.kind = DirectionKind::Torso;
  if (absent(s, {JointId::ShoulderL, JointId::ShoulderR, JointId::Pelvis}).empty()) {
    torso = make_direction_estimate(DirectionKind::Torso, torso_normal(s));
  }

  DirectionEstimate gaze;
  gaze.kind = DirectionKind::Gaze;
  if (absent(s, {JointId::EyeL, JointId::EyeR, JointId::Neck}).empty()) {
    gaze = make_direction_estimate(DirectionKind::Gaze, gaze_normal(s));
  }
  return {torso, gaze};
}

}  // namespace humanfov
