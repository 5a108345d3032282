#include "humanfov/geometry.hpp"

namespace humanfov {

CameraPoint backproject(double u, double v, double depth_mm, const CameraIntrinsics& k) {
  if (depth_mm <= 0.0) {
    throw NonPositiveDepth(depth_mm);
  }
  if (!k.contains(u, v)) {
    throw OutOfBounds(u, v);
  }
  const double z = depth_mm / 1000.0;
  return {(u - k.cx) * z / k.fx, (v - k.cy) * z / k.fy, z};
}

PixelDepth project(const CameraPoint& p, const CameraIntrinsics& k) {
  if (p.z <= 0.0) {
    throw BehindCamera(p.z);
  }
  return {k.fx * p.x / p.z + k.cx, k.fy * p.y / p.z + k.cy, p.z * 1000.0};
}

SocialPoint camera_to_social(const CameraPoint& p, const FrameConvention& conv) {
  const Eigen::Vector3d permuted(p.z, -p.x, -p.y);
  return SocialPoint::from(conv.leveling.rotate(permuted));
}

CameraPoint social_to_camera(const SocialPoint& p, const FrameConvention& conv) {
  const Eigen::Vector3d unleveled = conv.leveling.eigen().conjugate() * p.vec();
  return {-unleveled.y(), -unleveled.z(), unleveled.x()};
}

}  // namespace humanfov
