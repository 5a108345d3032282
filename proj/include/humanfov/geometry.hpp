#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cmath>

#include "humanfov/errors.hpp"

namespace humanfov {

inline constexpr double kPi = 3.14159265358979323846;

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/// Wraps an angle to (-pi, pi].
inline double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * kPi);
  if (a <= -kPi) {
    a += 2.0 * kPi;
  } else if (a > kPi) {
    a -= 2.0 * kPi;
  }
  return a;
}

/// Pinhole intrinsics. No distortion model: RealSense streams come rectified.
struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;

  bool valid() const {
    return fx > 0.0 && fy > 0.0 && cx > 0.0 && cx < width && cy > 0.0 && cy < height;
  }

  bool contains(double u, double v) const {
    return u >= 0.0 && u < width && v >= 0.0 && v < height;
  }

  /// D435-class colour stream at 1280x720.
  static CameraIntrinsics default_720p() { return {911.5, 911.5, 640.0, 360.0, 1280, 720}; }

  friend bool operator==(const CameraIntrinsics&, const CameraIntrinsics&) = default;
};

// Camera frame: X right, Y down, Z forward (optical convention).
// Social frame: X forward (= camera Z), Y left (= -camera X), Z up (= -camera Y).
enum class Frame { Camera, Social };

template <Frame F>
struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Eigen::Vector3d vec() const { return {x, y, z}; }
  static Point3 from(const Eigen::Vector3d& v) { return {v.x(), v.y(), v.z()}; }

  bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }

  friend Point3 midpoint(const Point3& a, const Point3& b) {
    return {0.5 * (a.x + b.x), 0.5 * (a.y + b.y), 0.5 * (a.z + b.z)};
  }

  friend bool operator==(const Point3&, const Point3&) = default;
};

using CameraPoint = Point3<Frame::Camera>;
using SocialPoint = Point3<Frame::Social>;

struct UnitQuaternion {
  double w = 1.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }
  bool is_unit(double tol = 1e-9) const { return std::abs(norm() - 1.0) < tol; }

  UnitQuaternion normalized() const {
    const double n = norm();
    return {w / n, x / n, y / n, z / n};
  }

  Eigen::Quaterniond eigen() const { return {w, x, y, z}; }

  Eigen::Vector3d rotate(const Eigen::Vector3d& v) const { return eigen() * v; }

  /// Rotation about +Z by theta.
  static UnitQuaternion from_yaw(double theta) {
    return {std::cos(0.5 * theta), 0.0, 0.0, std::sin(0.5 * theta)};
  }

  friend bool operator==(const UnitQuaternion&, const UnitQuaternion&) = default;
};

/// Camera-to-social mapping. The fixed axis permutation turns the optical
/// frame into the Z-up social frame; `leveling` absorbs residual camera tilt
/// and defaults to identity (camera mounted level).
struct FrameConvention {
  UnitQuaternion leveling{};
};

struct PixelDepth {
  double u = 0.0;
  double v = 0.0;
  double depth_mm = 0.0;
};

/// Inverse pinhole: pixel plus depth to a camera-frame point in metres.
CameraPoint backproject(double u, double v, double depth_mm, const CameraIntrinsics& k);

/// Forward pinhole, the exact inverse of backproject. Depth is returned in
/// (unquantized) millimetres.
PixelDepth project(const CameraPoint& p, const CameraIntrinsics& k);

SocialPoint camera_to_social(const CameraPoint& p, const FrameConvention& conv = {});
CameraPoint social_to_camera(const SocialPoint& p, const FrameConvention& conv = {});

}  // namespace humanfov
