#include "humanfov/fov.hpp"

#include <algorithm>
#include <cmath>

namespace humanfov {

FovResult fov_test(const DirectionEstimate& gaze, const SocialPoint& subject_pos,
                   const SocialPoint& target, const FovConfig& cfg) {
  if (!gaze.valid) {
    throw InvalidGaze();
  }
  const double bx = target.x - subject_pos.x;
  const double by = target.y - subject_pos.y;
  const double norm = std::hypot(bx, by);
  if (norm < 1e-9) {
    throw CoincidentPoints();
  }
  const double dot = (gaze.direction.x() * bx + gaze.direction.y() * by) / norm;
  const double offset = std::acos(std::clamp(dot, -1.0, 1.0));
  // 1e-12 rad of slack keeps the inclusive boundary robust to rounding; it is
  // far below any angular resolution the test data carries.
  return {offset <= 0.5 * cfg.horizontal_fov + 1e-12, offset};
}

FovResult sees_camera(const DirectionEstimate& gaze, const SocialPoint& subject_pos,
                      const FovConfig& cfg) {
  return fov_test(gaze, subject_pos, SocialPoint{0.0, 0.0, 0.0}, cfg);
}

}  // namespace humanfov
