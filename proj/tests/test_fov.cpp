#include <doctest.h>

#include <cmath>
#include <random>

#include "humanfov/fov.hpp"

using namespace humanfov;

namespace {

DirectionEstimate gaze_along(double heading) {
  DirectionEstimate e;
  e.kind = DirectionKind::Gaze;
  e.valid = true;
  e.heading = heading;
  e.direction = {std::cos(heading), std::sin(heading), 0.0};
  e.quaternion = UnitQuaternion::from_yaw(heading);
  e.raw_normal = e.direction;
  return e;
}

}  // namespace

TEST_CASE("fov_test: looking straight at the target") {
  const FovResult r = fov_test(gaze_along(kPi), {2.0, 0.0, 1.0}, {0.0, 0.0, 0.0});
  CHECK(r.inside);
  CHECK(r.angular_offset == doctest::Approx(0.0));
}

TEST_CASE("fov_test: 120 degree cone boundary is inclusive at 60 degrees") {
  const SocialPoint subject{2.0, 0.0, 0.0};
  const DirectionEstimate gaze = gaze_along(0.0);
  const auto target_at = [&](double offset_deg) {
    const double a = deg_to_rad(offset_deg);
    return SocialPoint{subject.x + std::cos(a), subject.y + std::sin(a), 0.0};
  };

  const FovResult at_60 = fov_test(gaze, subject, target_at(60.0));
  CHECK(at_60.inside);
  CHECK(at_60.angular_offset == doctest::Approx(kPi / 3.0));

  CHECK(fov_test(gaze, subject, target_at(59.999)).inside);
  CHECK_FALSE(fov_test(gaze, subject, target_at(61.0)).inside);
  CHECK_FALSE(fov_test(gaze, subject, target_at(60.001)).inside);
}

TEST_CASE("sees_camera: canonical poses") {
  CHECK(sees_camera(gaze_along(kPi), {2.0, 0.0, 0.9}).inside);
  CHECK(sees_camera(gaze_along(kPi), {2.0, 0.0, 0.9}).angular_offset == doctest::Approx(0.0));

  const FovResult back = sees_camera(gaze_along(0.0), {2.0, 0.0, 0.9});
  CHECK_FALSE(back.inside);
  CHECK(back.angular_offset == doctest::Approx(kPi));

  // Subject at (2, 2) gazing along -X: bearing to origin is (-sqrt2/2, -sqrt2/2),
  // arccos(dot) = 45 degrees.
  const FovResult diag = sees_camera(gaze_along(kPi), {2.0, 2.0, 0.9});
  CHECK(diag.inside);
  CHECK(diag.angular_offset == doctest::Approx(kPi / 4.0));
}

TEST_CASE("fov_test: errors on invalid gaze and coincident points") {
  DirectionEstimate invalid;
  invalid.valid = false;
  CHECK_THROWS_AS(fov_test(invalid, {2.0, 0.0, 0.0}, {0.0, 0.0, 0.0}), InvalidGaze);
  CHECK_THROWS_AS(fov_test(gaze_along(0.0), {2.0, 1.0, 0.0}, {2.0, 1.0, 5.0}), CoincidentPoints);
}

TEST_CASE("fov_test: invariant under joint rotation about Z plus translation") {
  std::mt19937 rng(51);
  std::uniform_real_distribution<double> dist(-3.0, 3.0);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  for (int i = 0; i < 500; ++i) {
    const double heading = angle(rng);
    const SocialPoint subject{dist(rng), dist(rng), 0.0};
    const SocialPoint target{dist(rng), dist(rng), 0.0};
    if (std::hypot(target.x - subject.x, target.y - subject.y) < 1e-6) {
      continue;
    }
    const FovResult base = fov_test(gaze_along(heading), subject, target);

    const double phi = angle(rng);
    const double tx = dist(rng), ty = dist(rng);
    const double c = std::cos(phi), s = std::sin(phi);
    const auto move = [&](const SocialPoint& p) {
      return SocialPoint{c * p.x - s * p.y + tx, s * p.x + c * p.y + ty, p.z};
    };
    const FovResult moved = fov_test(gaze_along(heading + phi), move(subject), move(target));
    CHECK(moved.inside == base.inside);
    CHECK(std::abs(moved.angular_offset - base.angular_offset) < 1e-9);
  }
}

TEST_CASE("fov_test: offset stays in [0, pi] and widening the cone is monotone") {
  std::mt19937 rng(52);
  std::uniform_real_distribution<double> dist(-3.0, 3.0);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  for (int i = 0; i < 500; ++i) {
    const SocialPoint subject{dist(rng), dist(rng), 0.0};
    const SocialPoint target{dist(rng), dist(rng), 0.0};
    if (std::hypot(target.x - subject.x, target.y - subject.y) < 1e-6) {
      continue;
    }
    const DirectionEstimate gaze = gaze_along(angle(rng));
    bool was_inside = false;
    for (double fov_deg : {30.0, 90.0, 120.0, 200.0, 360.0}) {
      const FovResult r = fov_test(gaze, subject, target, {deg_to_rad(fov_deg)});
      CHECK(r.angular_offset >= 0.0);
      CHECK(r.angular_offset <= kPi);
      if (was_inside) {
        CHECK(r.inside);  // enlarging the cone never flips inside -> outside
      }
      was_inside = r.inside;
    }
  }
}
