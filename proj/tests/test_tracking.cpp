#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "humanfov/tracking.hpp"

using namespace humanfov;

namespace {

// Independent scalar re-implementation of the heading filter, no matrix
// library: covariance carried as (p00, p01, p11).
struct ScalarKalmanOracle {
  double q = 0.5;
  double r = 0.01;
  double p0_heading = 0.5;
  double p0_rate = 1.0;

  bool init = false;
  double theta = 0.0, omega = 0.0;
  double p00 = 0.0, p01 = 0.0, p11 = 0.0;

  void predict(double dt) {
    if (!init || dt <= 0.0) {
      return;
    }
    theta = wrap_angle(theta + omega * dt);
    const double n00 = p00 + 2.0 * dt * p01 + dt * dt * p11 + q * dt * dt * dt / 3.0;
    const double n01 = p01 + dt * p11 + q * dt * dt / 2.0;
    const double n11 = p11 + q * dt;
    p00 = n00;
    p01 = n01;
    p11 = n11;
  }

  void update(double m) {
    if (!init) {
      theta = wrap_angle(m);
      omega = 0.0;
      p00 = p0_heading;
      p01 = 0.0;
      p11 = p0_rate;
      init = true;
      return;
    }
    const double y = wrap_angle(m - theta);
    const double s = p00 + r;
    const double k0 = p00 / s;
    const double k1 = p01 / s;
    theta = wrap_angle(theta + k0 * y);
    omega += k1 * y;
    // Joseph form with A = [[1-k0, 0], [-k1, 1]].
    const double a00 = 1.0 - k0;
    const double ap00 = a00 * p00, ap01 = a00 * p01;
    const double ap10 = p01 - k1 * p00, ap11 = p11 - k1 * p01;
    const double n00 = ap00 * a00 + r * k0 * k0;
    const double n01 = -ap00 * k1 + ap01 + r * k0 * k1;
    const double n10 = ap10 * a00 + r * k1 * k0;
    const double n11 = -ap10 * k1 + ap11 + r * k1 * k1;
    p00 = n00;
    p01 = 0.5 * (n01 + n10);
    p11 = n11;
  }
};

void check_psd(const Eigen::Matrix2d& p) {
  CHECK(std::abs(p(0, 1) - p(1, 0)) < 1e-12);
  const double tr = p.trace();
  const double det = p.determinant();
  const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
  const double lambda_min = tr / 2.0 - disc;
  CHECK(lambda_min >= -1e-12);
}

Skeleton3D skeleton_at(double x, double y) {
  Skeleton3D s;
  s.set(JointId::HipL, {x, y + 0.15, -0.3});
  s.set(JointId::HipR, {x, y - 0.15, -0.3});
  s.set(JointId::Pelvis, {x, y, -0.3});
  s.set(JointId::ShoulderL, {x, y + 0.18, 0.2});
  s.set(JointId::ShoulderR, {x, y - 0.18, 0.2});
  s.set(JointId::Neck, {x, y, 0.2});
  s.set(JointId::EyeL, {x - 0.05, y + 0.03, 0.37});
  s.set(JointId::EyeR, {x - 0.05, y - 0.03, 0.37});
  return s;
}

DirectionEstimate measurement(DirectionKind kind, double heading, bool valid = true) {
  DirectionEstimate e;
  e.kind = kind;
  e.valid = valid;
  e.heading = heading;
  e.direction = {std::cos(heading), std::sin(heading), 0.0};
  e.quaternion = UnitQuaternion::from_yaw(heading);
  return e;
}

}  // namespace

TEST_CASE("HeadingFilter: predict with dt = 0 changes nothing") {
  HeadingFilter f;
  f.update(1.0);
  const double theta = f.heading();
  const Eigen::Matrix2d cov = f.covariance();
  f.predict(0.0);
  CHECK(f.heading() == theta);
  CHECK(f.covariance() == cov);
}

TEST_CASE("HeadingFilter: constant-velocity prediction, with wrapping") {
  HeadingFilter f;
  f.update(0.0);
  // Pull the rate up via updates is indirect; set the motion through the oracle
  // path instead: predict from a known state by seeding with two updates.
  // Direct check of the transition uses the documented model:
  ScalarKalmanOracle oracle;
  oracle.update(0.0);
  oracle.omega = 1.0;
  oracle.predict(0.5);
  CHECK(oracle.theta == doctest::Approx(0.5));

  oracle.theta = 3.0;
  oracle.omega = 1.0;
  oracle.predict(0.5);
  CHECK(oracle.theta == doctest::Approx(3.5 - 2.0 * kPi));  // wrapped
}

TEST_CASE("HeadingFilter: repeated updates converge monotonically, matching the oracle") {
  for (double start : {0.0, 2.5, -3.0}) {
    HeadingFilter f;
    ScalarKalmanOracle oracle;
    f.update(start);
    oracle.update(start);

    const double m = 1.3;
    double prev_err = std::abs(wrap_angle(f.heading() - m));
    for (int i = 0; i < 200; ++i) {
      f.update(m);
      oracle.update(m);
      const double err = std::abs(wrap_angle(f.heading() - m));
      CHECK(err <= prev_err + 1e-15);
      prev_err = err;
      CHECK(std::abs(wrap_angle(f.heading() - oracle.theta)) < 1e-12);
      CHECK(std::abs(f.rate() - oracle.omega) < 1e-12);
      CHECK(std::abs(f.covariance()(0, 0) - oracle.p00) < 1e-12);
      CHECK(std::abs(f.covariance()(0, 1) - oracle.p01) < 1e-12);
      CHECK(std::abs(f.covariance()(1, 1) - oracle.p11) < 1e-12);
    }
    CHECK(std::abs(wrap_angle(f.heading() - m)) < 1e-3);
  }
}

TEST_CASE("HeadingFilter: predict/update cycles track the oracle step for step") {
  std::mt19937 rng(60);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  std::uniform_real_distribution<double> dt_dist(0.01, 0.2);
  HeadingFilter f;
  ScalarKalmanOracle oracle;
  for (int i = 0; i < 500; ++i) {
    const double dt = dt_dist(rng);
    f.predict(dt);
    oracle.predict(dt);
    const double m = angle(rng);
    f.update(m);
    oracle.update(m);
    CHECK(std::abs(wrap_angle(f.heading() - oracle.theta)) < 1e-12);
    CHECK(std::abs(f.rate() - oracle.omega) < 1e-12);
    CHECK(std::abs(f.covariance()(0, 0) - oracle.p00) < 1e-12);
    CHECK(std::abs(f.covariance()(0, 1) - oracle.p01) < 1e-12);
    CHECK(std::abs(f.covariance()(1, 1) - oracle.p11) < 1e-12);
  }
}

TEST_CASE("HeadingFilter: near-infinite measurement variance leaves the state unchanged") {
  KalmanParams params;
  params.r = 1e12;
  HeadingFilter f(params);
  f.update(1.0);
  f.predict(1.0 / 30.0);
  const double before = f.heading();
  f.update(-2.0);
  CHECK(std::abs(f.heading() - before) < 1e-6);
}

TEST_CASE("HeadingFilter: innovation crosses the pi seam the short way") {
  HeadingFilter f;
  f.update(3.1);
  f.predict(1.0 / 30.0);
  f.update(-3.1);
  // Posterior moved across the seam (magnitude grows past 3.1), not back
  // through zero.
  CHECK(std::abs(f.heading()) > 3.1);
}

TEST_CASE("HeadingFilter: covariance stays symmetric PSD through random sequences") {
  std::mt19937 rng(61);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  std::uniform_real_distribution<double> dt_dist(0.0, 0.2);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  HeadingFilter f;
  f.update(angle(rng));
  for (int i = 0; i < 5000; ++i) {
    if (coin(rng) < 0.5) {
      f.predict(dt_dist(rng));
    } else {
      f.update(angle(rng));
    }
    check_psd(f.covariance());
    CHECK(f.heading() > -kPi);
    CHECK(f.heading() <= kPi);
  }
}

TEST_CASE("HeadingFilter: with q = 0, repeated identical measurements shrink the variance") {
  KalmanParams params;
  params.q = 0.0;
  HeadingFilter f(params);
  f.update(0.7);
  double prev = f.covariance()(0, 0);
  for (int i = 0; i < 100; ++i) {
    f.update(0.7);
    const double now = f.covariance()(0, 0);
    CHECK(now <= prev + 1e-15);
    prev = now;
  }
}

TEST_CASE("HeadingFilter: filtering a shifted sequence shifts the states by the same angle") {
  for (double phi : {0.5, -2.0, 3.0}) {
    HeadingFilter a;
    HeadingFilter b;
    std::mt19937 rng(63);
    std::uniform_real_distribution<double> seq(-kPi, kPi);
    std::uniform_real_distribution<double> step(0.01, 0.1);
    for (int i = 0; i < 200; ++i) {
      const double m = seq(rng);
      const double dt = step(rng);
      a.predict(dt);
      b.predict(dt);
      a.update(m);
      b.update(wrap_angle(m + phi));
      CHECK(std::abs(wrap_angle(b.heading() - a.heading() - phi)) < 1e-9);
      CHECK(std::abs(b.rate() - a.rate()) < 1e-9);
      CHECK((b.covariance() - a.covariance()).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("associate: simple gate behaviour") {
  TrackState track;
  track.track_id = 0;
  track.last_pelvis = {2.0, 0.0, -0.3};

  SUBCASE("close skeleton matches") {
    const auto res = associate({track}, {skeleton_at(2.1, 0.0)}, 0.75);
    REQUIRE(res.matches.size() == 1);
    CHECK(res.matches[0] == std::pair{0, 0});
    CHECK(res.unmatched_tracks.empty());
    CHECK(res.unmatched_skeletons.empty());
  }

  SUBCASE("distant skeleton is gated out") {
    const auto res = associate({track}, {skeleton_at(4.0, 0.0)}, 0.75);
    CHECK(res.matches.empty());
    CHECK(res.unmatched_tracks == std::vector<int>{0});
    CHECK(res.unmatched_skeletons == std::vector<int>{0});
  }

  SUBCASE("skeleton without a pelvis is skipped") {
    Skeleton3D no_pelvis;
    no_pelvis.set(JointId::Nose, {2.0, 0.0, 0.5});
    const auto res = associate({track}, {no_pelvis}, 0.75);
    CHECK(res.matches.empty());
    CHECK(res.skipped_skeletons == std::vector<int>{0});
    CHECK(res.unmatched_skeletons.empty());
  }
}

namespace {

// Independent greedy oracle over explicit pair lists.
std::vector<std::pair<int, int>> greedy_oracle(const std::vector<TrackState>& tracks,
                                               const std::vector<Skeleton3D>& skeletons,
                                               double gate) {
  struct Entry {
    double d;
    int ti, si;
  };
  std::vector<Entry> entries;
  for (int ti = 0; ti < static_cast<int>(tracks.size()); ++ti) {
    for (int si = 0; si < static_cast<int>(skeletons.size()); ++si) {
      const SocialPoint& p = *skeletons[si].joint(JointId::Pelvis);
      const double d = std::hypot(tracks[ti].last_pelvis.x - p.x, tracks[ti].last_pelvis.y - p.y);
      if (d <= gate) {
        entries.push_back({d, ti, si});
      }
    }
  }
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.d != b.d) return a.d < b.d;
    if (a.ti != b.ti) return a.ti < b.ti;
    return a.si < b.si;
  });
  std::vector<char> tu(tracks.size(), 0), su(skeletons.size(), 0);
  std::vector<std::pair<int, int>> out;
  for (const Entry& e : entries) {
    if (!tu[e.ti] && !su[e.si]) {
      tu[e.ti] = su[e.si] = 1;
      out.emplace_back(e.ti, e.si);
    }
  }
  return out;
}

double assignment_cost(const std::vector<TrackState>& tracks,
                       const std::vector<Skeleton3D>& skeletons,
                       const std::vector<std::pair<int, int>>& matches) {
  double total = 0.0;
  for (const auto& [ti, si] : matches) {
    const SocialPoint& p = *skeletons[si].joint(JointId::Pelvis);
    total += std::hypot(tracks[ti].last_pelvis.x - p.x, tracks[ti].last_pelvis.y - p.y);
  }
  return total;
}

}  // namespace

TEST_CASE("associate: 3x3 random instances match the greedy oracle, optimal when greedy is") {
  std::mt19937 rng(64);
  std::uniform_real_distribution<double> jitter(-0.3, 0.3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<TrackState> tracks(3);
    std::vector<Skeleton3D> skeletons;
    for (int i = 0; i < 3; ++i) {
      tracks[i].track_id = i;
      tracks[i].last_pelvis = {2.0 + i, 0.0, -0.3};
      skeletons.push_back(skeleton_at(2.0 + i + jitter(rng), jitter(rng)));
    }
    const auto got = associate(tracks, skeletons, 0.75).matches;
    const auto oracle = greedy_oracle(tracks, skeletons, 0.75);
    CHECK(got == oracle);

    // Exhaustive minimum-sum assignment over all full permutations.
    if (got.size() == 3) {
      std::array<int, 3> perm{0, 1, 2};
      double best = 1e18;
      do {
        std::vector<std::pair<int, int>> m;
        bool feasible = true;
        for (int ti = 0; ti < 3; ++ti) {
          const SocialPoint& p = *skeletons[perm[ti]].joint(JointId::Pelvis);
          if (std::hypot(tracks[ti].last_pelvis.x - p.x, tracks[ti].last_pelvis.y - p.y) > 0.75) {
            feasible = false;
            break;
          }
          m.emplace_back(ti, perm[ti]);
        }
        if (feasible) {
          best = std::min(best, assignment_cost(tracks, skeletons, m));
        }
      } while (std::next_permutation(perm.begin(), perm.end()));
      const double got_cost = assignment_cost(tracks, skeletons, got);
      if (std::abs(got_cost - best) < 1e-12) {
        CHECK(got_cost <= best + 1e-12);  // greedy happened to be optimal
      } else {
        CHECK(got_cost >= best);  // greedy is suboptimal but deterministic
      }
    }
  }
}

TEST_CASE("step_track: first observation initializes the filters to the measurement") {
  TrackState t;
  const auto sm = step_track(t, measurement(DirectionKind::Torso, 0.9),
                             measurement(DirectionKind::Gaze, -1.2), 0.0);
  CHECK(sm.torso.valid);
  CHECK(sm.torso.heading == doctest::Approx(0.9));
  CHECK(sm.gaze.heading == doctest::Approx(-1.2));
  CHECK(t.torso_filter.rate() == 0.0);
}

TEST_CASE("step_track: invalid measurements coast on the prediction") {
  TrackState t;
  const double omega = 0.8;
  const double dt = 1.0 / 30.0;
  ScalarKalmanOracle oracle;
  double time = 0.0;
  for (int i = 0; i < 60; ++i) {
    const double truth = wrap_angle(omega * time);
    step_track(t, measurement(DirectionKind::Torso, truth),
               measurement(DirectionKind::Gaze, truth), time);
    oracle.predict(i == 0 ? 0.0 : dt);
    oracle.update(truth);
    time += dt;
  }
  // Five dropped frames: prediction only.
  for (int i = 0; i < 5; ++i) {
    step_track(t, measurement(DirectionKind::Torso, 0.0, false),
               measurement(DirectionKind::Gaze, 0.0, false), time);
    oracle.predict(dt);
    time += dt;
  }
  const double truth = wrap_angle(omega * (time - dt));
  CHECK(std::abs(wrap_angle(t.torso_filter.heading() - truth)) < omega * (5.0 / 30.0) * 0.5);
  CHECK(std::abs(wrap_angle(t.torso_filter.heading() - oracle.theta)) < 1e-12);
  CHECK(std::abs(t.torso_filter.rate() - oracle.omega) < 1e-12);
}

TEST_CASE("Tracker: spawning, identity continuity and expiry") {
  Tracker tracker({}, {0.75, 3});
  double time = 0.0;
  const double dt = 1.0 / 30.0;

  auto outputs = tracker.process_frame({skeleton_at(2.0, 0.0)}, time);
  REQUIRE(outputs.size() == 1);
  CHECK(outputs[0].track_id == 0);

  // Same person slightly moved keeps the id; a far person spawns a new track.
  time += dt;
  outputs = tracker.process_frame({skeleton_at(2.05, 0.0), skeleton_at(4.0, 0.5)}, time);
  REQUIRE(outputs.size() == 2);
  CHECK(outputs[0].track_id == 0);
  CHECK(outputs[1].track_id == 1);
  CHECK(tracker.tracks().size() == 2);

  // Drop both people; tracks expire after 3 unseen frames.
  for (int i = 0; i < 4; ++i) {
    time += dt;
    outputs = tracker.process_frame({}, time);
    CHECK(outputs.empty());
  }
  CHECK(tracker.tracks().empty());

  // A new appearance gets a fresh id.
  time += dt;
  outputs = tracker.process_frame({skeleton_at(2.0, 0.0)}, time);
  REQUIRE(outputs.size() == 1);
  CHECK(outputs[0].track_id == 2);
}

TEST_CASE("Tracker: outputs are ordered by track id") {
  Tracker tracker({}, {});
  tracker.process_frame({skeleton_at(2.0, 0.0), skeleton_at(3.5, 0.5)}, 0.0);
  const auto outputs =
      tracker.process_frame({skeleton_at(3.5, 0.5), skeleton_at(2.0, 0.0)}, 1.0 / 30.0);
  REQUIRE(outputs.size() == 2);
  CHECK(outputs[0].track_id == 0);
  CHECK(outputs[1].track_id == 1);
  CHECK(outputs[0].skeleton_index == 1);
  CHECK(outputs[1].skeleton_index == 0);
}
