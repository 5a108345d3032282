#include "humanfov/tracking.hpp"

#include <algorithm>
#include <cmath>

namespace humanfov {

namespace {

DirectionEstimate estimate_from_filter(DirectionKind kind, const HeadingFilter& f) {
  DirectionEstimate e;
  e.kind = kind;
  if (!f.initialized()) {
    return e;
  }
  e.valid = true;
  e.heading = f.heading();
  e.direction = {std::cos(e.heading), std::sin(e.heading), 0.0};
  e.raw_normal = e.direction;
  e.quaternion = UnitQuaternion::from_yaw(e.heading);
  return e;
}

double pelvis_distance_xy(const SocialPoint& a, const SocialPoint& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

}  // namespace

void HeadingFilter::predict(double dt) {
  if (!initialized_ || dt <= 0.0) {
    return;
  }
  state_[0] = wrap_angle(state_[0] + state_[1] * dt);

  Eigen::Matrix2d f;
  f << 1.0, dt, 0.0, 1.0;
  const double dt2 = dt * dt;
  Eigen::Matrix2d q;
  q << params_.q * dt2 * dt / 3.0, params_.q * dt2 / 2.0,
       params_.q * dt2 / 2.0,      params_.q * dt;
  cov_ = f * cov_ * f.transpose() + q;
  cov_ = 0.5 * (cov_ + cov_.transpose().eval());
}

void HeadingFilter::update(double measured_heading) {
  if (!initialized_) {
    state_ << wrap_angle(measured_heading), 0.0;
    cov_ << params_.p0_heading, 0.0, 0.0, params_.p0_rate;
    initialized_ = true;
    return;
  }
  const double innovation = wrap_angle(measured_heading - state_[0]);
  const double s = cov_(0, 0) + params_.r;
  const Eigen::Vector2d gain(cov_(0, 0) / s, cov_(1, 0) / s);

  state_[0] = wrap_angle(state_[0] + gain[0] * innovation);
  state_[1] += gain[1] * innovation;

  // Joseph form keeps the covariance positive semidefinite.
  Eigen::Matrix2d a = Eigen::Matrix2d::Identity();
  a(0, 0) -= gain[0];
  a(1, 0) -= gain[1];
  cov_ = a * cov_ * a.transpose() + params_.r * gain * gain.transpose();
  cov_ = 0.5 * (cov_ + cov_.transpose().eval());
}

SmoothedEstimates step_track(TrackState& t, const DirectionEstimate& torso,
                             const DirectionEstimate& gaze, double timestamp) {
  const double dt = t.has_time ? std::max(0.0, timestamp - t.last_time) : 0.0;
  t.torso_filter.predict(dt);
  t.gaze_filter.predict(dt);
  if (torso.valid) {
    t.torso_filter.update(torso.heading);
  }
  if (gaze.valid) {
    t.gaze_filter.update(gaze.heading);
  }
  t.last_time = timestamp;
  t.has_time = true;
  return {estimate_from_filter(DirectionKind::Torso, t.torso_filter),
          estimate_from_filter(DirectionKind::Gaze, t.gaze_filter)};
}

Association associate(const std::vector<TrackState>& tracks,
                      const std::vector<Skeleton3D>& skeletons, double gate_m) {
  Association result;

  std::vector<char> skeleton_ok(skeletons.size(), 0);
  for (int si = 0; si < static_cast<int>(skeletons.size()); ++si) {
    if (skeletons[si].has(JointId::Pelvis)) {
      skeleton_ok[si] = 1;
    } else {
      result.skipped_skeletons.push_back(si);
    }
  }

  struct Candidate {
    double distance;
    int track;
    int skeleton;
  };
  std::vector<Candidate> candidates;
  for (int ti = 0; ti < static_cast<int>(tracks.size()); ++ti) {
    for (int si = 0; si < static_cast<int>(skeletons.size()); ++si) {
      if (!skeleton_ok[si]) {
        continue;
      }
      const double d =
          pelvis_distance_xy(tracks[ti].last_pelvis, *skeletons[si].joint(JointId::Pelvis));
      if (d <= gate_m) {
        candidates.push_back({d, ti, si});
      }
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    if (a.track != b.track) return a.track < b.track;
    return a.skeleton < b.skeleton;
  });

  std::vector<char> track_used(tracks.size(), 0);
  std::vector<char> skeleton_used(skeletons.size(), 0);
  for (const Candidate& c : candidates) {
    if (track_used[c.track] || skeleton_used[c.skeleton]) {
      continue;
    }
    track_used[c.track] = 1;
    skeleton_used[c.skeleton] = 1;
    result.matches.emplace_back(c.track, c.skeleton);
  }

  for (int ti = 0; ti < static_cast<int>(tracks.size()); ++ti) {
    if (!track_used[ti]) {
      result.unmatched_tracks.push_back(ti);
    }
  }
  for (int si = 0; si < static_cast<int>(skeletons.size()); ++si) {
    if (skeleton_ok[si] && !skeleton_used[si]) {
      result.unmatched_skeletons.push_back(si);
    }
  }
  return result;
}

std::vector<Tracker::Output> Tracker::process_frame(const std::vector<Skeleton3D>& skeletons,
                                                    double timestamp) {
  const Association assoc = associate(tracks_, skeletons, params_.gate_m);
  std::vector<Output> out;

  auto emit = [&](TrackState& t, int skeleton_index) {
    const auto [torso, gaze] = estimate_orientation(skeletons[skeleton_index]);
    const SmoothedEstimates sm = step_track(t, torso, gaze, timestamp);
    t.last_pelvis = *skeletons[skeleton_index].joint(JointId::Pelvis);
    t.frames_since_seen = 0;
    out.push_back({t.track_id, skeleton_index, torso, gaze, sm.torso, sm.gaze});
  };

  for (const auto& [ti, si] : assoc.matches) {
    emit(tracks_[ti], si);
  }
  for (int si : assoc.unmatched_skeletons) {
    TrackState t;
    t.track_id = next_id_++;
    t.torso_filter = HeadingFilter(kalman_);
    t.gaze_filter = HeadingFilter(kalman_);
    emit(t, si);
    tracks_.push_back(std::move(t));
  }
  for (int ti : assoc.unmatched_tracks) {
    ++tracks_[ti].frames_since_seen;
  }
  std::erase_if(tracks_, [this](const TrackState& t) {
    return t.frames_since_seen > params_.expiry_frames;
  });

  std::sort(out.begin(), out.end(),
            [](const Output& a, const Output& b) { return a.track_id < b.track_id; });
  return out;
}

}  // namespace humanfov
