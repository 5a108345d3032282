#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "humanfov/orientation.hpp"

namespace humanfov {

struct KalmanParams {
  double q = 0.5;           // white-noise acceleration intensity, rad^2/s^3
  double r = 0.01;          // heading measurement variance, rad^2 (0.1 rad sigma)
  double p0_heading = 0.5;  // initial heading variance
  double p0_rate = 1.0;     // initial rate variance

  friend bool operator==(const KalmanParams&, const KalmanParams&) = default;
};

/// Constant-velocity Kalman filter on (heading, rate) with the innovation
/// wrapped to (-pi, pi], so updates cross the angle seam the short way.
/// Uninitialized until the first update; predict before that is a no-op.
class HeadingFilter {
 public:
  HeadingFilter() = default;
  explicit HeadingFilter(const KalmanParams& params) : params_(params) {}

  bool initialized() const { return initialized_; }
  double heading() const { return state_[0]; }
  double rate() const { return state_[1]; }
  const Eigen::Matrix2d& covariance() const { return cov_; }
  const KalmanParams& params() const { return params_; }

  /// theta <- wrap(theta + omega dt); P <- F P F' + Q(dt) with the
  /// white-noise-acceleration Q = q [[dt^3/3, dt^2/2], [dt^2/2, dt]].
  void predict(double dt);

  /// Measurement update with H = [1, 0]. The first-ever update initializes
  /// the state to the measurement with zero rate.
  void update(double measured_heading);

 private:
  KalmanParams params_{};
  bool initialized_ = false;
  Eigen::Vector2d state_ = Eigen::Vector2d::Zero();
  Eigen::Matrix2d cov_ = Eigen::Matrix2d::Zero();
};

struct TrackParams {
  double gate_m = 0.75;    // association gate on pelvis XY distance
  int expiry_frames = 30;  // drop a track after this many consecutive unseen frames

  friend bool operator==(const TrackParams&, const TrackParams&) = default;
};

/// Per-person identity with one heading filter each for torso and gaze.
struct TrackState {
  int track_id = -1;
  SocialPoint last_pelvis{};
  HeadingFilter torso_filter;
  HeadingFilter gaze_filter;
  int frames_since_seen = 0;
  double last_time = 0.0;
  bool has_time = false;
};

struct SmoothedEstimates {
  DirectionEstimate torso;
  DirectionEstimate gaze;
};

/// Advances both filters to `timestamp`, folds in whichever measurements are
/// valid (invalid ones are skipped so prediction coasts through profile
/// views), and rebuilds direction estimates from the filtered headings.
SmoothedEstimates step_track(TrackState& t, const DirectionEstimate& torso,
                             const DirectionEstimate& gaze, double timestamp);

struct Association {
  std::vector<std::pair<int, int>> matches;  // (track index, skeleton index)
  std::vector<int> unmatched_tracks;
  std::vector<int> unmatched_skeletons;
  std::vector<int> skipped_skeletons;  // skeletons without a pelvis
};

/// Greedy nearest-neighbour on pelvis XY distance, globally sorted by
/// distance; pairs beyond the gate stay unmatched.
Association associate(const std::vector<TrackState>& tracks,
                      const std::vector<Skeleton3D>& skeletons, double gate_m);

class Tracker {
 public:
  Tracker() = default;
  Tracker(const KalmanParams& kalman, const TrackParams& params)
      : kalman_(kalman), params_(params) {}

  struct Output {
    int track_id = -1;
    int skeleton_index = -1;
    DirectionEstimate raw_torso;
    DirectionEstimate raw_gaze;
    DirectionEstimate smoothed_torso;
    DirectionEstimate smoothed_gaze;
  };

  /// One frame: associate, smooth matched tracks, spawn tracks for unmatched
  /// skeletons, age and expire the rest. Outputs are ordered by track id.
  std::vector<Output> process_frame(const std::vector<Skeleton3D>& skeletons, double timestamp);

  const std::vector<TrackState>& tracks() const { return tracks_; }
  int tracks_created() const { return next_id_; }

 private:
  KalmanParams kalman_{};
  TrackParams params_{};
  std::vector<TrackState> tracks_;
  int next_id_ = 0;
};

}  // namespace humanfov
