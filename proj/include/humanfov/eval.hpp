#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "humanfov/fov.hpp"
#include "humanfov/io.hpp"

namespace humanfov {

struct NoSharedJoints : Error {
  NoSharedJoints() : Error("skeletons share no joints") {}
};

struct InvalidEstimate : Error {
  InvalidEstimate() : Error("direction estimate is not valid") {}
};

/// Mean Euclidean distance over the joints present in both skeletons.
double mpjpe(const Skeleton3D& pred, const Skeleton3D& truth);

/// Absolute wrapped angular difference, in [0, pi]. Symmetric.
double angular_error(double a, double b);
double angular_error(const DirectionEstimate& pred, double truth_heading);

/// Maps world-frame ground-truth joints into the social frame:
/// world -> camera via the inverse of camera-to-world, then camera_to_social.
Skeleton3D apply_extrinsics(const GroundTruthFrame& frame, const Extrinsics& ext,
                            const FrameConvention& conv = {});

/// Greedy nearest-timestamp matching over two timestamp-ordered streams.
/// Returns (result index, truth index) pairs; a truth entry is used at most
/// once and unmatched entries on either side are simply not paired.
std::vector<std::pair<int, int>> time_align(const std::vector<double>& result_ts,
                                            const std::vector<double>& truth_ts,
                                            double tolerance = 1.0 / 60.0);

struct ErrorStats {
  int count = 0;
  double mean = 0.0;
  double median = 0.0;
  double p95 = 0.0;
  double max = 0.0;
};

/// Nearest-rank percentiles over the given sample.
ErrorStats summarize(std::vector<double> values);

struct JointError {
  int count = 0;
  double mean = 0.0;
};

struct EvalReport {
  int matched = 0;
  int unmatched_results = 0;
  int unmatched_truth = 0;

  std::array<JointError, kJointCount> per_joint{};
  double mpjpe_mean = 0.0;  // mean over every shared joint distance
  int mpjpe_count = 0;

  ErrorStats torso_raw, torso_smoothed;
  ErrorStats gaze_raw, gaze_smoothed;

  int fov_evaluated = 0;
  double fov_accuracy = 0.0;

  nlohmann::json to_json() const;
  std::string table() const;
};

/// Compares a result stream against ground truth. Ground-truth headings come
/// from the gt stream when stored, otherwise they are derived by applying the
/// orientation chain to the exact ground-truth joints. Single-subject
/// evaluation: at most one result per ground-truth entry is matched.
EvalReport evaluate(const std::vector<ResultRecord>& results, const GroundTruth& truth,
                    double tolerance = 1.0 / 60.0, const FovConfig& fov = {},
                    const FrameConvention& conv = {});

/// Per-frame overlay for external plotting: the smoothed gaze arrow (red)
/// and torso arrow (green) anchored at the pelvis.
void write_overlay(const std::vector<ResultRecord>& results,
                   const std::filesystem::path& path);

}  // namespace humanfov
