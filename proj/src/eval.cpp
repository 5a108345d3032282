#include "humanfov/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "humanfov/orientation.hpp"

namespace humanfov {

using nlohmann::json;

double mpjpe(const Skeleton3D& pred, const Skeleton3D& truth) {
  double sum = 0.0;
  int count = 0;
  for (int i = 0; i < kJointCount; ++i) {
    if (pred.joints[i].has_value() && truth.joints[i].has_value()) {
      sum += (pred.joints[i]->vec() - truth.joints[i]->vec()).norm();
      ++count;
    }
  }
  if (count == 0) {
    throw NoSharedJoints();
  }
  return sum / count;
}

double angular_error(double a, double b) { return std::abs(wrap_angle(a - b)); }

double angular_error(const DirectionEstimate& pred, double truth_heading) {
  if (!pred.valid) {
    throw InvalidEstimate();
  }
  return angular_error(pred.heading, truth_heading);
}

Skeleton3D apply_extrinsics(const GroundTruthFrame& frame, const Extrinsics& ext,
                            const FrameConvention& conv) {
  validate_extrinsics(ext);
  const Eigen::Matrix3d r = ext.camera_to_world.topLeftCorner<3, 3>();
  const Eigen::Vector3d t = ext.camera_to_world.topRightCorner<3, 1>();

  Skeleton3D out;
  out.timestamp = frame.timestamp;
  for (int i = 0; i < kJointCount; ++i) {
    if (!frame.joints[i].has_value()) {
      continue;
    }
    const Eigen::Vector3d cam = r.transpose() * (*frame.joints[i] - t);
    out.joints[i] = camera_to_social(CameraPoint{cam.x(), cam.y(), cam.z()}, conv);
  }
  return out;
}

std::vector<std::pair<int, int>> time_align(const std::vector<double>& result_ts,
                                            const std::vector<double>& truth_ts,
                                            double tolerance) {
  std::vector<std::pair<int, int>> matches;
  std::size_t j = 0;
  for (std::size_t i = 0; i < result_ts.size(); ++i) {
    if (j >= truth_ts.size()) {
      break;
    }
    while (j + 1 < truth_ts.size() &&
           std::abs(truth_ts[j + 1] - result_ts[i]) < std::abs(truth_ts[j] - result_ts[i])) {
      ++j;
    }
    if (std::abs(truth_ts[j] - result_ts[i]) <= tolerance) {
      matches.emplace_back(static_cast<int>(i), static_cast<int>(j));
      ++j;  // each ground-truth entry matches at most once
    }
  }
  return matches;
}

ErrorStats summarize(std::vector<double> values) {
  ErrorStats s;
  s.count = static_cast<int>(values.size());
  if (values.empty()) {
    return s;
  }
  std::sort(values.begin(), values.end());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / s.count;
  s.median = s.count % 2 == 1 ? values[s.count / 2]
                              : 0.5 * (values[s.count / 2 - 1] + values[s.count / 2]);
  const int rank = static_cast<int>(std::ceil(0.95 * s.count));
  s.p95 = values[std::clamp(rank - 1, 0, s.count - 1)];
  s.max = values.back();
  return s;
}

namespace {

json stats_to_json(const ErrorStats& s) {
  return json{{"count", s.count}, {"mean", s.mean},
              {"median", s.median}, {"p95", s.p95}, {"max", s.max}};
}

std::optional<double> truth_heading(const std::optional<double>& stored,
                                    const Skeleton3D& social, DirectionKind kind) {
  if (stored.has_value()) {
    return wrap_angle(*stored);
  }
  const auto [torso, gaze] = estimate_orientation(social);
  const DirectionEstimate& e = kind == DirectionKind::Torso ? torso : gaze;
  if (!e.valid) {
    return std::nullopt;
  }
  return e.heading;
}

}  // namespace

EvalReport evaluate(const std::vector<ResultRecord>& results, const GroundTruth& truth,
                    double tolerance, const FovConfig& fov, const FrameConvention& conv) {
  EvalReport report;

  std::vector<double> result_ts(results.size());
  for (std::size_t i = 0; i < results.size(); ++i) {
    result_ts[i] = results[i].timestamp;
  }
  std::vector<double> truth_ts(truth.frames.size());
  for (std::size_t i = 0; i < truth.frames.size(); ++i) {
    truth_ts[i] = truth.frames[i].timestamp;
  }

  const auto matches = time_align(result_ts, truth_ts, tolerance);
  report.matched = static_cast<int>(matches.size());
  report.unmatched_results = static_cast<int>(results.size()) - report.matched;
  report.unmatched_truth = static_cast<int>(truth.frames.size()) - report.matched;

  std::vector<double> torso_raw, torso_smoothed, gaze_raw, gaze_smoothed;
  double joint_error_sum = 0.0;
  int fov_agree = 0;

  for (const auto& [ri, gi] : matches) {
    const ResultRecord& rec = results[ri];
    const GroundTruthFrame& gt_frame = truth.frames[gi];
    const Skeleton3D gt_social = apply_extrinsics(gt_frame, truth.extrinsics, conv);

    for (int i = 0; i < kJointCount; ++i) {
      if (rec.joints[i].has_value() && gt_social.joints[i].has_value()) {
        const double d = (rec.joints[i]->vec() - gt_social.joints[i]->vec()).norm();
        report.per_joint[i].mean += d;
        report.per_joint[i].count += 1;
        joint_error_sum += d;
        ++report.mpjpe_count;
      }
    }

    const auto gt_torso = truth_heading(gt_frame.torso_heading, gt_social, DirectionKind::Torso);
    const auto gt_gaze = truth_heading(gt_frame.gaze_heading, gt_social, DirectionKind::Gaze);
    if (gt_torso.has_value()) {
      if (rec.torso.raw_valid) torso_raw.push_back(angular_error(rec.torso.raw_heading, *gt_torso));
      if (rec.torso.valid) {
        torso_smoothed.push_back(angular_error(rec.torso.smoothed_heading, *gt_torso));
      }
    }
    if (gt_gaze.has_value()) {
      if (rec.gaze.raw_valid) gaze_raw.push_back(angular_error(rec.gaze.raw_heading, *gt_gaze));
      if (rec.gaze.valid) {
        gaze_smoothed.push_back(angular_error(rec.gaze.smoothed_heading, *gt_gaze));
      }
    }

    // FOV decision agreement against the exact geometry.
    if (rec.fov.valid && gt_gaze.has_value() && gt_social.has(JointId::Pelvis)) {
      const SocialPoint pelvis = *gt_social.joint(JointId::Pelvis);
      if (std::hypot(pelvis.x, pelvis.y) >= 1e-9) {
        DirectionEstimate gt_dir;
        gt_dir.kind = DirectionKind::Gaze;
        gt_dir.valid = true;
        gt_dir.heading = *gt_gaze;
        gt_dir.direction = {std::cos(*gt_gaze), std::sin(*gt_gaze), 0.0};
        gt_dir.quaternion = UnitQuaternion::from_yaw(*gt_gaze);
        const FovResult gt_fov = sees_camera(gt_dir, pelvis, fov);
        ++report.fov_evaluated;
        if (gt_fov.inside == rec.fov.inside) {
          ++fov_agree;
        }
      }
    }
  }

  for (auto& je : report.per_joint) {
    if (je.count > 0) {
      je.mean /= je.count;
    }
  }
  report.mpjpe_mean = report.mpjpe_count > 0 ? joint_error_sum / report.mpjpe_count : 0.0;
  report.torso_raw = summarize(std::move(torso_raw));
  report.torso_smoothed = summarize(std::move(torso_smoothed));
  report.gaze_raw = summarize(std::move(gaze_raw));
  report.gaze_smoothed = summarize(std::move(gaze_smoothed));
  report.fov_accuracy =
      report.fov_evaluated > 0 ? static_cast<double>(fov_agree) / report.fov_evaluated : 0.0;
  return report;
}

json EvalReport::to_json() const {
  json joints = json::object();
  for (int i = 0; i < kJointCount; ++i) {
    if (per_joint[i].count > 0) {
      joints[std::string(joint_name(static_cast<JointId>(i)))] =
          json{{"count", per_joint[i].count}, {"mean_m", per_joint[i].mean}};
    }
  }
  return json{{"matched", matched},
              {"unmatched_results", unmatched_results},
              {"unmatched_truth", unmatched_truth},
              {"mpjpe_mean_m", mpjpe_mean},
              {"mpjpe_count", mpjpe_count},
              {"per_joint", joints},
              {"torso_heading_rad", json{{"raw", stats_to_json(torso_raw)},
                                         {"smoothed", stats_to_json(torso_smoothed)}}},
              {"gaze_heading_rad", json{{"raw", stats_to_json(gaze_raw)},
                                        {"smoothed", stats_to_json(gaze_smoothed)}}},
              {"fov", json{{"evaluated", fov_evaluated}, {"accuracy", fov_accuracy}}}};
}

std::string EvalReport::table() const {
  char buf[160];
  std::string out;
  auto row = [&](const char* fmt, auto... args) {
    std::snprintf(buf, sizeof(buf), fmt, args...);
    out += buf;
    out += '\n';
  };
  row("matched frames        %d", matched);
  row("unmatched results     %d", unmatched_results);
  row("unmatched truth       %d", unmatched_truth);
  row("MPJPE mean            %.4f m   (%d joint pairs)", mpjpe_mean, mpjpe_count);
  for (int i = 0; i < kJointCount; ++i) {
    if (per_joint[i].count > 0) {
      row("  %-12s        %.4f m   (%d)", std::string(joint_name(static_cast<JointId>(i))).c_str(),
          per_joint[i].mean, per_joint[i].count);
    }
  }
  auto angle_rows = [&](const char* label, const ErrorStats& s) {
    row("%s  mean %7.2f deg  median %7.2f deg  p95 %7.2f deg  (n=%d)", label,
        rad_to_deg(s.mean), rad_to_deg(s.median), rad_to_deg(s.p95), s.count);
  };
  angle_rows("torso raw     ", torso_raw);
  angle_rows("torso smoothed", torso_smoothed);
  angle_rows("gaze  raw     ", gaze_raw);
  angle_rows("gaze  smoothed", gaze_smoothed);
  row("FOV accuracy          %.4f     (%d evaluated)", fov_accuracy, fov_evaluated);
  return out;
}

void write_overlay(const std::vector<ResultRecord>& results, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot create overlay file: " + path.string());
  }
  for (const ResultRecord& rec : results) {
    const auto& pelvis = rec.joints[joint_index(JointId::Pelvis)];
    if (!pelvis.has_value()) {
      continue;
    }
    json arrows = json::array();
    if (rec.gaze.valid) {
      arrows.push_back(json{{"kind", "gaze"},
                            {"color", "red"},
                            {"direction", json::array({std::cos(rec.gaze.smoothed_heading),
                                                       std::sin(rec.gaze.smoothed_heading), 0.0})}});
    }
    if (rec.torso.valid) {
      arrows.push_back(json{{"kind", "torso"},
                            {"color", "green"},
                            {"direction", json::array({std::cos(rec.torso.smoothed_heading),
                                                       std::sin(rec.torso.smoothed_heading), 0.0})}});
    }
    out << json{{"timestamp", rec.timestamp},
                {"track_id", rec.track_id},
                {"origin", json::array({pelvis->x, pelvis->y, pelvis->z})},
                {"arrows", arrows}}
               .dump()
        << '\n';
  }
}

}  // namespace humanfov
