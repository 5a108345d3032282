#include "humanfov/pipeline.hpp"

namespace humanfov {

namespace {

EstimateRecord to_estimate_record(const DirectionEstimate& raw, const DirectionEstimate& smoothed) {
  EstimateRecord rec;
  rec.raw_valid = raw.valid;
  rec.raw_heading = raw.valid ? raw.heading : 0.0;
  rec.valid = smoothed.valid;
  rec.smoothed_heading = smoothed.valid ? smoothed.heading : 0.0;
  rec.quaternion = smoothed.valid ? smoothed.quaternion : UnitQuaternion{};
  return rec;
}

}  // namespace

Pipeline::Pipeline(const CameraIntrinsics& k, const PipelineConfig& cfg)
    : k_(k),
      cfg_(cfg),
      fov_(cfg.fov_config()),
      conv_(cfg.frame_convention()),
      tracker_(cfg.kalman, cfg.track) {}

std::vector<ResultRecord> Pipeline::process_frame(double timestamp,
                                                  const std::vector<Skeleton2D>& detections,
                                                  const DepthFrame& depth) {
  ++summary_.frames;
  summary_.detections += static_cast<int>(detections.size());

  std::vector<Skeleton3D> skeletons;
  skeletons.reserve(detections.size());
  for (const Skeleton2D& det : detections) {
    skeletons.push_back(lift_skeleton(det, depth, k_, conv_, cfg_.confidence_threshold,
                                      cfg_.sample_radius_px));
  }

  std::vector<ResultRecord> records;
  for (const Tracker::Output& out : tracker_.process_frame(skeletons, timestamp)) {
    const Skeleton3D& skel = skeletons[out.skeleton_index];
    ResultRecord rec;
    rec.timestamp = timestamp;
    rec.track_id = out.track_id;
    rec.joints = skel.joints;
    rec.torso = to_estimate_record(out.raw_torso, out.smoothed_torso);
    rec.gaze = to_estimate_record(out.raw_gaze, out.smoothed_gaze);
    if (out.smoothed_gaze.valid && skel.has(JointId::Pelvis)) {
      const SocialPoint& pelvis = *skel.joint(JointId::Pelvis);
      if (std::hypot(pelvis.x, pelvis.y) >= 1e-9) {
        const FovResult fr = sees_camera(out.smoothed_gaze, pelvis, fov_);
        rec.fov = {true, fr.inside, fr.angular_offset};
      }
    }
    if (rec.gaze.valid) {
      ++summary_.valid_gaze;
    }
    records.push_back(std::move(rec));
  }
  summary_.results += static_cast<int>(records.size());
  summary_.tracks_created = tracker_.tracks_created();
  return records;
}

PipelineSummary process_recording(const std::filesystem::path& recording_dir,
                                  const std::filesystem::path& output_jsonl,
                                  const PipelineConfig& cfg) {
  RecordingReader reader(recording_dir);
  Pipeline pipeline(reader.intrinsics(), cfg);
  ResultWriter writer(output_jsonl);
  while (auto frame = reader.next()) {
    const DepthFrame depth = reader.load_depth(*frame);
    for (const ResultRecord& rec : pipeline.process_frame(frame->timestamp, frame->detections,
                                                          depth)) {
      writer.write(rec);
    }
  }
  return pipeline.summary();
}

}  // namespace humanfov
