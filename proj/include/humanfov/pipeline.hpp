#pragma once

#include <filesystem>
#include <vector>

#include "humanfov/config.hpp"
#include "humanfov/io.hpp"
#include "humanfov/tracking.hpp"

namespace humanfov {

struct PipelineSummary {
  int frames = 0;
  int detections = 0;
  int results = 0;
  int tracks_created = 0;
  int valid_gaze = 0;  // results with a valid smoothed gaze
};

/// Offline equivalent of the live perception stack: lift -> orientation ->
/// tracking/smoothing -> FOV, one frame at a time. Emits one result per
/// tracked person per frame; detections without a pelvis cannot be tracked
/// and produce no result.
class Pipeline {
 public:
  explicit Pipeline(const CameraIntrinsics& k, const PipelineConfig& cfg = {});

  std::vector<ResultRecord> process_frame(double timestamp,
                                          const std::vector<Skeleton2D>& detections,
                                          const DepthFrame& depth);

  const PipelineSummary& summary() const { return summary_; }

 private:
  CameraIntrinsics k_;
  PipelineConfig cfg_;
  FovConfig fov_;
  FrameConvention conv_;
  Tracker tracker_;
  PipelineSummary summary_{};
};

/// Runs a full recording through the pipeline, streaming results to
/// `output_jsonl` in frame order.
PipelineSummary process_recording(const std::filesystem::path& recording_dir,
                                  const std::filesystem::path& output_jsonl,
                                  const PipelineConfig& cfg = {});

}  // namespace humanfov
