#pragma once

#include <array>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "humanfov/fov.hpp"
#include "humanfov/orientation.hpp"
#include "humanfov/skeleton.hpp"

namespace humanfov {

// ---------------------------------------------------------------------------
// Errors

struct IoError : Error {
  using Error::Error;
};

struct BadMagic : IoError {
  explicit BadMagic(const std::string& got)
      : IoError("not a binary PGM (expected magic P5, got '" + got + "')") {}
};

struct BadMaxval : IoError {
  explicit BadMaxval(long got)
      : IoError("PGM maxval must be 65535 for 16-bit depth, got " + std::to_string(got)) {}
};

struct TruncatedData : IoError {
  TruncatedData(std::size_t expected, std::size_t got)
      : IoError("PGM data truncated: expected " + std::to_string(expected) + " bytes, got " +
                std::to_string(got)) {}
};

struct TrailingData : IoError {
  explicit TrailingData(std::size_t offset)
      : IoError("trailing data after PGM payload at byte " + std::to_string(offset)) {}
};

struct MalformedLine : IoError {
  MalformedLine(int line, const std::string& what)
      : IoError(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line(line) {}
  int line;
};

struct NonMonotonicTimestamp : IoError {
  NonMonotonicTimestamp(int line, double ts, double prev)
      : IoError("line " + std::to_string(line) + ": timestamp " + std::to_string(ts) +
                " does not increase over " + std::to_string(prev)),
        line(line) {}
  int line;
};

struct MissingDepthFile : IoError {
  explicit MissingDepthFile(const std::string& path)
      : IoError("referenced depth file does not exist: " + path) {}
};

struct NonRigidExtrinsics : IoError {
  explicit NonRigidExtrinsics(const std::string& what)
      : IoError("extrinsics rotation block is not rigid: " + what) {}
};

// ---------------------------------------------------------------------------
// 16-bit binary PGM depth images (P5, maxval 65535, big-endian samples)

DepthFrame read_pgm16(const std::filesystem::path& path);
void write_pgm16(const DepthFrame& frame, const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Camera intrinsics JSON: {"fx","fy","cx","cy","width","height"}

CameraIntrinsics intrinsics_from_json(const nlohmann::json& j);
nlohmann::json intrinsics_to_json(const CameraIntrinsics& k);
CameraIntrinsics read_intrinsics(const std::filesystem::path& path);
void write_intrinsics(const CameraIntrinsics& k, const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Recording: <root>/intrinsics.json, <root>/frames.jsonl, <root>/depth/NNNNNN.pgm

struct FrameRecord {
  double timestamp = 0.0;
  std::vector<Skeleton2D> detections;
  std::string depth_file;  // path relative to the recording root

  friend bool operator==(const FrameRecord&, const FrameRecord&) = default;
};

nlohmann::json frame_record_to_json(const FrameRecord& frame);
FrameRecord frame_record_from_json(const nlohmann::json& j, int line);

/// Streams a recording in timestamp order, validating monotonicity and depth
/// file existence as it goes. Depth frames load lazily via load_depth.
class RecordingReader {
 public:
  explicit RecordingReader(const std::filesystem::path& root);

  const CameraIntrinsics& intrinsics() const { return intrinsics_; }
  const std::filesystem::path& root() const { return root_; }

  std::optional<FrameRecord> next();
  DepthFrame load_depth(const FrameRecord& frame) const;

 private:
  std::filesystem::path root_;
  CameraIntrinsics intrinsics_{};
  std::ifstream frames_;
  int line_no_ = 0;
  double last_timestamp_ = 0.0;
  bool have_timestamp_ = false;
};

class RecordingWriter {
 public:
  RecordingWriter(const std::filesystem::path& root, const CameraIntrinsics& k);

  /// Appends one frame; the depth image is written to depth/NNNNNN.pgm.
  void add_frame(double timestamp, const std::vector<Skeleton2D>& detections,
                 const DepthFrame& depth);

  int frames_written() const { return index_; }

 private:
  std::filesystem::path root_;
  std::ofstream frames_;
  int index_ = 0;
};

// ---------------------------------------------------------------------------
// Result stream: one JSON object per (frame, track)

struct EstimateRecord {
  bool raw_valid = false;
  double raw_heading = 0.0;
  bool valid = false;  // smoothed estimate validity
  double smoothed_heading = 0.0;
  UnitQuaternion quaternion{};  // of the smoothed heading

  friend bool operator==(const EstimateRecord&, const EstimateRecord&) = default;
};

struct FovRecord {
  bool valid = false;
  bool inside = false;
  double offset = 0.0;

  friend bool operator==(const FovRecord&, const FovRecord&) = default;
};

struct ResultRecord {
  double timestamp = 0.0;
  int track_id = -1;
  std::array<std::optional<SocialPoint>, kJointCount> joints{};
  EstimateRecord torso;
  EstimateRecord gaze;
  FovRecord fov;

  friend bool operator==(const ResultRecord&, const ResultRecord&) = default;
};

nlohmann::json result_to_json(const ResultRecord& r);
ResultRecord result_from_json(const nlohmann::json& j, int line = 0);

class ResultWriter {
 public:
  explicit ResultWriter(const std::filesystem::path& path);
  void write(const ResultRecord& r);
  int written() const { return written_; }

 private:
  std::ofstream out_;
  int written_ = 0;
};

std::vector<ResultRecord> read_results(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Ground truth: <dir>/gt.jsonl + <dir>/extrinsics.json

struct GroundTruthFrame {
  double timestamp = 0.0;
  // World-frame joint positions in metres.
  std::array<std::optional<Eigen::Vector3d>, kJointCount> joints{};
  // Social-frame headings, when the source knows them exactly.
  std::optional<double> torso_heading;
  std::optional<double> gaze_heading;

  bool operator==(const GroundTruthFrame& o) const;
};

struct Extrinsics {
  Eigen::Matrix4d camera_to_world = Eigen::Matrix4d::Identity();
};

/// Throws NonRigidExtrinsics unless the rotation block is orthonormal within
/// 1e-6 with determinant +1.
void validate_extrinsics(const Extrinsics& ext);

struct GroundTruth {
  Extrinsics extrinsics;
  std::vector<GroundTruthFrame> frames;
};

GroundTruth read_ground_truth(const std::filesystem::path& dir);
void write_ground_truth(const GroundTruth& gt, const std::filesystem::path& dir);

}  // namespace humanfov
