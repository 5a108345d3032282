#include "humanfov/io.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>

namespace humanfov {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// --- strict JSON helpers ----------------------------------------------------

[[noreturn]] void fail_line(int line, const std::string& what) {
  throw MalformedLine(line, what);
}

void require_object(const json& j, const char* what, int line) {
  if (!j.is_object()) {
    fail_line(line, std::string(what) + " must be a JSON object");
  }
}

void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed,
                         const char* context, int line) {
  for (const auto& [key, value] : j.items()) {
    if (std::find_if(allowed.begin(), allowed.end(),
                     [&](const char* a) { return key == a; }) == allowed.end()) {
      fail_line(line, std::string("unknown key '") + key + "' in " + context);
    }
  }
}

double get_number(const json& j, const char* key, const char* context, int line) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_number()) {
    fail_line(line, std::string(context) + " needs numeric field '" + key + "'");
  }
  return it->get<double>();
}

Eigen::Vector3d get_vec3(const json& j, const std::string& what, int line) {
  if (!j.is_array() || j.size() != 3 || !j[0].is_number() || !j[1].is_number() ||
      !j[2].is_number()) {
    fail_line(line, what + " must be an array of 3 numbers");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json vec3_json(double x, double y, double z) { return json::array({x, y, z}); }

// --- PGM token scanning -------------------------------------------------

// Whitespace-delimited header token; '#' starts a comment running to end of line.
std::string pgm_token(std::istream& in) {
  std::string tok;
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') {
        c = in.get();
      }
    } else if (std::isspace(c)) {
      c = in.get();
    } else {
      break;
    }
  }
  while (c != EOF && !std::isspace(c) && c != '#') {
    tok.push_back(static_cast<char>(c));
    c = in.get();
  }
  if (c != EOF) {
    in.unget();
  }
  return tok;
}

long pgm_number(std::istream& in, const char* what) {
  const std::string tok = pgm_token(in);
  if (tok.empty() || !std::all_of(tok.begin(), tok.end(),
                                  [](unsigned char ch) { return std::isdigit(ch); })) {
    throw IoError(std::string("PGM header: bad ") + what + " '" + tok + "'");
  }
  return std::stol(tok);
}

// --- line-oriented JSONL reading ------------------------------------------

json parse_line(const std::string& line, int line_no) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded()) {
    fail_line(line_no, "not valid JSON");
  }
  return j;
}

std::ifstream open_input(const fs::path& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError(std::string("cannot open ") + what + " file: " + path.string());
  }
  return in;
}

std::ofstream open_output(const fs::path& path, const char* what) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError(std::string("cannot create ") + what + " file: " + path.string());
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// PGM16

DepthFrame read_pgm16(const fs::path& path) {
  std::ifstream in = open_input(path, "PGM");

  const std::string magic = pgm_token(in);
  if (magic != "P5") {
    throw BadMagic(magic);
  }
  const long width = pgm_number(in, "width");
  const long height = pgm_number(in, "height");
  const long maxval = pgm_number(in, "maxval");
  if (maxval != 65535) {
    throw BadMaxval(maxval);
  }
  if (width <= 0 || height <= 0 || width * height > 100'000'000L) {
    throw IoError("PGM header: implausible dimensions " + std::to_string(width) + "x" +
                  std::to_string(height));
  }
  // Exactly one whitespace byte separates the header from the raster.
  const int sep = in.get();
  if (sep == EOF || !std::isspace(sep)) {
    throw TruncatedData(1, 0);
  }

  DepthFrame frame;
  frame.width = static_cast<int>(width);
  frame.height = static_cast<int>(height);
  const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  std::vector<unsigned char> raw(count * 2);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  const std::size_t got = static_cast<std::size_t>(in.gcount());
  if (got != raw.size()) {
    throw TruncatedData(raw.size(), got);
  }
  if (in.get() != EOF) {
    throw TrailingData(static_cast<std::size_t>(in.tellg()) - 1);
  }

  frame.data.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    frame.data[i] = static_cast<std::uint16_t>((raw[2 * i] << 8) | raw[2 * i + 1]);
  }
  return frame;
}

void write_pgm16(const DepthFrame& frame, const fs::path& path) {
  if (frame.data.size() !=
      static_cast<std::size_t>(frame.width) * static_cast<std::size_t>(frame.height)) {
    throw IoError("depth frame data length does not match its dimensions");
  }
  std::ofstream out = open_output(path, "PGM");
  out << "P5\n" << frame.width << ' ' << frame.height << "\n65535\n";
  std::vector<unsigned char> raw(frame.data.size() * 2);
  for (std::size_t i = 0; i < frame.data.size(); ++i) {
    raw[2 * i] = static_cast<unsigned char>(frame.data[i] >> 8);
    raw[2 * i + 1] = static_cast<unsigned char>(frame.data[i] & 0xff);
  }
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!out) {
    throw IoError("failed writing PGM file: " + path.string());
  }
}

// ---------------------------------------------------------------------------
// Intrinsics

CameraIntrinsics intrinsics_from_json(const json& j) {
  require_object(j, "intrinsics", 0);
  reject_unknown_keys(j, {"fx", "fy", "cx", "cy", "width", "height"}, "intrinsics", 0);
  CameraIntrinsics k;
  k.fx = get_number(j, "fx", "intrinsics", 0);
  k.fy = get_number(j, "fy", "intrinsics", 0);
  k.cx = get_number(j, "cx", "intrinsics", 0);
  k.cy = get_number(j, "cy", "intrinsics", 0);
  k.width = static_cast<int>(get_number(j, "width", "intrinsics", 0));
  k.height = static_cast<int>(get_number(j, "height", "intrinsics", 0));
  if (!k.valid()) {
    throw IoError("intrinsics violate fx,fy > 0 and 0 < cx,cy < width,height");
  }
  return k;
}

json intrinsics_to_json(const CameraIntrinsics& k) {
  return json{{"fx", k.fx}, {"fy", k.fy}, {"cx", k.cx},
              {"cy", k.cy}, {"width", k.width}, {"height", k.height}};
}

CameraIntrinsics read_intrinsics(const fs::path& path) {
  std::ifstream in = open_input(path, "intrinsics");
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) {
    throw IoError("intrinsics file is not valid JSON: " + path.string());
  }
  return intrinsics_from_json(j);
}

void write_intrinsics(const CameraIntrinsics& k, const fs::path& path) {
  std::ofstream out = open_output(path, "intrinsics");
  out << intrinsics_to_json(k).dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Frame records

json frame_record_to_json(const FrameRecord& frame) {
  json detections = json::array();
  for (const Skeleton2D& det : frame.detections) {
    json joints = json::object();
    for (int i = 0; i < kCocoJointCount; ++i) {
      const auto& j2 = det.joints[i];
      if (j2.has_value()) {
        joints[std::string(joint_name(static_cast<JointId>(i)))] =
            json::array({j2->u, j2->v, j2->confidence});
      }
    }
    detections.push_back(json{{"confidence", det.confidence}, {"joints", joints}});
  }
  return json{{"timestamp", frame.timestamp},
              {"depth_file", frame.depth_file},
              {"detections", detections}};
}

FrameRecord frame_record_from_json(const json& j, int line) {
  require_object(j, "frame", line);
  reject_unknown_keys(j, {"timestamp", "depth_file", "detections"}, "frame", line);
  FrameRecord frame;
  frame.timestamp = get_number(j, "timestamp", "frame", line);

  auto df = j.find("depth_file");
  if (df == j.end() || !df->is_string()) {
    fail_line(line, "frame needs string field 'depth_file'");
  }
  frame.depth_file = df->get<std::string>();

  auto dets = j.find("detections");
  if (dets == j.end() || !dets->is_array()) {
    fail_line(line, "frame needs array field 'detections'");
  }
  for (const json& d : *dets) {
    require_object(d, "detection", line);
    reject_unknown_keys(d, {"confidence", "joints"}, "detection", line);
    Skeleton2D det;
    det.timestamp = frame.timestamp;
    det.confidence = get_number(d, "confidence", "detection", line);
    if (det.confidence < 0.0 || det.confidence > 1.0) {
      fail_line(line, "detection confidence outside [0, 1]");
    }
    auto joints = d.find("joints");
    if (joints == d.end() || !joints->is_object()) {
      fail_line(line, "detection needs object field 'joints'");
    }
    for (const auto& [name, value] : joints->items()) {
      const auto id = joint_from_name(name);
      if (!id.has_value() || is_derived(*id)) {
        fail_line(line, "unknown joint name '" + name + "'");
      }
      if (!value.is_array() || value.size() != 3 || !value[0].is_number() ||
          !value[1].is_number() || !value[2].is_number()) {
        fail_line(line, "joint '" + name + "' must be [u, v, confidence]");
      }
      Joint2D j2{value[0].get<double>(), value[1].get<double>(), value[2].get<double>()};
      if (j2.confidence < 0.0 || j2.confidence > 1.0) {
        fail_line(line, "joint '" + name + "' confidence outside [0, 1]");
      }
      det.set(*id, j2);
    }
    frame.detections.push_back(std::move(det));
  }
  return frame;
}

// ---------------------------------------------------------------------------
// RecordingReader / RecordingWriter

RecordingReader::RecordingReader(const fs::path& root) : root_(root) {
  intrinsics_ = read_intrinsics(root_ / "intrinsics.json");
  frames_ = open_input(root_ / "frames.jsonl", "frames.jsonl");
}

std::optional<FrameRecord> RecordingReader::next() {
  std::string line;
  if (!std::getline(frames_, line)) {
    return std::nullopt;
  }
  ++line_no_;
  FrameRecord frame = frame_record_from_json(parse_line(line, line_no_), line_no_);
  if (have_timestamp_ && frame.timestamp <= last_timestamp_) {
    throw NonMonotonicTimestamp(line_no_, frame.timestamp, last_timestamp_);
  }
  last_timestamp_ = frame.timestamp;
  have_timestamp_ = true;
  if (!fs::exists(root_ / frame.depth_file)) {
    throw MissingDepthFile((root_ / frame.depth_file).string());
  }
  return frame;
}

DepthFrame RecordingReader::load_depth(const FrameRecord& frame) const {
  DepthFrame depth = read_pgm16(root_ / frame.depth_file);
  if (depth.width != intrinsics_.width || depth.height != intrinsics_.height) {
    throw IoError("depth file " + frame.depth_file + " is " + std::to_string(depth.width) + "x" +
                  std::to_string(depth.height) + " but intrinsics expect " +
                  std::to_string(intrinsics_.width) + "x" + std::to_string(intrinsics_.height));
  }
  depth.timestamp = frame.timestamp;
  return depth;
}

RecordingWriter::RecordingWriter(const fs::path& root, const CameraIntrinsics& k) : root_(root) {
  fs::create_directories(root_ / "depth");
  write_intrinsics(k, root_ / "intrinsics.json");
  frames_ = open_output(root_ / "frames.jsonl", "frames.jsonl");
}

void RecordingWriter::add_frame(double timestamp, const std::vector<Skeleton2D>& detections,
                                const DepthFrame& depth) {
  char name[32];
  std::snprintf(name, sizeof(name), "%06d.pgm", index_);
  FrameRecord frame;
  frame.timestamp = timestamp;
  frame.detections = detections;
  frame.depth_file = std::string("depth/") + name;
  write_pgm16(depth, root_ / frame.depth_file);
  frames_ << frame_record_to_json(frame).dump() << '\n';
  ++index_;
}

// ---------------------------------------------------------------------------
// Results

namespace {

json estimate_to_json(const EstimateRecord& e) {
  json j{{"raw_valid", e.raw_valid}, {"valid", e.valid}};
  if (e.raw_valid) {
    j["raw_heading"] = e.raw_heading;
  }
  if (e.valid) {
    j["smoothed_heading"] = e.smoothed_heading;
    j["quaternion"] =
        json::array({e.quaternion.w, e.quaternion.x, e.quaternion.y, e.quaternion.z});
  }
  return j;
}

EstimateRecord estimate_from_json(const json& j, const char* context, int line) {
  require_object(j, context, line);
  reject_unknown_keys(j, {"raw_valid", "raw_heading", "valid", "smoothed_heading", "quaternion"},
                      context, line);
  EstimateRecord e;
  auto rv = j.find("raw_valid");
  auto v = j.find("valid");
  if (rv == j.end() || !rv->is_boolean() || v == j.end() || !v->is_boolean()) {
    fail_line(line, std::string(context) + " needs boolean 'raw_valid' and 'valid'");
  }
  e.raw_valid = rv->get<bool>();
  e.valid = v->get<bool>();
  if (e.raw_valid) {
    e.raw_heading = get_number(j, "raw_heading", context, line);
  }
  if (e.valid) {
    e.smoothed_heading = get_number(j, "smoothed_heading", context, line);
    auto q = j.find("quaternion");
    if (q == j.end() || !q->is_array() || q->size() != 4 || !(*q)[0].is_number() ||
        !(*q)[1].is_number() || !(*q)[2].is_number() || !(*q)[3].is_number()) {
      fail_line(line, std::string(context) + " needs 'quaternion' as [w, x, y, z]");
    }
    e.quaternion = {(*q)[0].get<double>(), (*q)[1].get<double>(), (*q)[2].get<double>(),
                    (*q)[3].get<double>()};
  }
  return e;
}

}  // namespace

json result_to_json(const ResultRecord& r) {
  json joints = json::object();
  for (int i = 0; i < kJointCount; ++i) {
    if (r.joints[i].has_value()) {
      const SocialPoint& p = *r.joints[i];
      joints[std::string(joint_name(static_cast<JointId>(i)))] = vec3_json(p.x, p.y, p.z);
    }
  }
  json fov{{"valid", r.fov.valid}};
  if (r.fov.valid) {
    fov["inside"] = r.fov.inside;
    fov["offset"] = r.fov.offset;
  }
  return json{{"timestamp", r.timestamp}, {"track_id", r.track_id},
              {"joints3d", joints},       {"torso", estimate_to_json(r.torso)},
              {"gaze", estimate_to_json(r.gaze)},
              {"fov", fov}};
}

ResultRecord result_from_json(const json& j, int line) {
  require_object(j, "result", line);
  reject_unknown_keys(j, {"timestamp", "track_id", "joints3d", "torso", "gaze", "fov"}, "result",
                      line);
  ResultRecord r;
  r.timestamp = get_number(j, "timestamp", "result", line);
  auto tid = j.find("track_id");
  if (tid == j.end() || !tid->is_number_integer()) {
    fail_line(line, "result needs integer field 'track_id'");
  }
  r.track_id = tid->get<int>();

  auto joints = j.find("joints3d");
  if (joints == j.end() || !joints->is_object()) {
    fail_line(line, "result needs object field 'joints3d'");
  }
  for (const auto& [name, value] : joints->items()) {
    const auto id = joint_from_name(name);
    if (!id.has_value()) {
      fail_line(line, "unknown joint name '" + name + "'");
    }
    const Eigen::Vector3d p = get_vec3(value, "joint '" + name + "'", line);
    r.joints[joint_index(*id)] = SocialPoint{p.x(), p.y(), p.z()};
  }

  auto torso = j.find("torso");
  auto gaze = j.find("gaze");
  if (torso == j.end() || gaze == j.end()) {
    fail_line(line, "result needs 'torso' and 'gaze' objects");
  }
  r.torso = estimate_from_json(*torso, "torso", line);
  r.gaze = estimate_from_json(*gaze, "gaze", line);

  auto fov = j.find("fov");
  if (fov == j.end() || !fov->is_object()) {
    fail_line(line, "result needs object field 'fov'");
  }
  reject_unknown_keys(*fov, {"valid", "inside", "offset"}, "fov", line);
  auto fvalid = fov->find("valid");
  if (fvalid == fov->end() || !fvalid->is_boolean()) {
    fail_line(line, "fov needs boolean field 'valid'");
  }
  r.fov.valid = fvalid->get<bool>();
  if (r.fov.valid) {
    auto inside = fov->find("inside");
    if (inside == fov->end() || !inside->is_boolean()) {
      fail_line(line, "fov needs boolean field 'inside'");
    }
    r.fov.inside = inside->get<bool>();
    r.fov.offset = get_number(*fov, "offset", "fov", line);
  }
  return r;
}

ResultWriter::ResultWriter(const fs::path& path) : out_(open_output(path, "results")) {}

void ResultWriter::write(const ResultRecord& r) {
  out_ << result_to_json(r).dump() << '\n';
  ++written_;
}

std::vector<ResultRecord> read_results(const fs::path& path) {
  std::ifstream in = open_input(path, "results");
  std::vector<ResultRecord> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    out.push_back(result_from_json(parse_line(line, line_no), line_no));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Ground truth

bool GroundTruthFrame::operator==(const GroundTruthFrame& o) const {
  if (timestamp != o.timestamp || torso_heading != o.torso_heading ||
      gaze_heading != o.gaze_heading) {
    return false;
  }
  for (int i = 0; i < kJointCount; ++i) {
    if (joints[i].has_value() != o.joints[i].has_value()) {
      return false;
    }
    if (joints[i].has_value() && *joints[i] != *o.joints[i]) {
      return false;
    }
  }
  return true;
}

void validate_extrinsics(const Extrinsics& ext) {
  const Eigen::Matrix3d r = ext.camera_to_world.topLeftCorner<3, 3>();
  const double ortho = (r * r.transpose() - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  if (ortho > 1e-6) {
    throw NonRigidExtrinsics("R R^T deviates from identity by " + std::to_string(ortho));
  }
  if (std::abs(r.determinant() - 1.0) > 1e-6) {
    throw NonRigidExtrinsics("determinant is " + std::to_string(r.determinant()));
  }
  const Eigen::RowVector4d bottom = ext.camera_to_world.row(3);
  if ((bottom - Eigen::RowVector4d(0, 0, 0, 1)).cwiseAbs().maxCoeff() > 1e-9) {
    throw NonRigidExtrinsics("bottom row is not [0, 0, 0, 1]");
  }
}

namespace {

json gt_frame_to_json(const GroundTruthFrame& f) {
  json joints = json::object();
  for (int i = 0; i < kJointCount; ++i) {
    if (f.joints[i].has_value()) {
      const Eigen::Vector3d& p = *f.joints[i];
      joints[std::string(joint_name(static_cast<JointId>(i)))] = vec3_json(p.x(), p.y(), p.z());
    }
  }
  json j{{"timestamp", f.timestamp}, {"joints", joints}};
  if (f.torso_heading.has_value()) {
    j["torso_heading"] = *f.torso_heading;
  }
  if (f.gaze_heading.has_value()) {
    j["gaze_heading"] = *f.gaze_heading;
  }
  return j;
}

GroundTruthFrame gt_frame_from_json(const json& j, int line) {
  require_object(j, "ground truth frame", line);
  reject_unknown_keys(j, {"timestamp", "joints", "torso_heading", "gaze_heading"},
                      "ground truth frame", line);
  GroundTruthFrame f;
  f.timestamp = get_number(j, "timestamp", "ground truth frame", line);
  auto joints = j.find("joints");
  if (joints == j.end() || !joints->is_object()) {
    fail_line(line, "ground truth frame needs object field 'joints'");
  }
  for (const auto& [name, value] : joints->items()) {
    const auto id = joint_from_name(name);
    if (!id.has_value()) {
      fail_line(line, "unknown joint name '" + name + "'");
    }
    f.joints[joint_index(*id)] = get_vec3(value, "joint '" + name + "'", line);
  }
  if (auto it = j.find("torso_heading"); it != j.end()) {
    if (!it->is_number()) {
      fail_line(line, "'torso_heading' must be a number");
    }
    f.torso_heading = it->get<double>();
  }
  if (auto it = j.find("gaze_heading"); it != j.end()) {
    if (!it->is_number()) {
      fail_line(line, "'gaze_heading' must be a number");
    }
    f.gaze_heading = it->get<double>();
  }
  return f;
}

}  // namespace

GroundTruth read_ground_truth(const fs::path& dir) {
  GroundTruth gt;

  std::ifstream ext_in = open_input(dir / "extrinsics.json", "extrinsics");
  json ext = json::parse(ext_in, nullptr, false);
  if (ext.is_discarded()) {
    throw IoError("extrinsics file is not valid JSON");
  }
  require_object(ext, "extrinsics", 0);
  reject_unknown_keys(ext, {"camera_to_world"}, "extrinsics", 0);
  auto mat = ext.find("camera_to_world");
  if (mat == ext.end() || !mat->is_array() || mat->size() != 16) {
    throw IoError("extrinsics needs 'camera_to_world' as 16 row-major numbers");
  }
  for (int rr = 0; rr < 4; ++rr) {
    for (int cc = 0; cc < 4; ++cc) {
      const nlohmann::json& cell = (*mat)[4 * rr + cc];
      if (!cell.is_number()) {
        throw IoError("extrinsics matrix entries must all be numbers");
      }
      gt.extrinsics.camera_to_world(rr, cc) = cell.get<double>();
    }
  }
  validate_extrinsics(gt.extrinsics);

  std::ifstream in = open_input(dir / "gt.jsonl", "ground truth");
  std::string line;
  int line_no = 0;
  double last_ts = 0.0;
  while (std::getline(in, line)) {
    ++line_no;
    GroundTruthFrame f = gt_frame_from_json(parse_line(line, line_no), line_no);
    if (line_no > 1 && f.timestamp <= last_ts) {
      throw NonMonotonicTimestamp(line_no, f.timestamp, last_ts);
    }
    last_ts = f.timestamp;
    gt.frames.push_back(std::move(f));
  }
  return gt;
}

void write_ground_truth(const GroundTruth& gt, const fs::path& dir) {
  fs::create_directories(dir);
  json mat = json::array();
  for (int rr = 0; rr < 4; ++rr) {
    for (int cc = 0; cc < 4; ++cc) {
      mat.push_back(gt.extrinsics.camera_to_world(rr, cc));
    }
  }
  std::ofstream ext = open_output(dir / "extrinsics.json", "extrinsics");
  ext << json{{"camera_to_world", mat}}.dump(2) << '\n';

  std::ofstream out = open_output(dir / "gt.jsonl", "ground truth");
  for (const GroundTruthFrame& f : gt.frames) {
    out << gt_frame_to_json(f).dump() << '\n';
  }
}

}  // namespace humanfov
