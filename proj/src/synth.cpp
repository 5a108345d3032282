#include "humanfov/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace humanfov {

using nlohmann::json;

namespace {

constexpr double kCameraHeight = 1.25;       // static mount height, metres
constexpr std::uint16_t kBackgroundMm = 10000;
constexpr int kBodyDiskRadius = 8;           // rendered joint disk, pixels

// ---------------------------------------------------------------------------
// Deterministic noise, independent of platform library distributions.

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * kPi * u2);
    has_spare_ = true;
    return r * std::cos(2.0 * kPi * u2);
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// ---------------------------------------------------------------------------
// Body model: joint offsets from the ground point under the pelvis.
// height above the floor; lateral along the subject's left; forward along
// the facing direction. Nose and eyes follow the head yaw, the rest the
// torso yaw. The nose sits 8 cm below the eye line so its rendered disk
// cannot shadow the eye depth samples at the far end of the range.

struct JointOffset {
  JointId id;
  double height;
  double lateral;
  double forward;
  bool on_head;
  int swing_group;  // 0 none, +1/-1 arm phase, +2/-2 leg phase
};

constexpr std::array<JointOffset, 15> kUprightBody = {{
    {JointId::Nose, 1.54, 0.00, 0.08, true, 0},
    {JointId::EyeL, 1.62, 0.06, 0.07, true, 0},
    {JointId::EyeR, 1.62, -0.06, 0.07, true, 0},
    {JointId::ShoulderL, 1.45, 0.18, 0.00, false, 0},
    {JointId::ShoulderR, 1.45, -0.18, 0.00, false, 0},
    {JointId::ElbowL, 1.13, 0.21, 0.00, false, -1},
    {JointId::ElbowR, 1.13, -0.21, 0.00, false, 1},
    {JointId::WristL, 0.85, 0.23, 0.00, false, -1},
    {JointId::WristR, 0.85, -0.23, 0.00, false, 1},
    {JointId::HipL, 0.95, 0.14, 0.00, false, 0},
    {JointId::HipR, 0.95, -0.14, 0.00, false, 0},
    {JointId::KneeL, 0.50, 0.12, 0.00, false, 2},
    {JointId::KneeR, 0.50, -0.12, 0.00, false, -2},
    {JointId::AnkleL, 0.08, 0.12, 0.00, false, 2},
    {JointId::AnkleR, 0.08, -0.12, 0.00, false, -2},
}};

// Arms folded over the chest; the left forearm rests on top.
constexpr std::array<JointOffset, 15> kCrossedArmsBody = {{
    {JointId::Nose, 1.54, 0.00, 0.08, true, 0},
    {JointId::EyeL, 1.62, 0.06, 0.07, true, 0},
    {JointId::EyeR, 1.62, -0.06, 0.07, true, 0},
    {JointId::ShoulderL, 1.45, 0.18, 0.00, false, 0},
    {JointId::ShoulderR, 1.45, -0.18, 0.00, false, 0},
    {JointId::ElbowL, 1.10, 0.19, 0.10, false, 0},
    {JointId::ElbowR, 1.10, -0.19, 0.10, false, 0},
    {JointId::WristL, 1.24, -0.09, 0.18, false, 0},
    {JointId::WristR, 1.18, 0.09, 0.18, false, 0},
    {JointId::HipL, 0.95, 0.14, 0.00, false, 0},
    {JointId::HipR, 0.95, -0.14, 0.00, false, 0},
    {JointId::KneeL, 0.50, 0.12, 0.00, false, 2},
    {JointId::KneeR, 0.50, -0.12, 0.00, false, -2},
    {JointId::AnkleL, 0.08, 0.12, 0.00, false, 2},
    {JointId::AnkleR, 0.08, -0.12, 0.00, false, -2},
}};

struct BodyPose {
  double x = 0.0;       // ground position, social frame
  double y = 0.0;
  double torso_yaw = 0.0;
  double gaze_yaw = 0.0;
  double gait_phase = 0.0;
  bool arms_crossed = false;
};

double triangle(double t, double period, double lo, double hi) {
  const double s = std::fmod(t, period);
  const double half = 0.5 * period;
  return s < half ? lo + (hi - lo) * s / half : hi - (hi - lo) * (s - half) / half;
}

double smoothstep01(double u) {
  u = std::clamp(u, 0.0, 1.0);
  return u * u * (3.0 - 2.0 * u);
}

// Out-and-back line along +X between x0 and x1, facing the direction of
// travel with an instantaneous pivot at each end.
void out_and_back(double t, double x0, double x1, double speed, BodyPose* pose) {
  const double leg = (x1 - x0) / speed;
  const double s = std::fmod(t, 2.0 * leg);
  if (s < leg) {
    pose->x = x0 + speed * s;
    pose->torso_yaw = 0.0;
  } else {
    pose->x = x1 - speed * (s - leg);
    pose->torso_yaw = kPi;
  }
}

BodyPose pose_at(TrajectoryKind kind, double t) {
  BodyPose pose;
  pose.gait_phase = 2.0 * kPi * 1.7 * t;

  switch (kind) {
    case TrajectoryKind::WalkStraight:
      out_and_back(t, 2.0, 4.0, 1.0, &pose);
      pose.y = 0.0;
      pose.gaze_yaw = pose.torso_yaw;
      break;

    case TrajectoryKind::ArmsCrossedWalk:
      out_and_back(t, 2.0, 4.0, 0.9, &pose);
      pose.y = 0.0;
      pose.gaze_yaw = pose.torso_yaw;
      pose.arms_crossed = true;
      break;

    case TrajectoryKind::SuddenDodge: {
      out_and_back(t, 2.0, 4.0, 0.8, &pose);
      // One fast sidestep out and back per leg, dodging while still facing
      // the direction of travel.
      const double leg = 2.0 / 0.8;
      const double u = std::fmod(t, leg);
      double p = 0.0;
      if (u >= 0.9 && u < 1.25) {
        p = smoothstep01((u - 0.9) / 0.35);
      } else if (u >= 1.25 && u < 1.95) {
        p = 1.0;
      } else if (u >= 1.95 && u < 2.3) {
        p = 1.0 - smoothstep01((u - 1.95) / 0.35);
      }
      pose.y = 0.65 * p;
      pose.gaze_yaw = pose.torso_yaw;
      break;
    }

    case TrajectoryKind::ZigzagHeadTurns: {
      // Camera-facing zigzag: the subject strafes back and forth while
      // keeping the torso toward the camera and sweeping the head widely.
      pose.x = triangle(t, 6.4, 2.2, 3.8);
      pose.y = triangle(t + 0.8, 3.2, -0.6, 0.6);
      const double face_camera = std::atan2(-pose.y, -pose.x);
      pose.torso_yaw = face_camera + 0.12 * std::sin(2.0 * kPi * 0.2 * t);
      pose.gaze_yaw = pose.torso_yaw + 0.44 * std::sin(2.0 * kPi * 0.25 * t);
      break;
    }
  }
  pose.torso_yaw = wrap_angle(pose.torso_yaw);
  pose.gaze_yaw = wrap_angle(pose.gaze_yaw);
  return pose;
}

SocialPoint joint_position(const JointOffset& j, const BodyPose& pose, double bounce) {
  const double yaw = j.on_head ? pose.gaze_yaw : pose.torso_yaw;
  const double cy = std::cos(yaw);
  const double sy = std::sin(yaw);

  double forward = j.forward;
  if (!pose.arms_crossed || std::abs(j.swing_group) == 2) {
    if (j.swing_group == 1 || j.swing_group == -1) {
      const double amp = (j.id == JointId::WristL || j.id == JointId::WristR) ? 0.10 : 0.05;
      forward += amp * j.swing_group * std::sin(pose.gait_phase);
    } else if (j.swing_group == 2 || j.swing_group == -2) {
      const double amp = (j.id == JointId::AnkleL || j.id == JointId::AnkleR) ? 0.09 : 0.05;
      forward += amp * 0.5 * j.swing_group * std::sin(pose.gait_phase);
    }
  }

  // forward axis (cy, sy), left axis (-sy, cy)
  return {pose.x + forward * cy - j.lateral * sy,
          pose.y + forward * sy + j.lateral * cy,
          j.height + bounce - kCameraHeight};
}

void render_disk(DepthFrame* depth, int cu, int cv, std::uint16_t value, double sigma_mm,
                 Rng* rng) {
  const int r = kBodyDiskRadius;
  const int u0 = std::max(0, cu - r);
  const int u1 = std::min(depth->width - 1, cu + r);
  const int v0 = std::max(0, cv - r);
  const int v1 = std::min(depth->height - 1, cv + r);
  for (int vv = v0; vv <= v1; ++vv) {
    for (int uu = u0; uu <= u1; ++uu) {
      const int du = uu - cu;
      const int dv = vv - cv;
      if (du * du + dv * dv > r * r) {
        continue;
      }
      double d = value;
      if (sigma_mm > 0.0) {
        d += sigma_mm * rng->gaussian();
      }
      const auto mm = static_cast<std::uint16_t>(std::clamp(std::llround(d), 1LL, 65535LL));
      std::uint16_t& px = depth->at(uu, vv);
      px = std::min(px, mm);
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Names and JSON

const std::vector<std::string_view>& trajectory_names() {
  static const std::vector<std::string_view> names = {
      "walk_straight", "arms_crossed_walk", "sudden_dodge", "zigzag_head_turns"};
  return names;
}

std::string_view trajectory_name(TrajectoryKind kind) {
  return trajectory_names()[static_cast<std::size_t>(kind)];
}

std::optional<TrajectoryKind> trajectory_from_name(std::string_view name) {
  const auto& names = trajectory_names();
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) {
      return static_cast<TrajectoryKind>(i);
    }
  }
  return std::nullopt;
}

namespace {

[[noreturn]] void bad_scenario(const std::string& what) {
  throw BadConfig("scenario: " + what);
}

void reject_unknown_scenario_keys(const json& j, std::initializer_list<const char*> allowed,
                                  const std::string& prefix) {
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* a : allowed) {
      if (key == a) {
        known = true;
        break;
      }
    }
    if (!known) {
      bad_scenario("unknown key '" + prefix + key + "'");
    }
  }
}

}  // namespace

SyntheticScenario SyntheticScenario::from_json(const json& j) {
  if (!j.is_object()) {
    bad_scenario("top level must be a JSON object");
  }
  reject_unknown_scenario_keys(j, {"seed", "duration_s", "fps", "trajectory", "noise"}, "");
  SyntheticScenario sc;
  if (auto it = j.find("seed"); it != j.end()) {
    if (!it->is_number_unsigned() && !it->is_number_integer()) {
      bad_scenario("'seed' must be an integer");
    }
    sc.seed = it->get<std::uint64_t>();
  }
  if (auto it = j.find("duration_s"); it != j.end()) {
    if (!it->is_number()) bad_scenario("'duration_s' must be a number");
    sc.duration_s = it->get<double>();
  }
  if (auto it = j.find("fps"); it != j.end()) {
    if (!it->is_number()) bad_scenario("'fps' must be a number");
    sc.fps = it->get<double>();
  }
  if (auto it = j.find("trajectory"); it != j.end()) {
    if (!it->is_string()) bad_scenario("'trajectory' must be a string");
    const auto kind = trajectory_from_name(it->get<std::string>());
    if (!kind.has_value()) {
      std::string options;
      for (std::string_view n : trajectory_names()) {
        options += options.empty() ? "" : ", ";
        options += n;
      }
      bad_scenario("unknown trajectory '" + it->get<std::string>() + "'; valid options: " +
                   options);
    }
    sc.trajectory = *kind;
  }
  if (auto it = j.find("noise"); it != j.end()) {
    if (!it->is_object()) bad_scenario("'noise' must be an object");
    reject_unknown_scenario_keys(*it, {"sigma_px", "sigma_mm", "dropout"}, "noise.");
    const auto noise_number = [&](const char* key, double fallback) {
      auto n = it->find(key);
      if (n == it->end()) return fallback;
      if (!n->is_number()) bad_scenario(std::string("'noise.") + key + "' must be a number");
      return n->get<double>();
    };
    sc.noise.sigma_px = noise_number("sigma_px", sc.noise.sigma_px);
    sc.noise.sigma_mm = noise_number("sigma_mm", sc.noise.sigma_mm);
    sc.noise.dropout = noise_number("dropout", sc.noise.dropout);
  }
  if (sc.duration_s <= 0.0) bad_scenario("'duration_s' must be > 0");
  if (sc.fps <= 0.0) bad_scenario("'fps' must be > 0");
  if (sc.noise.sigma_px < 0.0 || sc.noise.sigma_mm < 0.0) {
    bad_scenario("noise sigmas must be >= 0");
  }
  if (sc.noise.dropout < 0.0 || sc.noise.dropout > 1.0) {
    bad_scenario("'noise.dropout' must be in [0, 1]");
  }
  return sc;
}

SyntheticScenario SyntheticScenario::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw BadConfig("scenario: cannot open file " + path.string());
  }
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) {
    throw BadConfig("scenario: file is not valid JSON: " + path.string());
  }
  return from_json(j);
}

json SyntheticScenario::to_json() const {
  return json{{"seed", seed},
              {"duration_s", duration_s},
              {"fps", fps},
              {"trajectory", std::string(trajectory_name(trajectory))},
              {"noise", json{{"sigma_px", noise.sigma_px},
                             {"sigma_mm", noise.sigma_mm},
                             {"dropout", noise.dropout}}}};
}

// ---------------------------------------------------------------------------
// Scene generation

SyntheticScene::SyntheticScene(const SyntheticScenario& scenario, const CameraIntrinsics& k)
    : scenario_(scenario), k_(k) {
  frame_count_ = static_cast<int>(std::llround(scenario_.duration_s * scenario_.fps));
}

Extrinsics SyntheticScene::extrinsics() const {
  Extrinsics ext;
  ext.camera_to_world << 0, 0, 1, 0,
                        -1, 0, 0, 0,
                         0, -1, 0, kCameraHeight,
                         0, 0, 0, 1;
  return ext;
}

SynthFrame SyntheticScene::frame(int index) const {
  const double t = static_cast<double>(index) / scenario_.fps;
  const BodyPose pose = pose_at(scenario_.trajectory, t);
  const double bounce = 0.015 * std::sin(2.0 * pose.gait_phase);
  const auto& body = pose.arms_crossed ? kCrossedArmsBody : kUprightBody;

  Rng rng(splitmix64(scenario_.seed ^ splitmix64(static_cast<std::uint64_t>(index) + 1)));

  SynthFrame out;
  out.timestamp = t;
  out.depth = DepthFrame::filled(k_.width, k_.height, kBackgroundMm, t);
  out.truth.timestamp = t;
  out.truth.torso_heading = pose.torso_yaw;
  out.truth.gaze_heading = pose.gaze_yaw;

  Skeleton2D detection;
  detection.timestamp = t;
  detection.confidence = 0.99;

  for (const JointOffset& jo : body) {
    const SocialPoint social = joint_position(jo, pose, bounce);
    out.truth.joints[joint_index(jo.id)] =
        Eigen::Vector3d(social.x, social.y, social.z + kCameraHeight);

    const CameraPoint cam = social_to_camera(social);
    if (cam.z <= 0.0) {
      continue;
    }
    const PixelDepth px = project(cam, k_);
    if (!k_.contains(px.u, px.v)) {
      continue;
    }
    const auto mm = static_cast<std::uint16_t>(
        std::clamp(std::llround(px.depth_mm), 1LL, 65535LL));
    render_disk(&out.depth, static_cast<int>(std::llround(px.u)),
                static_cast<int>(std::llround(px.v)), mm, scenario_.noise.sigma_mm, &rng);

    if (scenario_.noise.dropout > 0.0 && rng.uniform() < scenario_.noise.dropout) {
      continue;
    }
    Joint2D j2{px.u, px.v, 0.95};
    if (scenario_.noise.sigma_px > 0.0) {
      j2.u += scenario_.noise.sigma_px * rng.gaussian();
      j2.v += scenario_.noise.sigma_px * rng.gaussian();
    }
    detection.set(jo.id, j2);
  }

  // Exact derived joints for the ground truth.
  const auto mid = [&](JointId a, JointId b) {
    return Eigen::Vector3d(0.5 * (*out.truth.joints[joint_index(a)] +
                                  *out.truth.joints[joint_index(b)]));
  };
  out.truth.joints[joint_index(JointId::Pelvis)] = mid(JointId::HipL, JointId::HipR);
  out.truth.joints[joint_index(JointId::Neck)] = mid(JointId::ShoulderL, JointId::ShoulderR);

  if (detection.present_count() > 0) {
    out.detections.push_back(std::move(detection));
  }
  return out;
}

void generate(const SyntheticScenario& scenario, const CameraIntrinsics& k,
              const std::filesystem::path& out_dir) {
  SyntheticScene scene(scenario, k);
  RecordingWriter writer(out_dir, k);
  GroundTruth gt;
  gt.extrinsics = scene.extrinsics();
  gt.frames.reserve(static_cast<std::size_t>(scene.frame_count()));
  for (int i = 0; i < scene.frame_count(); ++i) {
    SynthFrame f = scene.frame(i);
    writer.add_frame(f.timestamp, f.detections, f.depth);
    gt.frames.push_back(std::move(f.truth));
  }
  write_ground_truth(gt, out_dir);
}

}  // namespace humanfov
