#include "humanfov/skeleton.hpp"

#include <algorithm>
#include <cmath>

namespace humanfov {

namespace {

constexpr std::array<std::string_view, kJointCount> kJointNames = {
    "nose",       "eye.L",      "eye.R",   "ear.L",   "ear.R",
    "shoulder.L", "shoulder.R", "elbow.L", "elbow.R", "wrist.L",
    "wrist.R",    "hip.L",      "hip.R",   "knee.L",  "knee.R",
    "ankle.L",    "ankle.R",    "pelvis",  "neck",
};

}  // namespace

std::string_view joint_name(JointId id) { return kJointNames[joint_index(id)]; }

std::optional<JointId> joint_from_name(std::string_view name) {
  for (int i = 0; i < kJointCount; ++i) {
    if (kJointNames[i] == name) {
      return static_cast<JointId>(i);
    }
  }
  return std::nullopt;
}

int Skeleton2D::present_count() const {
  return static_cast<int>(std::count_if(joints.begin(), joints.end(),
                                        [](const auto& j) { return j.has_value(); }));
}

DepthFrame DepthFrame::filled(int width, int height, std::uint16_t value, double timestamp) {
  DepthFrame f;
  f.width = width;
  f.height = height;
  f.timestamp = timestamp;
  f.data.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), value);
  return f;
}

int Skeleton3D::present_count() const {
  return static_cast<int>(std::count_if(joints.begin(), joints.end(),
                                        [](const auto& j) { return j.has_value(); }));
}

std::vector<JointId> Skeleton3D::present() const {
  std::vector<JointId> out;
  for (int i = 0; i < kJointCount; ++i) {
    if (joints[i].has_value()) {
      out.push_back(static_cast<JointId>(i));
    }
  }
  return out;
}

std::optional<std::uint16_t> sample_depth(const DepthFrame& frame, int u, int v, int radius) {
  if (!frame.in_bounds(u, v)) {
    throw OutOfBounds(u, v);
  }
  if (radius < 0) {
    radius = 0;
  }
  const int r2 = radius * radius;
  const int u0 = std::max(0, u - radius);
  const int u1 = std::min(frame.width - 1, u + radius);
  const int v0 = std::max(0, v - radius);
  const int v1 = std::min(frame.height - 1, v + radius);

  std::uint16_t best = 0;
  bool found = false;
  for (int vv = v0; vv <= v1; ++vv) {
    const int dv = vv - v;
    for (int uu = u0; uu <= u1; ++uu) {
      const int du = uu - u;
      if (du * du + dv * dv > r2) {
        continue;
      }
      const std::uint16_t d = frame.at(uu, vv);
      if (d == 0) {
        continue;  // invalid pixel
      }
      if (!found || d < best) {
        best = d;
        found = true;
      }
    }
  }
  if (!found) {
    return std::nullopt;
  }
  return best;
}

Skeleton3D lift_skeleton(const Skeleton2D& kp, const DepthFrame& depth,
                         const CameraIntrinsics& k, const FrameConvention& conv,
                         double conf_threshold, int sample_radius) {
  Skeleton3D out;
  out.timestamp = kp.timestamp;

  for (int i = 0; i < kCocoJointCount; ++i) {
    const auto& j = kp.joints[i];
    if (!j.has_value() || j->confidence < conf_threshold) {
      continue;
    }
    if (!k.contains(j->u, j->v)) {
      continue;
    }
    // Depth sampling is pixel-grid bound; back-projection keeps full precision.
    const int su = std::clamp(static_cast<int>(std::llround(j->u)), 0, depth.width - 1);
    const int sv = std::clamp(static_cast<int>(std::llround(j->v)), 0, depth.height - 1);
    const auto sampled = sample_depth(depth, su, sv, sample_radius);
    if (!sampled.has_value()) {
      continue;
    }
    const CameraPoint cam = backproject(j->u, j->v, static_cast<double>(*sampled), k);
    out.joints[i] = camera_to_social(cam, conv);
  }

  if (out.has(JointId::HipL) && out.has(JointId::HipR)) {
    out.set(JointId::Pelvis, midpoint(*out.joint(JointId::HipL), *out.joint(JointId::HipR)));
  }
  if (out.has(JointId::ShoulderL) && out.has(JointId::ShoulderR)) {
    out.set(JointId::Neck,
            midpoint(*out.joint(JointId::ShoulderL), *out.joint(JointId::ShoulderR)));
  }
  return out;
}

}  // namespace humanfov
