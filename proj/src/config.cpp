#include "humanfov/config.hpp"

#include <fstream>

namespace humanfov {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& what) { throw BadConfig("config: " + what); }

void reject_unknown(const json& j, std::initializer_list<const char*> allowed,
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
      bad("unknown key '" + prefix + key + "'");
    }
  }
}

double number_or(const json& j, const char* key, double fallback, const std::string& prefix) {
  auto it = j.find(key);
  if (it == j.end()) {
    return fallback;
  }
  if (!it->is_number()) {
    bad("'" + prefix + key + "' must be a number");
  }
  return it->get<double>();
}

}  // namespace

PipelineConfig PipelineConfig::from_json(const json& j) {
  if (!j.is_object()) {
    bad("top level must be a JSON object");
  }
  reject_unknown(j,
                 {"confidence_threshold", "sample_radius_px", "fov_deg", "kalman", "track",
                  "leveling"},
                 "");
  PipelineConfig cfg;
  cfg.confidence_threshold = number_or(j, "confidence_threshold", cfg.confidence_threshold, "");
  cfg.sample_radius_px = static_cast<int>(number_or(j, "sample_radius_px",
                                                    cfg.sample_radius_px, ""));
  cfg.fov_deg = number_or(j, "fov_deg", cfg.fov_deg, "");

  if (auto it = j.find("kalman"); it != j.end()) {
    if (!it->is_object()) {
      bad("'kalman' must be an object");
    }
    reject_unknown(*it, {"q", "r"}, "kalman.");
    cfg.kalman.q = number_or(*it, "q", cfg.kalman.q, "kalman.");
    cfg.kalman.r = number_or(*it, "r", cfg.kalman.r, "kalman.");
  }
  if (auto it = j.find("track"); it != j.end()) {
    if (!it->is_object()) {
      bad("'track' must be an object");
    }
    reject_unknown(*it, {"gate_m", "expiry_frames"}, "track.");
    cfg.track.gate_m = number_or(*it, "gate_m", cfg.track.gate_m, "track.");
    cfg.track.expiry_frames =
        static_cast<int>(number_or(*it, "expiry_frames", cfg.track.expiry_frames, "track."));
  }
  if (auto it = j.find("leveling"); it != j.end()) {
    if (!it->is_array() || it->size() != 4 || !(*it)[0].is_number() || !(*it)[1].is_number() ||
        !(*it)[2].is_number() || !(*it)[3].is_number()) {
      bad("'leveling' must be a quaternion [w, x, y, z]");
    }
    cfg.leveling = {(*it)[0].get<double>(), (*it)[1].get<double>(), (*it)[2].get<double>(),
                    (*it)[3].get<double>()};
    if (!cfg.leveling.is_unit()) {
      bad("'leveling' quaternion must have unit norm");
    }
  }

  if (cfg.confidence_threshold < 0.0 || cfg.confidence_threshold > 1.0) {
    bad("'confidence_threshold' must be in [0, 1]");
  }
  if (cfg.sample_radius_px < 0) {
    bad("'sample_radius_px' must be >= 0");
  }
  if (cfg.fov_deg <= 0.0 || cfg.fov_deg > 360.0) {
    bad("'fov_deg' must be in (0, 360]");
  }
  if (cfg.kalman.q < 0.0) {
    bad("'kalman.q' must be >= 0");
  }
  if (cfg.kalman.r <= 0.0) {
    bad("'kalman.r' must be > 0");
  }
  if (cfg.track.gate_m <= 0.0) {
    bad("'track.gate_m' must be > 0");
  }
  if (cfg.track.expiry_frames < 0) {
    bad("'track.expiry_frames' must be >= 0");
  }
  return cfg;
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw BadConfig("config: cannot open file " + path.string());
  }
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) {
    throw BadConfig("config: file is not valid JSON: " + path.string());
  }
  return from_json(j);
}

nlohmann::json PipelineConfig::to_json() const {
  return json{{"confidence_threshold", confidence_threshold},
              {"sample_radius_px", sample_radius_px},
              {"fov_deg", fov_deg},
              {"kalman", json{{"q", kalman.q}, {"r", kalman.r}}},
              {"track", json{{"gate_m", track.gate_m}, {"expiry_frames", track.expiry_frames}}},
              {"leveling", json::array({leveling.w, leveling.x, leveling.y, leveling.z})}};
}

}  // namespace humanfov
