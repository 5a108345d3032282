// humanfov command line: process recordings, synthesize test scenes,
// evaluate results against ground truth.
//
// Exit codes: 0 success, 1 malformed input, 2 bad configuration/usage.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "humanfov/config.hpp"
#include "humanfov/eval.hpp"
#include "humanfov/pipeline.hpp"
#include "humanfov/synth.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitBadInput = 1;
constexpr int kExitBadConfig = 2;

struct ProcessArgs {
  std::string input;
  std::string output;
  std::string config;
  double fov_deg = 0.0;
  bool fov_set = false;
};

struct SynthArgs {
  std::string scenario;
  std::string out_dir;
  std::string intrinsics;
  std::uint64_t seed = 0;
  bool seed_set = false;
  double duration_s = 0.0;
  bool duration_set = false;
  std::string trajectory;
};

struct EvalArgs {
  std::string results;
  std::string gt_dir;
  std::string report;
  std::string overlay;
  double tolerance_s = 1.0 / 60.0;
  double fov_deg = 120.0;
};

int run_process(const ProcessArgs& args) {
  humanfov::PipelineConfig cfg;
  if (!args.config.empty()) {
    cfg = humanfov::PipelineConfig::load(args.config);
  }
  if (args.fov_set) {
    if (args.fov_deg <= 0.0 || args.fov_deg > 360.0) {
      throw humanfov::BadConfig("config: '--fov-deg' must be in (0, 360]");
    }
    cfg.fov_deg = args.fov_deg;
  }
  const humanfov::PipelineSummary s =
      humanfov::process_recording(args.input, args.output, cfg);
  const double gaze_pct = s.results > 0 ? 100.0 * s.valid_gaze / s.results : 0.0;
  std::printf("frames %d  detections %d  tracks %d  results %d  valid gaze %.1f%%\n", s.frames,
              s.detections, s.tracks_created, s.results, gaze_pct);
  return kExitOk;
}

int run_synth(const SynthArgs& args) {
  humanfov::SyntheticScenario scenario;
  if (!args.scenario.empty()) {
    scenario = humanfov::SyntheticScenario::load(args.scenario);
  }
  if (args.seed_set) {
    scenario.seed = args.seed;
  }
  if (args.duration_set) {
    if (args.duration_s <= 0.0) {
      throw humanfov::BadConfig("scenario: '--duration-s' must be > 0");
    }
    scenario.duration_s = args.duration_s;
  }
  if (!args.trajectory.empty()) {
    const auto kind = humanfov::trajectory_from_name(args.trajectory);
    if (!kind.has_value()) {
      std::string options;
      for (auto n : humanfov::trajectory_names()) {
        options += options.empty() ? "" : ", ";
        options += n;
      }
      throw humanfov::BadConfig("scenario: unknown trajectory '" + args.trajectory +
                                "'; valid options: " + options);
    }
    scenario.trajectory = *kind;
  }
  humanfov::CameraIntrinsics k = humanfov::CameraIntrinsics::default_720p();
  if (!args.intrinsics.empty()) {
    k = humanfov::read_intrinsics(args.intrinsics);
  }
  humanfov::generate(scenario, k, args.out_dir);
  const humanfov::SyntheticScene scene(scenario, k);
  std::printf("wrote %d frames (%s, seed %llu) to %s\n", scene.frame_count(),
              std::string(humanfov::trajectory_name(scenario.trajectory)).c_str(),
              static_cast<unsigned long long>(scenario.seed), args.out_dir.c_str());
  return kExitOk;
}

int run_eval(const EvalArgs& args) {
  const std::vector<humanfov::ResultRecord> results = humanfov::read_results(args.results);
  const humanfov::GroundTruth truth = humanfov::read_ground_truth(args.gt_dir);
  const humanfov::FovConfig fov{humanfov::deg_to_rad(args.fov_deg)};
  const humanfov::EvalReport report =
      humanfov::evaluate(results, truth, args.tolerance_s, fov);
  if (!args.report.empty()) {
    std::ofstream out(args.report, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw humanfov::IoError("cannot create report file: " + args.report);
    }
    out << report.to_json().dump(2) << '\n';
  }
  if (!args.overlay.empty()) {
    humanfov::write_overlay(results, args.overlay);
  }
  std::cout << report.table();
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"human 3D pose, orientation and field-of-view estimation"};
  app.require_subcommand(1);

  ProcessArgs process_args;
  CLI::App* process = app.add_subcommand("process", "run the pipeline on a recording");
  process->add_option("--input", process_args.input, "recording directory")->required();
  process->add_option("--output", process_args.output, "results JSONL path")->required();
  process->add_option("--config", process_args.config,
                      "pipeline config JSON file (defaults: confidence 0.5, radius 5 px, "
                      "fov 120 deg, kalman q 0.5 / r 0.01, gate 0.75 m, expiry 30 frames)");
  process->add_option("--fov-deg", process_args.fov_deg,
                      "horizontal FOV in degrees (default 120)")
      ->each([&](const std::string&) { process_args.fov_set = true; });

  SynthArgs synth_args;
  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic recording + ground truth");
  synth->add_option("--scenario", synth_args.scenario,
                    "scenario JSON file (defaults: seed 1, 5 s, 30 fps, walk_straight, no noise)");
  synth->add_option("--out", synth_args.out_dir, "output directory")->required();
  synth->add_option("--intrinsics", synth_args.intrinsics,
                    "camera intrinsics JSON (default: 1280x720, fx = fy = 911.5)");
  synth->add_option("--seed", synth_args.seed, "override the scenario seed (default 1)")
      ->each([&](const std::string&) { synth_args.seed_set = true; });
  synth->add_option("--duration-s", synth_args.duration_s,
                    "override the scenario duration (default 5 s)")
      ->each([&](const std::string&) { synth_args.duration_set = true; });
  synth->add_option("--trajectory", synth_args.trajectory,
                    "override the trajectory (walk_straight, arms_crossed_walk, sudden_dodge, "
                    "zigzag_head_turns)");

  EvalArgs eval_args;
  CLI::App* eval = app.add_subcommand("eval", "evaluate results against ground truth");
  eval->add_option("--results", eval_args.results, "results JSONL path")->required();
  eval->add_option("--gt", eval_args.gt_dir, "ground truth directory")->required();
  eval->add_option("--report", eval_args.report, "write the report JSON here");
  eval->add_option("--overlay", eval_args.overlay, "write per-frame plot overlay JSONL here");
  eval->add_option("--tolerance-s", eval_args.tolerance_s,
                   "time alignment tolerance in seconds (default 1/60)");
  eval->add_option("--fov-deg", eval_args.fov_deg,
                   "horizontal FOV in degrees for the agreement check (default 120)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitBadConfig;
  }

  try {
    if (process->parsed()) {
      return run_process(process_args);
    }
    if (synth->parsed()) {
      return run_synth(synth_args);
    }
    return run_eval(eval_args);
  } catch (const humanfov::BadConfig& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitBadConfig;
  } catch (const humanfov::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitBadInput;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitBadInput;
  }
}
