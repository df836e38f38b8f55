#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "rovlock/bench/config.hpp"
#include "rovlock/bench/dataset.hpp"
#include "rovlock/bench/report.hpp"

using namespace rovlock;
using namespace rovlock::bench;
namespace fs = std::filesystem;

namespace {

std::string frames_csv(const RunLog& log) {
  std::string out =
      "frame,t,status,confidence,x,y,w,h,true_x,true_y,true_w,true_h,dx,dy,ds,dpsi,"
      "u_x,u_y,u_z,u_psi,rov_x,rov_y,rov_z,rov_psi\n";
  for (const auto& f : log.frames) {
    const auto& p = f.state.position;
    out += fmt::format("{},{:.4f},{},{:.4f},{:.3f},{:.3f},{:.3f},{:.3f},{:.3f},{:.3f},{:.3f},{:.3f},"
                       "{:.3f},{:.3f},{:.3f},{:.5f},{:.5f},{:.5f},{:.5f},{:.5f},{:.5f},{:.5f},{:.5f},{:.5f}\n",
                       f.index, f.t, f.status == TrackStatus::Lost ? "lost" : "tracking", f.confidence,
                       f.tracked.x, f.tracked.y, f.tracked.w, f.tracked.h, f.truth.x, f.truth.y, f.truth.w,
                       f.truth.h, f.deviation.dx, f.deviation.dy, f.deviation.ds, f.deviation.dpsi,
                       f.command.u_x, f.command.u_y, f.command.u_z, f.command.u_psi, p[0], p[1], p[2], p[3]);
  }
  return out;
}

std::string summary_line(const SummaryStats& s) {
  if (s.failed) return fmt::format("FAIL at frame {}", s.fail_frame);
  return fmt::format("position median {:.2f} px [q1 {:.2f}, q3 {:.2f}], yaw median {:.4f} rad",
                     s.position.median, s.position.q1, s.position.q3, s.yaw.median);
}

struct SpecFlags {
  std::string object, mode, tracker;
  double duration = 0.0, fps = 0.0;
  std::uint64_t seed = 0;
  std::string config;
  CLI::Option* o_object = nullptr;
  CLI::Option* o_mode = nullptr;
  CLI::Option* o_tracker = nullptr;
  CLI::Option* o_duration = nullptr;
  CLI::Option* o_fps = nullptr;
  CLI::Option* o_seed = nullptr;

  void add(CLI::App* cmd, bool with_scenario) {
    if (with_scenario) {
      o_object = cmd->add_option("--object", object, "structure | ladder");
      o_mode = cmd->add_option("--mode", mode, "none | bubbles | positional");
      o_tracker = cmd->add_option("--tracker", tracker, "boosting | mil | medianflow | mosse | tld | kcf | csrt | oracle");
    }
    o_duration = cmd->add_option("--duration", duration, "seconds per run");
    o_fps = cmd->add_option("--fps", fps, "frame rate");
    o_seed = cmd->add_option("--seed", seed, "seed for scene, noise and trackers");
    cmd->add_option("--config", config, "JSON file with experiment fields")->check(CLI::ExistingFile);
  }

  // Flags given on the command line win over the file.
  std::string overrides() const {
    nlohmann::json j = nlohmann::json::object();
    if (o_object && o_object->count()) j["object"] = object;
    if (o_mode && o_mode->count()) j["mode"] = mode;
    if (o_tracker && o_tracker->count()) j["tracker"] = tracker;
    if (o_duration->count()) j["duration"] = duration;
    if (o_fps->count()) j["fps"] = fps;
    if (o_seed->count()) j["seed"] = seed;
    return j.dump();
  }
};

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(Errc::IoError, "cannot create " + dir.string() + ": " + ec.message());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Closed-loop tracker benchmark for a simulated ROV"};
  app.require_subcommand(1);

  SpecFlags run_flags;
  std::string run_out;
  bool run_export = false;
  auto* run = app.add_subcommand("run", "one closed-loop experiment");
  run_flags.add(run, true);
  run->add_option("--out", run_out, "output directory")->required();
  run->add_flag("--export", run_export, "also write the frames as a replayable dataset under OUT/dataset");

  SpecFlags matrix_flags;
  std::string matrix_out;
  int threads = 0;
  auto* matrix = app.add_subcommand("matrix", "every object x mode x tracker");
  matrix_flags.add(matrix, false);
  matrix->add_option("--out", matrix_out, "output directory")->required();
  auto* o_threads = matrix->add_option("--threads", threads, "worker threads (0: one per core)");

  std::string dataset, replay_tracker, replay_out;
  std::uint64_t replay_seed = 1;
  double replay_fps = 15.0;
  auto* replay = app.add_subcommand("replay", "open-loop tracking over a recorded dataset");
  replay->add_option("--dataset", dataset, "dataset directory")->required()->check(CLI::ExistingDirectory);
  replay->add_option("--tracker", replay_tracker, "tracker name")->required();
  replay->add_option("--out", replay_out, "output directory")->required();
  replay->add_option("--seed", replay_seed, "tracker seed (use the recording run's seed to reproduce it)");
  replay->add_option("--fps", replay_fps, "frame rate of the recording");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      ExperimentSpec spec;
      if (!run_flags.config.empty()) spec = parse_spec(read_text(run_flags.config), spec);
      spec = parse_spec(run_flags.overrides(), spec);
      make_dir(run_out);
      const RunLog log = run_export ? export_run(spec, fs::path(run_out) / "dataset") : run_experiment(spec);
      Report report;
      report.experiments = {{spec.object, spec.mode}};
      report.trackers = {spec.tracker};
      report.cells.push_back({spec.object, spec.mode, spec.tracker, summarize(log), static_cast<int>(log.frames.size())});
      write_text(fs::path(run_out) / "frames.csv", frames_csv(log));
      write_text(fs::path(run_out) / "results.csv", results_csv(report));
      std::cout << sim::object_name(spec.object) << ' ' << sim::mode_name(spec.mode) << ' '
                << tracking::tracker_name(spec.tracker) << ": " << summary_line(report.cells[0].stats) << '\n';
    } else if (matrix->parsed()) {
      MatrixConfig config;
      if (!matrix_flags.config.empty()) config = parse_matrix(read_text(matrix_flags.config), config);
      config = parse_matrix(matrix_flags.overrides(), config);
      if (o_threads->count()) config.threads = threads;
      const auto t0 = std::chrono::steady_clock::now();
      const Report report = run_matrix(config);
      emit_report(report, matrix_out);
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      std::cout << table_markdown(report);
      std::cout << fmt::format("{} runs in {:.1f} s, report in {}\n", report.cells.size(), secs, matrix_out);
    } else if (replay->parsed()) {
      const auto kind = tracking::parse_tracker_kind(replay_tracker);
      if (!kind) throw Error(Errc::InvalidConfig, "unknown tracker '" + replay_tracker + "'");
      const Dataset data = load_dataset(dataset);
      ExperimentSpec seeded;
      seeded.seed = replay_seed;
      const ReplayResult r = replay_dataset(data, *kind, seeded_config(seeded), replay_fps);
      make_dir(replay_out);
      std::string csv = "frame,status,x,y,w,h,dx,dy,ds,dpsi\n";
      for (std::size_t k = 0; k < r.results.size(); ++k) {
        const auto& b = r.results[k].bbox;
        const auto& d = r.deviations[k];
        csv += fmt::format("{},{},{:.17g},{:.17g},{:.17g},{:.17g},{:.4f},{:.4f},{:.4f},{:.6f}\n", k,
                           r.results[k].lost() ? "lost" : "tracking", b.x, b.y, b.w, b.h, d.dx, d.dy, d.ds, d.dpsi);
      }
      write_text(fs::path(replay_out) / "replay.csv", csv);
      std::cout << tracking::tracker_name(*kind) << " over " << r.results.size() << " frames: "
                << summary_line(r.stats) << '\n';
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
