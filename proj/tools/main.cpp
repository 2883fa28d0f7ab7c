#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "capsim/gait.hpp"
#include "capsim/inwalk_kick.hpp"
#include "capsim/side.hpp"
#include "capsim/sim/batch.hpp"
#include "capsim/sim/config.hpp"
#include "capsim/sim/trace.hpp"
#include "capsim/sim/world.hpp"

namespace sim = capsim::sim;

namespace {

struct RunOptions {
  std::string scenario_file;
  std::string out_path;
  std::string write_config_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> duration;
  std::optional<int> ticks_per_second;
  bool quiet = false;
};

void add_run_options(CLI::App* cmd, RunOptions& opt) {
  cmd->add_option("--scenario", opt.scenario_file,
                  "Scenario JSON overriding the built-in template");
  cmd->add_option("--out", opt.out_path, "Write the trace CSV to this path");
  cmd->add_option("--write-config", opt.write_config_path,
                  "Write the resolved scenario JSON to this path and exit");
  cmd->add_option("--seed", opt.seed, "Override the scenario seed");
  cmd->add_option("--duration", opt.duration, "Override the run length [s]");
  cmd->add_option("--ticks-per-second", opt.ticks_per_second,
                  "Override the simulation rate");
  cmd->add_flag("--quiet", opt.quiet, "Suppress the summary line");
}

int run_one(const std::string& name, sim::ScenarioConfig cfg, const RunOptions& opt) {
  if (!opt.scenario_file.empty()) cfg = sim::read_config(opt.scenario_file);
  if (opt.seed) cfg.seed = *opt.seed;
  if (opt.duration) cfg.duration = *opt.duration;
  if (opt.ticks_per_second) cfg.ticks_per_second = *opt.ticks_per_second;
  if (!opt.write_config_path.empty()) {
    sim::validate(cfg);
    sim::write_config(cfg, opt.write_config_path);
    return 0;
  }
  const sim::RunResult result = sim::run_scenario(cfg);
  if (!opt.out_path.empty()) sim::write_trace(result.trace, opt.out_path);
  if (!opt.quiet) {
    std::printf("%s: %s\n", name.c_str(), sim::summary_line(result.summary).c_str());
  }
  return 0;
}

int run_kick_demo(double ball_x, double ball_y, double direction, const std::string& leg_name,
                  const std::string& out_path, bool quiet) {
  const capsim::Side leg =
      leg_name == "left" ? capsim::Side::kLeft : capsim::Side::kRight;
  capsim::KickRequest request;
  request.ball_in_kick_frame = {ball_x, ball_y};
  request.kick_direction = direction;
  request.leg = leg;
  const capsim::KickParams params;
  const capsim::KickAmplitudes amp = capsim::kick_amplitudes(request, params);
  if (!quiet) {
    std::printf("amplitudes: forward=%.9g backward=%.9g lateral=%.9g\n", amp.forward,
                amp.backward, amp.lateral);
  }

  std::string csv = "phase,kick_x,kick_y,foot_x,foot_y,foot_z\n";
  const sim::RobotConfig robot;
  const double m = side_sign(leg);
  const Eigen::Vector2d stance(0.0, m * robot.gait.lateral_step_width);
  char buf[160];
  for (int i = 0; i <= 100; ++i) {
    const double phi = i / 100.0;
    const Eigen::Vector2d kick_xy = capsim::compose_kick(phi, amp, params);
    capsim::FootTarget foot =
        capsim::swing_target(phi, stance, stance, robot.lift_height);
    foot = capsim::compose_with_kick(foot, phi, amp, params, direction,
                                     capsim::mirror(leg), leg);
    std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n", phi, kick_xy.x(),
                  kick_xy.y(), foot.position.x(), foot.position.y(), foot.position.z());
    csv += buf;
  }
  if (out_path.empty()) {
    std::fputs(csv.c_str(), stdout);
  } else {
    FILE* f = std::fopen(out_path.c_str(), "wb");
    if (!f) {
      std::fprintf(stderr, "cannot open %s\n", out_path.c_str());
      return 1;
    }
    std::fputs(csv.c_str(), f);
    std::fclose(f);
  }
  return 0;
}

int run_batch_cmd(const std::vector<std::string>& files, int repeat, unsigned threads,
                  const std::string& out_dir, bool quiet) {
  std::vector<sim::BatchJob> jobs;
  for (const std::string& file : files) {
    const sim::ScenarioConfig base = sim::read_config(file);
    const std::string stem = std::filesystem::path(file).stem().string();
    for (int r = 0; r < repeat; ++r) {
      sim::BatchJob job;
      job.name = repeat > 1 ? stem + "#" + std::to_string(r) : stem;
      job.config = base;
      job.config.seed = base.seed + static_cast<std::uint64_t>(r);
      jobs.push_back(std::move(job));
    }
  }
  const std::vector<sim::RunResult> results = sim::run_batch(jobs, threads);
  if (!out_dir.empty()) std::filesystem::create_directories(out_dir);
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (!out_dir.empty()) {
      const std::string path =
          (std::filesystem::path(out_dir) / (jobs[i].name + ".csv")).string();
      sim::write_trace(results[i].trace, path);
    }
    if (!quiet) {
      std::printf("%s: %s\n", jobs[i].name.c_str(),
                  sim::summary_line(results[i].summary).c_str());
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bipedal locomotion scenario simulator"};
  app.require_subcommand(1);

  RunOptions walk_opt;
  CLI::App* walk = app.add_subcommand("walk", "Steady forward walk, estimator in the loop");
  add_run_options(walk, walk_opt);

  RunOptions push_opt;
  std::string push_axis = "lateral";
  CLI::App* push = app.add_subcommand("push-recovery", "Push during a step, then recovery");
  push->add_option("--axis", push_axis, "Push direction")
      ->check(CLI::IsMember({"lateral", "sagittal"}));
  add_run_options(push, push_opt);

  RunOptions ball_opt;
  CLI::App* ball = app.add_subcommand("moving-ball",
                                      "Seeded passes kicked back on arrival");
  add_run_options(ball, ball_opt);

  RunOptions run_opt;
  CLI::App* run = app.add_subcommand("run", "Run a scenario JSON file");
  run->add_option("--scenario", run_opt.scenario_file, "Scenario JSON file")->required();
  run->add_option("--out", run_opt.out_path, "Write the trace CSV to this path");
  run->add_option("--write-config", run_opt.write_config_path,
                  "Write the resolved scenario JSON to this path and exit");
  run->add_option("--seed", run_opt.seed, "Override the scenario seed");
  run->add_option("--duration", run_opt.duration, "Override the run length [s]");
  run->add_option("--ticks-per-second", run_opt.ticks_per_second,
                  "Override the simulation rate");
  run->add_flag("--quiet", run_opt.quiet, "Suppress the summary line");

  double demo_ball_x = 0.2, demo_ball_y = 0.0, demo_direction = 0.0;
  std::string demo_leg = "right", demo_out;
  bool demo_quiet = false;
  CLI::App* demo = app.add_subcommand(
      "kick-demo", "Dump one kick's foot trajectory (no physics)");
  demo->add_option("--ball-x", demo_ball_x, "Ball x relative to the kicking foot [m]");
  demo->add_option("--ball-y", demo_ball_y, "Ball y relative to the kicking foot [m]");
  demo->add_option("--direction", demo_direction, "Kick direction [rad, CCW, 0 = ahead]");
  demo->add_option("--leg", demo_leg, "Kicking leg")
      ->check(CLI::IsMember({"left", "right"}));
  demo->add_option("--out", demo_out, "Write the CSV to this path (default stdout)");
  demo->add_flag("--quiet", demo_quiet, "Suppress the amplitude line");

  std::vector<std::string> batch_files;
  int batch_repeat = 1;
  unsigned batch_threads = 0;
  std::string batch_out_dir;
  bool batch_quiet = false;
  CLI::App* batch = app.add_subcommand("batch", "Run scenario files on a thread pool");
  batch->add_option("files", batch_files, "Scenario JSON files")->required();
  batch->add_option("--repeat", batch_repeat, "Runs per file, seeds base+0..N-1")
      ->check(CLI::PositiveNumber);
  batch->add_option("--threads", batch_threads, "Worker threads (0 = hardware)");
  batch->add_option("--out-dir", batch_out_dir, "Write one trace CSV per run here");
  batch->add_flag("--quiet", batch_quiet, "Suppress the summary lines");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(walk)) {
      return run_one("walk", sim::make_walk_scenario(), walk_opt);
    }
    if (app.got_subcommand(push)) {
      const bool lateral = push_axis == "lateral";
      return run_one(lateral ? "push_lateral" : "push_sagittal",
                     lateral ? sim::make_lateral_push_scenario()
                             : sim::make_sagittal_push_scenario(),
                     push_opt);
    }
    if (app.got_subcommand(ball)) {
      return run_one("moving_ball", sim::make_moving_ball_scenario(ball_opt.seed.value_or(1)),
                     ball_opt);
    }
    if (app.got_subcommand(run)) {
      const std::string name =
          std::filesystem::path(run_opt.scenario_file).stem().string();
      return run_one(name, sim::ScenarioConfig{}, run_opt);
    }
    if (app.got_subcommand(demo)) {
      return run_kick_demo(demo_ball_x, demo_ball_y, demo_direction, demo_leg, demo_out,
                           demo_quiet);
    }
    if (app.got_subcommand(batch)) {
      return run_batch_cmd(batch_files, batch_repeat, batch_threads, batch_out_dir,
                           batch_quiet);
    }
  } catch (const sim::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const sim::SimulationAbort& e) {
    std::fprintf(stderr, "simulation aborted: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
