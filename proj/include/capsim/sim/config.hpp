#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "capsim/behavior.hpp"
#include "capsim/capture_step.hpp"
#include "capsim/inwalk_kick.hpp"
#include "capsim/lip.hpp"

namespace capsim::sim {

/// Thrown for malformed scenario files, unknown keys, and invalid values.
/// The message carries the offending field path (or line/column for syntax
/// errors).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RobotConfig {
  double mass = 19.0;        // kg
  double com_height = 0.9;   // m
  double gravity = 9.81;     // m/s^2
  FootGeometry foot{};
  GaitNominal gait{};
  PlanLimits limits{};
  double lift_height = 0.04;  // m, swing apex

  PendulumParams pendulum() const { return {com_height, gravity}; }
};

struct EstimatorConfig {
  bool use_in_loop = true;    // false: the planner reads the true state
  double jerk_psd = 50.0;     // (m/s^3)^2 process noise density
  double sigma_pos = 2e-3;    // m, assumed position measurement noise
  double sigma_acc = 0.3;     // m/s^2, assumed acceleration measurement noise
};

struct SensorConfig {
  double sigma_pos = 2e-3;   // m, actual kinematic CoM noise
  double sigma_acc = 0.3;    // m/s^2, actual trunk accelerometer noise
  double rate_hz = 100.0;    // measurement rate; predictions bridge the gaps
  double trunk_tilt = 0.0;   // rad, fixed trunk pitch exercising gravity removal
};

struct BallConfig {
  double mu_roll = 0.05;     // rolling-friction coefficient
  double stop_speed = 0.01;  // m/s, below this the ball is at rest
  Eigen::Vector2d initial_position = {5.0, 0.0};
};

/// Kick scheduling and contact geometry for the moving-ball scenario.
struct KickSchedule {
  double contact_line_x = 0.2;  // m (world), where the foot meets the ball
  double exit_speed = 2.5;      // m/s imparted to the ball along +x
  double goal_x = 3.0;          // m, goal line
  double min_arrival = 0.10;    // s, schedulable lead-time window at a support exchange;
  double max_arrival = 0.60;    // its width must cover one exchange period
};

struct FallConfig {
  double bound = 0.6;      // m, |CoM - support| capturability bound
  double hold_time = 0.5;  // s the bound must be exceeded continuously
};

struct PushEvent {
  double time = 0.0;                          // s
  Eigen::Vector2d direction = {0.0, -1.0};    // normalized on application
  double pendulum_mass = 5.0;                 // kg
  double impact_speed = 1.0;                  // m/s
};

struct BallPassEvent {
  double time = 0.0;
  Eigen::Vector2d start = Eigen::Vector2d::Zero();
  Eigen::Vector2d velocity = Eigen::Vector2d::Zero();
};

struct ScenarioConfig {
  RobotConfig robot{};
  EstimatorConfig estimator{};
  SensorConfig sensors{};
  BehaviorGains behavior{};
  BallConfig ball{};
  KickSchedule kick{};
  FallConfig fall{};
  std::vector<PushEvent> pushes;
  std::vector<BallPassEvent> ball_passes;
  std::uint64_t seed = 1;
  double duration = 10.0;  // s
  int ticks_per_second = 100;
};

/// Throws ConfigError naming the first invalid field.
void validate(const ScenarioConfig& config);

/// JSON text <-> config. Parsing rejects unknown keys (by path) and runs
/// validate(); absent keys keep their defaults. to_json emits every field, so
/// from_json(to_json(c)) == c.
ScenarioConfig config_from_json(const std::string& text);
std::string config_to_json(const ScenarioConfig& config);

ScenarioConfig read_config(const std::string& path);
void write_config(const ScenarioConfig& config, const std::string& path);

/// Built-in scenario templates used by the CLI subcommands.
ScenarioConfig make_walk_scenario();
ScenarioConfig make_lateral_push_scenario();
ScenarioConfig make_sagittal_push_scenario();
ScenarioConfig make_moving_ball_scenario(std::uint64_t seed);

}  // namespace capsim::sim
