#include "capsim/sim/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>

#include <json.hpp>

#include "capsim/sim/rng.hpp"

namespace capsim::sim {

using nlohmann::json;

namespace {

void reject_unknown_keys(const json& j, const std::string& path,
                         std::initializer_list<const char*> allowed) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : allowed) {
      if (item.key() == k) {
        known = true;
        break;
      }
    }
    if (!known) throw ConfigError(path + item.key() + ": unknown key");
  }
}

const json* section(const json& j, const char* key) {
  if (!j.contains(key)) return nullptr;
  const json& s = j.at(key);
  if (!s.is_object()) throw ConfigError(std::string(key) + ": expected an object");
  return &s;
}

void read_num(const json& j, const char* key, const std::string& path, double& out) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  if (!v.is_number()) throw ConfigError(path + key + ": expected a number");
  out = v.get<double>();
  if (!std::isfinite(out)) throw ConfigError(path + key + ": must be finite");
}

void read_int(const json& j, const char* key, const std::string& path, int& out) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  if (!v.is_number_integer()) throw ConfigError(path + key + ": expected an integer");
  out = v.get<int>();
}

void read_u64(const json& j, const char* key, const std::string& path, std::uint64_t& out) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  if (!v.is_number_integer() || (v.is_number_integer() && v.get<std::int64_t>() < 0 &&
                                 !v.is_number_unsigned())) {
    throw ConfigError(path + key + ": expected a non-negative integer");
  }
  out = v.get<std::uint64_t>();
}

void read_bool(const json& j, const char* key, const std::string& path, bool& out) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  if (!v.is_boolean()) throw ConfigError(path + key + ": expected a boolean");
  out = v.get<bool>();
}

void read_vec2(const json& j, const char* key, const std::string& path,
               Eigen::Vector2d& out) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw ConfigError(path + key + ": expected an array of two numbers");
  }
  out = {v[0].get<double>(), v[1].get<double>()};
  if (!out.allFinite()) throw ConfigError(path + key + ": must be finite");
}

json vec2_to_json(const Eigen::Vector2d& v) { return json::array({v.x(), v.y()}); }

void check(bool ok, const std::string& field, const char* what) {
  if (!ok) throw ConfigError(field + ": " + what);
}

}  // namespace

void validate(const ScenarioConfig& c) {
  check(c.robot.mass > 0.0, "robot.mass", "must be positive");
  check(c.robot.com_height > 0.0, "robot.com_height", "must be positive");
  check(c.robot.gravity > 0.0, "robot.gravity", "must be positive");
  check(c.robot.lift_height >= 0.0, "robot.lift_height", "must be non-negative");
  check(c.robot.foot.zmp_min <= 0.0 && c.robot.foot.zmp_max >= 0.0 &&
            c.robot.foot.zmp_min < c.robot.foot.zmp_max,
        "robot.foot", "must bracket the ankle (zmp_min <= 0 <= zmp_max)");
  check(c.robot.gait.step_duration > 0.0, "robot.gait.step_duration", "must be positive");
  check(c.robot.gait.lateral_step_width > 0.0, "robot.gait.step_width", "must be positive");
  check(c.robot.gait.support_exchange_offset > 0.0, "robot.gait.exchange_offset",
        "must be positive");
  check(c.robot.limits.min_duration_scale > 0.0 &&
            c.robot.limits.min_duration_scale <= 1.0 &&
            c.robot.limits.max_duration_scale >= 1.0,
        "robot.limits", "duration scales must straddle 1");
  check(c.robot.limits.reach_x > 0.0, "robot.limits.reach_x", "must be positive");
  check(c.robot.limits.reach_y_min >= 0.0 &&
            c.robot.limits.reach_y_max >= c.robot.limits.reach_y_min,
        "robot.limits", "lateral reach range must be ordered");
  check(c.estimator.jerk_psd > 0.0, "estimator.jerk_psd", "must be positive");
  check(c.estimator.sigma_pos > 0.0, "estimator.sigma_pos", "must be positive");
  check(c.estimator.sigma_acc > 0.0, "estimator.sigma_acc", "must be positive");
  check(c.sensors.sigma_pos >= 0.0, "sensors.sigma_pos", "must be non-negative");
  check(c.sensors.sigma_acc >= 0.0, "sensors.sigma_acc", "must be non-negative");
  check(c.sensors.rate_hz > 0.0, "sensors.rate_hz", "must be positive");
  check(c.ball.mu_roll >= 0.0, "ball.mu_roll", "must be non-negative");
  check(c.ball.stop_speed >= 0.0, "ball.stop_speed", "must be non-negative");
  check(c.kick.exit_speed > 0.0, "kick.exit_speed", "must be positive");
  check(c.kick.min_arrival > 0.0 && c.kick.max_arrival > c.kick.min_arrival,
        "kick", "arrival window must be ordered and positive");
  check(c.fall.bound > 0.0, "fall.bound", "must be positive");
  check(c.fall.hold_time >= 0.0, "fall.hold_time", "must be non-negative");
  check(c.duration >= 0.0, "duration", "must be non-negative");
  check(c.ticks_per_second >= 1, "ticks_per_second", "must be at least 1");
  for (std::size_t i = 0; i < c.pushes.size(); ++i) {
    const std::string p = "pushes[" + std::to_string(i) + "].";
    check(c.pushes[i].time >= 0.0, p + "time", "must be non-negative");
    check(c.pushes[i].pendulum_mass >= 0.0, p + "pendulum_mass", "must be non-negative");
    check(c.pushes[i].impact_speed >= 0.0, p + "impact_speed", "must be non-negative");
    check(c.pushes[i].direction.norm() > 0.0, p + "direction", "must be non-zero");
  }
  for (std::size_t i = 0; i < c.ball_passes.size(); ++i) {
    const std::string p = "ball_passes[" + std::to_string(i) + "].";
    check(c.ball_passes[i].time >= 0.0, p + "time", "must be non-negative");
  }
}

ScenarioConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(e.what());
  }
  if (!j.is_object()) throw ConfigError("top level: expected an object");
  reject_unknown_keys(j, "", {"robot", "estimator", "sensors", "behavior", "ball", "kick",
                              "fall", "pushes", "ball_passes", "seed", "duration",
                              "ticks_per_second"});
  ScenarioConfig c;

  if (const json* r = section(j, "robot")) {
    reject_unknown_keys(*r, "robot.",
                        {"mass", "com_height", "gravity", "foot", "gait", "limits",
                         "lift_height"});
    read_num(*r, "mass", "robot.", c.robot.mass);
    read_num(*r, "com_height", "robot.", c.robot.com_height);
    read_num(*r, "gravity", "robot.", c.robot.gravity);
    read_num(*r, "lift_height", "robot.", c.robot.lift_height);
    if (const json* f = section(*r, "foot")) {
      reject_unknown_keys(*f, "robot.foot.", {"zmp_min", "zmp_max"});
      read_num(*f, "zmp_min", "robot.foot.", c.robot.foot.zmp_min);
      read_num(*f, "zmp_max", "robot.foot.", c.robot.foot.zmp_max);
    }
    if (const json* g = section(*r, "gait")) {
      reject_unknown_keys(*g, "robot.gait.",
                          {"step_duration", "step_width", "exchange_offset",
                           "apex_velocity"});
      read_num(*g, "step_duration", "robot.gait.", c.robot.gait.step_duration);
      read_num(*g, "step_width", "robot.gait.", c.robot.gait.lateral_step_width);
      read_num(*g, "exchange_offset", "robot.gait.",
               c.robot.gait.support_exchange_offset);
      read_num(*g, "apex_velocity", "robot.gait.", c.robot.gait.apex_velocity_sagittal);
    }
    if (const json* l = section(*r, "limits")) {
      reject_unknown_keys(*l, "robot.limits.",
                          {"min_duration_scale", "max_duration_scale", "reach_x",
                           "reach_y_min", "reach_y_max"});
      read_num(*l, "min_duration_scale", "robot.limits.",
               c.robot.limits.min_duration_scale);
      read_num(*l, "max_duration_scale", "robot.limits.",
               c.robot.limits.max_duration_scale);
      read_num(*l, "reach_x", "robot.limits.", c.robot.limits.reach_x);
      read_num(*l, "reach_y_min", "robot.limits.", c.robot.limits.reach_y_min);
      read_num(*l, "reach_y_max", "robot.limits.", c.robot.limits.reach_y_max);
    }
  }
  if (const json* e = section(j, "estimator")) {
    reject_unknown_keys(*e, "estimator.",
                        {"use_in_loop", "jerk_psd", "sigma_pos", "sigma_acc"});
    read_bool(*e, "use_in_loop", "estimator.", c.estimator.use_in_loop);
    read_num(*e, "jerk_psd", "estimator.", c.estimator.jerk_psd);
    read_num(*e, "sigma_pos", "estimator.", c.estimator.sigma_pos);
    read_num(*e, "sigma_acc", "estimator.", c.estimator.sigma_acc);
  }
  if (const json* s = section(j, "sensors")) {
    reject_unknown_keys(*s, "sensors.", {"sigma_pos", "sigma_acc", "rate_hz", "trunk_tilt"});
    read_num(*s, "sigma_pos", "sensors.", c.sensors.sigma_pos);
    read_num(*s, "sigma_acc", "sensors.", c.sensors.sigma_acc);
    read_num(*s, "rate_hz", "sensors.", c.sensors.rate_hz);
    read_num(*s, "trunk_tilt", "sensors.", c.sensors.trunk_tilt);
  }
  if (const json* b = section(j, "behavior")) {
    reject_unknown_keys(*b, "behavior.",
                        {"attract_gain", "repel_gain", "orthogonal_ball_gain",
                         "orthogonal_obstacle_gain", "face_ball_gain", "face_target_gain",
                         "obstacle_radius", "near_threshold", "standoff"});
    read_num(*b, "attract_gain", "behavior.", c.behavior.attract_gain);
    read_num(*b, "repel_gain", "behavior.", c.behavior.repel_gain);
    read_num(*b, "orthogonal_ball_gain", "behavior.", c.behavior.orthogonal_ball_gain);
    read_num(*b, "orthogonal_obstacle_gain", "behavior.",
             c.behavior.orthogonal_obstacle_gain);
    read_num(*b, "face_ball_gain", "behavior.", c.behavior.face_ball_gain);
    read_num(*b, "face_target_gain", "behavior.", c.behavior.face_target_gain);
    read_num(*b, "obstacle_radius", "behavior.", c.behavior.obstacle_radius);
    read_num(*b, "near_threshold", "behavior.", c.behavior.near_threshold);
    read_num(*b, "standoff", "behavior.", c.behavior.standoff);
  }
  if (const json* b = section(j, "ball")) {
    reject_unknown_keys(*b, "ball.", {"mu_roll", "stop_speed", "initial_position"});
    read_num(*b, "mu_roll", "ball.", c.ball.mu_roll);
    read_num(*b, "stop_speed", "ball.", c.ball.stop_speed);
    read_vec2(*b, "initial_position", "ball.", c.ball.initial_position);
  }
  if (const json* k = section(j, "kick")) {
    reject_unknown_keys(*k, "kick.",
                        {"contact_line_x", "exit_speed", "goal_x", "min_arrival",
                         "max_arrival"});
    read_num(*k, "contact_line_x", "kick.", c.kick.contact_line_x);
    read_num(*k, "exit_speed", "kick.", c.kick.exit_speed);
    read_num(*k, "goal_x", "kick.", c.kick.goal_x);
    read_num(*k, "min_arrival", "kick.", c.kick.min_arrival);
    read_num(*k, "max_arrival", "kick.", c.kick.max_arrival);
  }
  if (const json* f = section(j, "fall")) {
    reject_unknown_keys(*f, "fall.", {"bound", "hold_time"});
    read_num(*f, "bound", "fall.", c.fall.bound);
    read_num(*f, "hold_time", "fall.", c.fall.hold_time);
  }
  if (j.contains("pushes")) {
    const json& arr = j.at("pushes");
    if (!arr.is_array()) throw ConfigError("pushes: expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string path = "pushes[" + std::to_string(i) + "].";
      const json& p = arr[i];
      if (!p.is_object()) throw ConfigError(path + ": expected an object");
      reject_unknown_keys(p, path, {"time", "direction", "pendulum_mass", "impact_speed"});
      PushEvent ev;
      read_num(p, "time", path, ev.time);
      read_vec2(p, "direction", path, ev.direction);
      read_num(p, "pendulum_mass", path, ev.pendulum_mass);
      read_num(p, "impact_speed", path, ev.impact_speed);
      c.pushes.push_back(ev);
    }
  }
  if (j.contains("ball_passes")) {
    const json& arr = j.at("ball_passes");
    if (!arr.is_array()) throw ConfigError("ball_passes: expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string path = "ball_passes[" + std::to_string(i) + "].";
      const json& p = arr[i];
      if (!p.is_object()) throw ConfigError(path + ": expected an object");
      reject_unknown_keys(p, path, {"time", "start", "velocity"});
      BallPassEvent ev;
      read_num(p, "time", path, ev.time);
      read_vec2(p, "start", path, ev.start);
      read_vec2(p, "velocity", path, ev.velocity);
      c.ball_passes.push_back(ev);
    }
  }
  read_u64(j, "seed", "", c.seed);
  read_num(j, "duration", "", c.duration);
  read_int(j, "ticks_per_second", "", c.ticks_per_second);

  validate(c);
  return c;
}

std::string config_to_json(const ScenarioConfig& c) {
  json j;
  j["robot"] = {
      {"mass", c.robot.mass},
      {"com_height", c.robot.com_height},
      {"gravity", c.robot.gravity},
      {"lift_height", c.robot.lift_height},
      {"foot", {{"zmp_min", c.robot.foot.zmp_min}, {"zmp_max", c.robot.foot.zmp_max}}},
      {"gait",
       {{"step_duration", c.robot.gait.step_duration},
        {"step_width", c.robot.gait.lateral_step_width},
        {"exchange_offset", c.robot.gait.support_exchange_offset},
        {"apex_velocity", c.robot.gait.apex_velocity_sagittal}}},
      {"limits",
       {{"min_duration_scale", c.robot.limits.min_duration_scale},
        {"max_duration_scale", c.robot.limits.max_duration_scale},
        {"reach_x", c.robot.limits.reach_x},
        {"reach_y_min", c.robot.limits.reach_y_min},
        {"reach_y_max", c.robot.limits.reach_y_max}}}};
  j["estimator"] = {{"use_in_loop", c.estimator.use_in_loop},
                    {"jerk_psd", c.estimator.jerk_psd},
                    {"sigma_pos", c.estimator.sigma_pos},
                    {"sigma_acc", c.estimator.sigma_acc}};
  j["sensors"] = {{"sigma_pos", c.sensors.sigma_pos},
                  {"sigma_acc", c.sensors.sigma_acc},
                  {"rate_hz", c.sensors.rate_hz},
                  {"trunk_tilt", c.sensors.trunk_tilt}};
  j["behavior"] = {{"attract_gain", c.behavior.attract_gain},
                   {"repel_gain", c.behavior.repel_gain},
                   {"orthogonal_ball_gain", c.behavior.orthogonal_ball_gain},
                   {"orthogonal_obstacle_gain", c.behavior.orthogonal_obstacle_gain},
                   {"face_ball_gain", c.behavior.face_ball_gain},
                   {"face_target_gain", c.behavior.face_target_gain},
                   {"obstacle_radius", c.behavior.obstacle_radius},
                   {"near_threshold", c.behavior.near_threshold},
                   {"standoff", c.behavior.standoff}};
  j["ball"] = {{"mu_roll", c.ball.mu_roll},
               {"stop_speed", c.ball.stop_speed},
               {"initial_position", vec2_to_json(c.ball.initial_position)}};
  j["kick"] = {{"contact_line_x", c.kick.contact_line_x},
               {"exit_speed", c.kick.exit_speed},
               {"goal_x", c.kick.goal_x},
               {"min_arrival", c.kick.min_arrival},
               {"max_arrival", c.kick.max_arrival}};
  j["fall"] = {{"bound", c.fall.bound}, {"hold_time", c.fall.hold_time}};
  j["pushes"] = json::array();
  for (const PushEvent& p : c.pushes) {
    j["pushes"].push_back({{"time", p.time},
                           {"direction", vec2_to_json(p.direction)},
                           {"pendulum_mass", p.pendulum_mass},
                           {"impact_speed", p.impact_speed}});
  }
  j["ball_passes"] = json::array();
  for (const BallPassEvent& p : c.ball_passes) {
    j["ball_passes"].push_back({{"time", p.time},
                                {"start", vec2_to_json(p.start)},
                                {"velocity", vec2_to_json(p.velocity)}});
  }
  j["seed"] = c.seed;
  j["duration"] = c.duration;
  j["ticks_per_second"] = c.ticks_per_second;
  return j.dump(2) + "\n";
}

ScenarioConfig read_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return config_from_json(ss.str());
}

void write_config(const ScenarioConfig& config, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open for writing: " + path);
  f << config_to_json(config);
  if (!f) throw ConfigError("write failed: " + path);
}

ScenarioConfig make_walk_scenario() {
  ScenarioConfig c;
  c.robot.gait.apex_velocity_sagittal = 0.15;
  c.duration = 10.0;
  return c;
}

ScenarioConfig make_lateral_push_scenario() {
  ScenarioConfig c;
  c.sensors.sigma_pos = 0.0;
  c.sensors.sigma_acc = 0.0;
  c.estimator.use_in_loop = false;
  c.duration = 8.0;
  PushEvent push;
  push.time = 2.15;
  push.direction = {0.0, -1.0};  // toward the support foot (right support at 2.15 s)
  push.pendulum_mass = 5.0;
  push.impact_speed = 0.72;
  c.pushes.push_back(push);
  return c;
}

ScenarioConfig make_sagittal_push_scenario() {
  ScenarioConfig c;
  c.robot.gait.apex_velocity_sagittal = 0.15;
  c.sensors.sigma_pos = 0.0;
  c.sensors.sigma_acc = 0.0;
  c.estimator.use_in_loop = false;
  c.duration = 8.0;
  PushEvent push;
  push.time = 2.15;
  push.direction = {-1.0, 0.0};
  push.pendulum_mass = 5.0;
  // strong enough to reverse the forward walk: the ZMP saturates at the heel
  // and the recovery needs a backward capture step
  push.impact_speed = 2.0;
  c.pushes.push_back(push);
  return c;
}

ScenarioConfig make_moving_ball_scenario(std::uint64_t seed) {
  ScenarioConfig c;
  c.sensors.sigma_pos = 0.0;
  c.sensors.sigma_acc = 0.0;
  c.estimator.use_in_loop = false;
  c.seed = seed;
  c.duration = 10.0;
  const double decel = c.ball.mu_roll * c.robot.gravity;
  const Eigen::Vector2d contact(c.kick.contact_line_x, 0.0);
  Rng rng(seed);
  for (int i = 0; i < 3; ++i) {
    const double speed = rng.uniform(1.0, 2.5);
    const double angle = rng.uniform(-10.0, 10.0) * (3.14159265358979323846 / 180.0);
    // start close enough that the ball still reaches the contact line
    const double distance = std::min(0.75 * speed * speed / (2.0 * decel), 1.6);
    const Eigen::Vector2d dir(-std::cos(angle), -std::sin(angle));
    BallPassEvent pass;
    pass.time = 1.0 + 3.0 * i;
    pass.start = contact - distance * dir;
    pass.velocity = speed * dir;
    c.ball_passes.push_back(pass);
  }
  return c;
}

}  // namespace capsim::sim
