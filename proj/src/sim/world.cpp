#include "capsim/sim/world.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "capsim/behavior.hpp"
#include "capsim/capture_step.hpp"
#include "capsim/com_filter.hpp"
#include "capsim/gait.hpp"
#include "capsim/inwalk_kick.hpp"
#include "capsim/lip.hpp"
#include "capsim/sim/rng.hpp"

namespace capsim::sim {

double push_delta_v(double pendulum_mass, double impact_speed, double robot_mass) {
  if (!(pendulum_mass >= 0.0) || !(impact_speed >= 0.0) || !(robot_mass > 0.0)) {
    throw std::invalid_argument("push_delta_v: masses and speed must be non-negative");
  }
  // plastic impact: the pendulum sticks, momentum is shared
  return pendulum_mass * impact_speed / (pendulum_mass + robot_mass);
}

std::string summary_line(const Summary& s) {
  char buf[192];
  std::snprintf(buf, sizeof(buf),
                "fell=%d steps_to_recover=%d max_step_size=%.9g capture_count=%d "
                "goals=%d ticks=%ld",
                s.fell ? 1 : 0, s.steps_to_recover, s.max_step_size, s.capture_count,
                s.goals, s.ticks);
  return buf;
}

namespace {

constexpr double kTimeEps = 1e-12;

struct KickState {
  bool active = false;
  bool contact_done = false;
  double duration = 0.0;
  double direction = 0.0;
  Side leg = Side::kLeft;
  KickAmplitudes amplitudes{};
  KickParams params{};     // phi_fw retimed per kick to meet the ball
  double gate_lo = 0.0;    // strike window in step phase
  double gate_hi = 1.0;
};

class World {
 public:
  explicit World(const ScenarioConfig& cfg)
      : cfg_(cfg),
        params_(cfg.robot.pendulum()),
        tau_(params_.tau()),
        estimator_({cfg.estimator.jerk_psd, cfg.estimator.sigma_pos,
                    cfg.estimator.sigma_acc, FilterConfig{}.initial_covariance},
                   cfg.robot.gravity),
        rng_(cfg.seed) {
    const GaitNominal& nom = cfg_.robot.gait;
    // start at the nominal support-exchange state, right foot planted at the origin
    support_ = Side::kRight;
    support_pos_.setZero();
    com_y_ = {nom.support_exchange_offset, -nom.lateral_exchange_speed(params_)};
    com_x_ = {-0.5 * nom.sagittal_step_length(params_), nom.sagittal_exchange_speed(params_)};
    swing_liftoff_ = {-nom.sagittal_step_length(params_),
                      side_sign(mirror(support_)) * nom.lateral_step_width};
    ball_pos_ = cfg_.ball.initial_position;
    ball_vel_.setZero();
    trunk_rot_ = Eigen::AngleAxisd(cfg_.sensors.trunk_tilt, Eigen::Vector3d::UnitY())
                     .toRotationMatrix();
    const double inv_tau2 = 1.0 / (tau_ * tau_);
    estimator_.reset({support_pos_.x() + com_x_.x, com_x_.v, com_x_.x * inv_tau2},
                     {support_pos_.y() + com_y_.x, com_y_.v, com_y_.x * inv_tau2});
    next_meas_t_ = 1.0 / cfg_.sensors.rate_hz;
    tracker_.add(0.0, ball_pos_);
    replan();
    last_zmp_x_ = plan_.zmp_offset.x();
  }

  RunResult run() {
    const double dt = 1.0 / cfg_.ticks_per_second;
    const long n = std::lround(cfg_.duration * cfg_.ticks_per_second);
    trace_.reserve(static_cast<std::size_t>(n) + 1);
    record(0.0);
    for (tick_ = 0; tick_ < n; ++tick_) {
      const double t_prev = static_cast<double>(tick_) / cfg_.ticks_per_second;
      const double t_next = static_cast<double>(tick_ + 1) / cfg_.ticks_per_second;
      step_tick(t_prev, t_next, dt);
      record(t_next);
      if (fell_) break;
    }
    Summary s;
    s.fell = fell_;
    s.steps_to_recover = push_seen_ ? steps_to_recover_ : 0;
    s.max_step_size = max_step_;
    s.capture_count = capture_count_;
    s.goals = goals_;
    s.ticks = fell_ ? tick_ + 1 : n;
    return {std::move(trace_), s};
  }

 private:
  void step_tick(double t_prev, double t_next, double dt) {
    fire_events(t_prev);
    maybe_measure(t_prev);
    replan();
    double left = t_next - t_prev;
    double consumed = 0.0;
    int exchanges_this_tick = 0;
    while (left > kTimeEps) {
      if (plan_.remaining <= left + kTimeEps) {
        const double h = std::clamp(plan_.remaining, 0.0, left);
        propagate_segment(h, t_prev + consumed);
        consumed += h;
        left -= h;
        do_exchange(t_prev + consumed);
        if (++exchanges_this_tick > 8) {
          throw SimulationAbort("support exchange livelock at tick " +
                                    std::to_string(tick_),
                                tick_);
        }
      } else {
        propagate_segment(left, t_prev + consumed);
        consumed += left;
        left = 0.0;
      }
    }
    last_zmp_x_ = plan_.zmp_offset.x();
    check_finite();
    // capturability-bound fall detection
    if (std::hypot(com_x_.x, com_y_.x) > cfg_.fall.bound) {
      fall_accum_ += dt;
      if (fall_accum_ > cfg_.fall.hold_time + kTimeEps && !fell_) {
        fell_ = true;
        tokens_.push_back("fall");
      }
    } else {
      fall_accum_ = 0.0;
    }
  }

  void fire_events(double t_now) {
    while (next_push_ < cfg_.pushes.size() &&
           cfg_.pushes[next_push_].time <= t_now + kTimeEps) {
      const PushEvent& p = cfg_.pushes[next_push_++];
      const double dv = push_delta_v(p.pendulum_mass, p.impact_speed, cfg_.robot.mass);
      const Eigen::Vector2d dir = p.direction.normalized();
      com_x_.v += dv * dir.x();
      com_y_.v += dv * dir.y();
      tokens_.push_back("push");
      push_seen_ = true;
      steps_since_push_ = 0;
      steps_to_recover_ = -1;
    }
    while (next_pass_ < cfg_.ball_passes.size() &&
           cfg_.ball_passes[next_pass_].time <= t_now + kTimeEps) {
      const BallPassEvent& p = cfg_.ball_passes[next_pass_++];
      ball_pos_ = p.start;
      ball_vel_ = p.velocity;
      tracker_.clear();  // stale detections describe the previous ball
      tokens_.push_back("pass");
    }
  }

  void maybe_measure(double t) {
    if (t + kTimeEps < next_meas_t_) return;
    const double dt_est = t - last_meas_t_;
    next_meas_t_ += 1.0 / cfg_.sensors.rate_hz;
    last_meas_t_ = t;
    const double inv_tau2 = 1.0 / (tau_ * tau_);
    const Eigen::Vector2d com_world = support_pos_ + Eigen::Vector2d(com_x_.x, com_y_.x);
    const Eigen::Vector3d acc_world((com_x_.x - last_zmp_x_) * inv_tau2,
                                    com_y_.x * inv_tau2, 0.0);
    const Eigen::Vector2d meas =
        com_world + cfg_.sensors.sigma_pos * Eigen::Vector2d(rng_.gaussian(), rng_.gaussian());
    const Eigen::Vector3d acc_noise(rng_.gaussian(), rng_.gaussian(), rng_.gaussian());
    TrunkImu imu;
    imu.orientation = trunk_rot_;
    imu.accel_trunk =
        trunk_rot_.transpose() * (acc_world + Eigen::Vector3d(0, 0, cfg_.robot.gravity)) +
        cfg_.sensors.sigma_acc * acc_noise;
    estimator_.step(meas, imu, dt_est);
    tracker_.add(t, ball_pos_);
  }

  void planner_state(AxisState& sx, AxisState& sy) const {
    if (cfg_.estimator.use_in_loop) {
      const CoMAxisEstimate ex = estimator_.x();
      const CoMAxisEstimate ey = estimator_.y();
      sx = {ex.c - support_pos_.x(), ex.c_dot};
      sy = {ey.c - support_pos_.y(), ey.c_dot};
    } else {
      sx = com_x_;
      sy = com_y_;
    }
  }

  double lateral_landing(const AxisState& sy, bool* clamped) const {
    const GaitNominal& nom = cfg_.robot.gait;
    const double m = side_sign(mirror(support_));
    const double eta = m * sy.x;
    const double veta = m * sy.v;
    const double enom = nom.lateral_orbital_energy(params_);
    double f = eta + tau_ * std::sqrt(std::max(veta * veta - 2.0 * enom, 0.0));
    const double lo = cfg_.robot.limits.reach_y_min;
    const double hi = cfg_.robot.limits.reach_y_max;
    if (f < lo || f > hi) {
      f = std::clamp(f, lo, hi);
      if (clamped) *clamped = true;
    }
    return m * f;
  }

  void replan() {
    AxisState sx, sy;
    planner_state(sx, sy);
    if (kick_.active) {
      const double remaining = std::max(kick_.duration - elapsed_, 0.0);
      const SagittalPlan sag = plan_sagittal(sx, cfg_.robot.foot, cfg_.robot.gait,
                                             params_, remaining, cfg_.robot.limits);
      StepPlan p;
      p.duration = kick_.duration;
      p.remaining = remaining;
      p.zmp_offset = {sag.zmp_offset_x, 0.0};
      p.zmp_clamped = sag.zmp_clamped;
      const AxisState ex_y = propagate(sy, 0.0, params_, remaining);
      bool lat_clamped = false;
      p.landing_offset = {sag.landing_offset_x, lateral_landing(ex_y, &lat_clamped)};
      p.landing_clamped = sag.landing_clamped || lat_clamped;
      plan_ = p;
    } else {
      plan_ = plan_step(sx, sy, support_, cfg_.robot.gait, cfg_.robot.foot, params_,
                        cfg_.robot.limits, elapsed_);
    }
  }

  void propagate_segment(double h, double t_start) {
    if (h <= 0.0) return;
    advance_ball(h, t_start);
    com_x_ = propagate(com_x_, plan_.zmp_offset.x(), params_, h);
    com_y_ = propagate(com_y_, plan_.zmp_offset.y(), params_, h);
    elapsed_ += h;
  }

  void advance_ball(double h, double) {
    const double decel_mag = cfg_.ball.mu_roll * cfg_.robot.gravity;
    double done = 0.0;
    int guard = 0;
    while (h - done > kTimeEps && ++guard < 16) {
      const double speed = ball_vel_.norm();
      if (speed < cfg_.ball.stop_speed) {
        ball_vel_.setZero();
        return;
      }
      const double t_stop = decel_mag > 0.0 ? speed / decel_mag : 1e300;
      const double h_seg = std::min(h - done, t_stop);
      const Eigen::Vector2d v0 = ball_vel_;
      const Eigen::Vector2d a = decel_mag > 0.0
                                    ? Eigen::Vector2d(-decel_mag * v0 / speed)
                                    : Eigen::Vector2d::Zero();
      const Eigen::Vector2d p0 = ball_pos_;
      const Eigen::Vector2d p1 = p0 + v0 * h_seg + 0.5 * a * h_seg * h_seg;

      // foot-ball contact: the ball crosses the contact line toward the robot
      // while the kick swing is inside its strike window
      double contact_s = -1.0;
      const double line = cfg_.kick.contact_line_x;
      if (kick_.active && !kick_.contact_done && p0.x() > line && p1.x() <= line) {
        const double s = h_seg * (p0.x() - line) / (p0.x() - p1.x());
        const double phi = (elapsed_ + done + s) / kick_.duration;
        if (phi >= kick_.gate_lo && phi <= kick_.gate_hi) contact_s = s;
      }
      // goal: crossing the goal line outbound
      double goal_s = -1.0;
      const double gx = cfg_.kick.goal_x;
      if (p0.x() < gx && p1.x() >= gx && v0.x() > 0.0) {
        goal_s = h_seg * (gx - p0.x()) / (p1.x() - p0.x());
      }

      if (contact_s >= 0.0 && (goal_s < 0.0 || contact_s <= goal_s)) {
        const double y = p0.y() + v0.y() * contact_s + 0.5 * a.y() * contact_s * contact_s;
        ball_pos_ = {line, y};
        ball_vel_ = {cfg_.kick.exit_speed, 0.0};
        kick_.contact_done = true;
        tokens_.push_back("kick_contact");
        done += std::max(contact_s, kTimeEps);
        continue;
      }
      if (goal_s >= 0.0) {
        const double y = p0.y() + v0.y() * goal_s + 0.5 * a.y() * goal_s * goal_s;
        ball_pos_ = {gx, y};
        ball_vel_ = v0 + a * goal_s;
        ++goals_;
        tokens_.push_back("goal");
        done += std::max(goal_s, kTimeEps);
        continue;
      }
      ball_pos_ = p1;
      ball_vel_ = (h_seg >= t_stop) ? Eigen::Vector2d::Zero() : Eigen::Vector2d(v0 + a * h_seg);
      done += h_seg;
    }
  }

  void do_exchange(double t_abs) {
    AxisState sx, sy;
    planner_state(sx, sy);
    const SagittalPlan sag = plan_sagittal(sx, cfg_.robot.foot, cfg_.robot.gait, params_,
                                           0.0, cfg_.robot.limits);
    bool lat_clamped = false;
    const Eigen::Vector2d landing(sag.landing_offset_x, lateral_landing(sy, &lat_clamped));
    const double completed = elapsed_;
    const bool saturated = plan_.timing_unreachable || plan_.duration_clamped ||
                           lat_clamped || sag.landing_clamped;
    const Eigen::Vector2d old_support = support_pos_;
    support_pos_ += landing;
    com_x_.x -= landing.x();
    com_y_.x -= landing.y();
    support_ = mirror(support_);
    elapsed_ = 0.0;
    kick_.active = false;
    swing_liftoff_ = old_support - support_pos_;
    tokens_.push_back("exchange");
    max_step_ = std::max(max_step_, landing.norm());

    const GaitNominal& nom = cfg_.robot.gait;
    const double width = nom.lateral_step_width;
    const double length = nom.sagittal_step_length(params_);
    const bool nominal =
        std::abs(completed - nom.step_duration) <= 0.05 * nom.step_duration &&
        std::abs(std::abs(landing.y()) - width) <= 0.05 * width &&
        std::abs(landing.x() - length) <= std::max(0.05 * std::abs(length), 0.005);
    if (!nominal || saturated) ++capture_count_;
    if (push_seen_ && steps_to_recover_ < 0) {
      ++steps_since_push_;
      if (nominal && !saturated) steps_to_recover_ = steps_since_push_;
    }

    replan();
    maybe_schedule_kick(t_abs);
    if (kick_.active) replan();
  }

  void maybe_schedule_kick(double t_abs) {
    if (kick_.active || cfg_.ball_passes.empty()) return;
    const auto track = tracker_.fit();
    if (!track) return;
    const auto arrival = predict_arrival(*track, cfg_.kick.contact_line_x);
    if (!arrival) return;
    const double from_now = *arrival - (t_abs - track->t0);
    if (from_now < cfg_.kick.min_arrival || from_now > cfg_.kick.max_arrival) return;
    // Retime the strike, not the lateral clock: the step duration stays within
    // [0.6, 1.4] x nominal (the exchange lands after the lateral apex and the
    // landing offset stays reachable), and the forward-swing peak phase moves
    // to the predicted arrival instead.
    const GaitNominal& nom = cfg_.robot.gait;
    const double duration = std::clamp(from_now / kick_params_.phi_fw,
                                       0.6 * nom.step_duration, 1.4 * nom.step_duration);
    const double peak = from_now / duration;
    if (peak < 0.30 || peak > 0.86) return;
    kick_.active = true;
    kick_.contact_done = false;
    kick_.duration = duration;
    kick_.params = kick_params_;
    kick_.params.phi_fw = peak;
    kick_.gate_lo = peak - 0.2;
    kick_.gate_hi = std::min(peak + 0.2, 1.0);
    kick_.leg = mirror(support_);
    kick_.direction = 0.0;
    const double dt_epoch = *arrival;
    const double y_pred = track->p0.y() + track->v0.y() * dt_epoch +
                          0.5 * track->a0.y() * dt_epoch * dt_epoch;
    const Eigen::Vector2d foot = support_pos_ + swing_liftoff_;
    KickRequest request;
    request.ball_in_kick_frame = {cfg_.kick.contact_line_x - foot.x(), y_pred - foot.y()};
    request.kick_direction = kick_.direction;
    request.leg = kick_.leg;
    kick_.amplitudes = kick_amplitudes(request, kick_.params);
    tokens_.push_back("kick_start");
  }

  void check_finite() const {
    const bool ok = std::isfinite(com_x_.x) && std::isfinite(com_x_.v) &&
                    std::isfinite(com_y_.x) && std::isfinite(com_y_.v) &&
                    support_pos_.allFinite() && ball_pos_.allFinite() &&
                    ball_vel_.allFinite();
    if (!ok) {
      throw SimulationAbort("non-finite state at tick " + std::to_string(tick_), tick_);
    }
  }

  void record(double t) {
    TraceRecord r;
    r.t = t;
    r.com_x = support_pos_.x() + com_x_.x;
    r.com_y = support_pos_.y() + com_y_.x;
    r.vel_x = com_x_.v;
    r.vel_y = com_y_.v;
    const CoMAxisEstimate ex = estimator_.x();
    const CoMAxisEstimate ey = estimator_.y();
    r.est_x = ex.c;
    r.est_vx = ex.c_dot;
    r.est_ax = ex.c_ddot;
    r.est_y = ey.c;
    r.est_vy = ey.c_dot;
    r.est_ay = ey.c_ddot;
    r.zmp_x = plan_.zmp_offset.x();
    r.zmp_y = plan_.zmp_offset.y();
    r.step_duration = plan_.duration;
    r.step_x = plan_.landing_offset.x();
    r.step_y = plan_.landing_offset.y();
    r.support = side_char(support_);
    const double phi =
        plan_.duration > 0.0 ? std::clamp(elapsed_ / plan_.duration, 0.0, 1.0) : 0.0;
    r.gait_phase = phi;
    r.kick_phase = kick_.active ? phi : 0.0;
    r.ball_x = ball_pos_.x();
    r.ball_y = ball_pos_.y();
    // drive the swing composition; its output is a health surface for the run
    FootTarget foot = swing_target(phi, swing_liftoff_, plan_.landing_offset,
                                   cfg_.robot.lift_height);
    if (kick_.active) {
      foot = compose_with_kick(foot, phi, kick_.amplitudes, kick_.params,
                               kick_.direction, support_, kick_.leg);
    }
    if (!foot.position.allFinite()) {
      throw SimulationAbort("non-finite swing target at tick " + std::to_string(tick_),
                            tick_);
    }
    std::string event;
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
      if (i) event += ';';
      event += tokens_[i];
    }
    tokens_.clear();
    r.event = std::move(event);
    trace_.push_back(std::move(r));
  }

  // configuration and derived constants
  ScenarioConfig cfg_;
  PendulumParams params_;
  double tau_;
  KickParams kick_params_{};

  // robot state (CoM local to the support ankle)
  Side support_ = Side::kRight;
  Eigen::Vector2d support_pos_ = Eigen::Vector2d::Zero();
  AxisState com_x_{}, com_y_{};
  double elapsed_ = 0.0;
  StepPlan plan_{};
  double last_zmp_x_ = 0.0;
  Eigen::Vector2d swing_liftoff_ = Eigen::Vector2d::Zero();
  KickState kick_{};

  // ball
  Eigen::Vector2d ball_pos_ = Eigen::Vector2d::Zero();
  Eigen::Vector2d ball_vel_ = Eigen::Vector2d::Zero();
  BallTracker tracker_{};

  // sensing
  CoMEstimator estimator_;
  Rng rng_;
  Eigen::Matrix3d trunk_rot_ = Eigen::Matrix3d::Identity();
  double next_meas_t_ = 0.0;
  double last_meas_t_ = 0.0;

  // bookkeeping
  long tick_ = 0;
  std::size_t next_push_ = 0;
  std::size_t next_pass_ = 0;
  std::vector<std::string> tokens_;
  std::vector<TraceRecord> trace_;
  bool fell_ = false;
  double fall_accum_ = 0.0;
  bool push_seen_ = false;
  int steps_since_push_ = 0;
  int steps_to_recover_ = -1;
  double max_step_ = 0.0;
  int capture_count_ = 0;
  int goals_ = 0;
};

}  // namespace

RunResult run_scenario(const ScenarioConfig& config) {
  validate(config);
  World world(config);
  return world.run();
}

}  // namespace capsim::sim
