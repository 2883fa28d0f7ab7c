#include "capsim/behavior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace capsim {

namespace {

constexpr double kDistanceFloor = 0.01;  // m, keeps the repulsion law finite

Eigen::Vector2d rot90(const Eigen::Vector2d& v) { return {-v.y(), v.x()}; }

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

void check_finite(const Eigen::Vector2d& v, const char* what) {
  if (!v.allFinite()) throw std::invalid_argument(std::string(what) + " must be finite");
}

}  // namespace

double wrap_angle(double a) {
  const double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a, two_pi);
  if (a <= -std::numbers::pi) a += two_pi;
  if (a > std::numbers::pi) a -= two_pi;
  return a;
}

Eigen::Vector2d behind_ball_position(const Eigen::Vector2d& ball,
                                     const Eigen::Vector2d& kick_target,
                                     double standoff) {
  check_finite(ball, "behind_ball_position: ball");
  check_finite(kick_target, "behind_ball_position: kick_target");
  const Eigen::Vector2d away = ball - kick_target;
  const double d = away.norm();
  if (d <= 0.0)
    throw std::invalid_argument("behind_ball_position: ball and target coincide");
  return ball + away / d * standoff;
}

GaitCommand compute_command(const RobotPose& robot, const Eigen::Vector2d& ball,
                            const Eigen::Vector2d& kick_target,
                            const std::vector<Obstacle>& obstacles,
                            const BehaviorGains& gains) {
  check_finite(robot.position, "compute_command: robot position");
  check_finite(ball, "compute_command: ball");

  const Eigen::Vector2d staging = behind_ball_position(ball, kick_target, gains.standoff);
  const Eigen::Vector2d to_staging = staging - robot.position;
  const double staging_dist = to_staging.norm();
  const Eigen::Vector2d staging_dir =
      staging_dist > 0.0 ? Eigen::Vector2d(to_staging / staging_dist)
                         : Eigen::Vector2d::Zero();

  Eigen::Vector2d force = gains.attract_gain * to_staging;

  // Ball circumvention: when the ball sits between the robot and the staging
  // point, slide around it instead of walking through. The gate vanishes as
  // the robot converges on the staging point.
  {
    const Eigen::Vector2d to_ball = ball - robot.position;
    const double d = to_ball.norm();
    if (d > kDistanceFloor && staging_dist > 0.0) {
      const Eigen::Vector2d dir = to_ball / d;
      // Only active when the staging point lies beyond the ball, i.e. the
      // straight path would pass through it. A robot already behind the ball
      // feels pure attraction.
      const double overshoot = dir.dot(to_staging) - d;
      const double ahead = clamp01(overshoot / gains.near_threshold);
      const Eigen::Vector2d n = rot90(dir);
      const double side = n.dot(staging - ball) >= 0.0 ? 1.0 : -1.0;
      force += gains.orthogonal_ball_gain * ahead * side * n / d;
    }
  }

  for (const Obstacle& obs : obstacles) {
    const Eigen::Vector2d away = robot.position - obs.position;
    const double d = away.norm();
    if (d >= gains.obstacle_radius || d <= 0.0) continue;
    const double gap = std::max(d - obs.radius, kDistanceFloor);
    const Eigen::Vector2d dir = away / d;
    force += gains.repel_gain / (gap * gap) * dir;

    // Circumvention: perpendicular to the robot-obstacle line, active only
    // while the obstacle is ahead, steering toward the staging point's side.
    const double ahead = std::max(0.0, -dir.dot(staging_dir));
    if (ahead > 0.0) {
      const Eigen::Vector2d n = rot90(-dir);
      const double side = n.dot(staging - obs.position) >= 0.0 ? 1.0 : -1.0;
      force += gains.orthogonal_obstacle_gain * ahead * side * n / (gap * gap);
    }
  }

  GaitCommand cmd;
  const double norm = force.norm();
  cmd.walk = norm > 1.0 ? Eigen::Vector2d(force / norm) : force;

  // Far away: face the ball. Near the staging point: face the kick direction.
  const Eigen::Vector2d to_ball = ball - robot.position;
  const double bearing_ball = std::atan2(to_ball.y(), to_ball.x());
  const Eigen::Vector2d kick_dir = kick_target - ball;
  const double bearing_kick = std::atan2(kick_dir.y(), kick_dir.x());
  const double err_ball =
      to_ball.norm() > kDistanceFloor ? wrap_angle(bearing_ball - robot.heading) : 0.0;
  const double err_kick = wrap_angle(bearing_kick - robot.heading);
  const double w = clamp01((staging_dist - gains.near_threshold) / gains.near_threshold);
  const double turn = (w * gains.face_ball_gain * err_ball +
                       (1.0 - w) * gains.face_target_gain * err_kick) /
                      std::numbers::pi;
  cmd.turn = std::clamp(turn, -1.0, 1.0);
  return cmd;
}

BallTrack fit_ball_track(const std::vector<BallDetection>& detections) {
  const std::size_t n = detections.size();
  if (n < 3)
    throw std::invalid_argument("fit_ball_track: need at least 3 detections");
  for (std::size_t i = 1; i < n; ++i) {
    if (!(detections[i].t > detections[i - 1].t))
      throw std::invalid_argument("fit_ball_track: timestamps must be strictly increasing");
  }

  const double t0 = detections.back().t;
  Eigen::MatrixXd basis(n, 3);
  Eigen::MatrixXd obs(n, 2);
  for (std::size_t i = 0; i < n; ++i) {
    const double dt = detections[i].t - t0;
    basis(i, 0) = 1.0;
    basis(i, 1) = dt;
    basis(i, 2) = 0.5 * dt * dt;
    obs.row(i) = detections[i].position.transpose();
  }

  const Eigen::Matrix<double, 3, 2> coef =
      basis.colPivHouseholderQr().solve(obs);

  BallTrack track;
  track.t0 = t0;
  track.p0 = coef.row(0).transpose();
  track.v0 = coef.row(1).transpose();
  track.a0 = coef.row(2).transpose();
  track.residual_rms =
      std::sqrt((basis * coef - obs).squaredNorm() / static_cast<double>(n));
  return track;
}

std::optional<double> predict_arrival(const BallTrack& track, double contact_line_x) {
  const double p = track.p0.x() - contact_line_x;
  const double v = track.v0.x();
  const double a = track.a0.x();

  // A decelerating ball stops for good when its velocity reaches zero.
  const double t_valid =
      (v != 0.0 && a != 0.0 && v * a < 0.0) ? -v / a
                                            : std::numeric_limits<double>::infinity();

  double best = std::numeric_limits<double>::infinity();
  auto consider = [&](double t) {
    if (t >= -1e-12 && t <= t_valid * (1.0 + 1e-12) + 1e-12)
      best = std::min(best, std::max(t, 0.0));
  };

  if (a == 0.0) {
    if (v != 0.0) consider(-p / v);
    else if (p == 0.0) return 0.0;
  } else {
    // 0.5*a*t^2 + v*t + p = 0, robust to a tiny negative discriminant
    double disc = v * v - 2.0 * a * p;
    if (disc > -1e-12 * std::max(1.0, v * v)) {
      disc = std::max(disc, 0.0);
      const double sq = std::sqrt(disc);
      // Numerically stable pair of roots
      const double q = -0.5 * (v + (v >= 0.0 ? sq : -sq));
      if (a != 0.0) consider(q / (0.5 * a));
      if (q != 0.0) consider(p / q);
      else consider(0.0);
    }
  }
  if (!std::isfinite(best)) return std::nullopt;
  return best;
}

bool should_kick(const BallTrack& track, double contact_line_x, double kick_lead,
                 double tolerance) {
  const std::optional<double> arrival = predict_arrival(track, contact_line_x);
  if (!arrival) return false;
  return *arrival >= kick_lead - tolerance && *arrival <= kick_lead + tolerance;
}

BallTracker::BallTracker(std::size_t max_points, double max_age)
    : max_points_(max_points), max_age_(max_age) {
  if (max_points < 3)
    throw std::invalid_argument("BallTracker: window must hold at least 3 points");
  if (!(max_age > 0.0))
    throw std::invalid_argument("BallTracker: max_age must be positive");
}

void BallTracker::add(double t, const Eigen::Vector2d& position) {
  if (!window_.empty() && !(t > window_.back().t))
    throw std::invalid_argument("BallTracker: timestamps must be strictly increasing");
  window_.push_back({t, position});
  while (window_.size() > max_points_ || window_.front().t < t - max_age_)
    window_.pop_front();
}

std::optional<BallTrack> BallTracker::fit() const {
  if (window_.size() < 3) return std::nullopt;
  return fit_ball_track({window_.begin(), window_.end()});
}

void BallTracker::clear() { window_.clear(); }

}  // namespace capsim
