#pragma once

#include <Eigen/Dense>

#include <deque>
#include <optional>
#include <vector>

namespace capsim {

/// Walk command on the unit disk plus an independent turn channel.
struct GaitCommand {
  Eigen::Vector2d walk = Eigen::Vector2d::Zero();  // world frame, |walk| <= 1
  double turn = 0.0;                               // in [-1, 1]
};

struct BehaviorGains {
  double attract_gain = 1.0;
  double repel_gain = 0.05;
  double orthogonal_ball_gain = 0.05;
  double orthogonal_obstacle_gain = 0.05;
  double face_ball_gain = 1.5;
  double face_target_gain = 1.5;
  double obstacle_radius = 1.2;   // m, repulsion activation range
  double near_threshold = 0.5;    // m, where "near the behind-ball point" begins
  double standoff = 0.25;         // m, behind-ball distance
};

struct RobotPose {
  Eigen::Vector2d position = Eigen::Vector2d::Zero();
  double heading = 0.0;  // rad, world frame
};

struct Obstacle {
  Eigen::Vector2d position = Eigen::Vector2d::Zero();
  double radius = 0.0;  // m
};

/// Wraps an angle to (-pi, pi].
double wrap_angle(double a);

/// The staging point at `standoff` behind the ball on the target-ball line
/// extended. Throws if ball and target coincide.
Eigen::Vector2d behind_ball_position(const Eigen::Vector2d& ball,
                                     const Eigen::Vector2d& kick_target, double standoff);

/// Sums the attractive, repulsive, and circumvention forces into a walk
/// vector saturated to the unit disk; the turn channel faces the ball from
/// afar and blends toward the kick direction near the behind-ball point.
GaitCommand compute_command(const RobotPose& robot, const Eigen::Vector2d& ball,
                            const Eigen::Vector2d& kick_target,
                            const std::vector<Obstacle>& obstacles,
                            const BehaviorGains& gains);

struct BallDetection {
  double t = 0.0;  // s
  Eigen::Vector2d position = Eigen::Vector2d::Zero();
};

/// Constant-acceleration model of the ball about the newest detection time.
struct BallTrack {
  Eigen::Vector2d p0 = Eigen::Vector2d::Zero();
  Eigen::Vector2d v0 = Eigen::Vector2d::Zero();
  Eigen::Vector2d a0 = Eigen::Vector2d::Zero();
  double t0 = 0.0;            // s, fit epoch (newest detection)
  double residual_rms = 0.0;  // m
};

/// Least-squares quadratic fit per axis. Requires >= 3 detections with
/// strictly increasing timestamps; exact on noise-free quadratics.
BallTrack fit_ball_track(const std::vector<BallDetection>& detections);

/// Time from the fit epoch until the ball first crosses the vertical line
/// x = contact_line_x, or nullopt if it never does (including when it rolls
/// to a stop first: a deceleration never reverses the ball).
std::optional<double> predict_arrival(const BallTrack& track, double contact_line_x);

/// True iff the predicted arrival falls inside [kick_lead - tolerance,
/// kick_lead + tolerance].
bool should_kick(const BallTrack& track, double contact_line_x, double kick_lead,
                 double tolerance);

/// Bounded sliding window of detections (newest 20 within 1 s by default).
class BallTracker {
 public:
  explicit BallTracker(std::size_t max_points = 20, double max_age = 1.0);

  /// Adds a detection; timestamps must be strictly increasing.
  void add(double t, const Eigen::Vector2d& position);
  /// Fit over the current window, or nullopt with fewer than 3 points.
  std::optional<BallTrack> fit() const;
  void clear();
  std::size_t size() const { return window_.size(); }

 private:
  std::size_t max_points_;
  double max_age_;
  std::deque<BallDetection> window_;
};

}  // namespace capsim
