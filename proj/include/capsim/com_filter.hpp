#pragma once

#include <Eigen/Dense>

namespace capsim {

/// Trunk IMU sample: proper acceleration in the trunk frame plus the trunk
/// orientation (rotation trunk -> world).
struct TrunkImu {
  Eigen::Vector3d accel_trunk = Eigen::Vector3d::Zero();  // m/s^2
  Eigen::Matrix3d orientation = Eigen::Matrix3d::Identity();
};

/// Filtered state of one horizontal CoM axis.
struct CoMAxisEstimate {
  double c = 0.0;       // m
  double c_dot = 0.0;   // m/s
  double c_ddot = 0.0;  // m/s^2
};

struct FilterConfig {
  double process_noise_jerk = 50.0;  // (m/s^3)^2, white-jerk spectral density
  double meas_noise_pos = 2e-3;      // m, std dev of the kinematic CoM position
  double meas_noise_acc = 0.3;       // m/s^2, std dev of the world-frame acceleration
  Eigen::Matrix3d initial_covariance =
      (Eigen::Vector3d(1e-4, 1e-2, 1.0)).asDiagonal();  // symmetric positive definite
};

/// World-frame CoM acceleration from a trunk IMU sample: rotate the proper
/// acceleration into the world and subtract gravity. Throws
/// std::invalid_argument unless `orientation` is a proper rotation (orthonormal,
/// det +1, within 1e-6).
Eigen::Vector3d remove_gravity(const TrunkImu& imu, double gravity);

/// Kalman filter over (c, c_dot, c_ddot) for one axis: triple-integrator
/// process driven by white jerk noise, measuring position and acceleration.
class AxisKalmanFilter {
 public:
  explicit AxisKalmanFilter(const FilterConfig& config);

  /// Time update over dt > 0 (throws std::invalid_argument otherwise).
  void predict(double dt);
  /// Measurement update with a (position, acceleration) pair.
  /// Covariance update uses the Joseph form and is re-symmetrized.
  void update(double pos, double acc);

  /// Hard-set the state (used to seed from a known initial condition).
  void reset(const CoMAxisEstimate& state);

  CoMAxisEstimate state() const;
  const Eigen::Matrix3d& covariance() const { return P_; }

 private:
  FilterConfig config_;
  Eigen::Vector3d x_ = Eigen::Vector3d::Zero();
  Eigen::Matrix3d P_;
};

/// Two independent axis filters fed from kinematic CoM position and the
/// gravity-corrected IMU acceleration. The vertical axis is dropped.
class CoMEstimator {
 public:
  CoMEstimator(const FilterConfig& config, double gravity);

  /// One fused step: predict over dt, then update with the kinematic CoM
  /// position (world, xy) and the IMU sample. The first call initializes the
  /// state from the measurements instead of filtering.
  void step(const Eigen::Vector2d& kinematic_com, const TrunkImu& imu, double dt);

  /// Seed both axes from a known state (position, velocity, acceleration).
  void reset(const CoMAxisEstimate& x_axis, const CoMAxisEstimate& y_axis);

  bool initialized() const { return initialized_; }
  CoMAxisEstimate x() const { return fx_.state(); }
  CoMAxisEstimate y() const { return fy_.state(); }

 private:
  AxisKalmanFilter fx_;
  AxisKalmanFilter fy_;
  double gravity_;
  bool initialized_ = false;
};

}  // namespace capsim
