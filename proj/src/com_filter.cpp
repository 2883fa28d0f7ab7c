#include "capsim/com_filter.hpp"

#include <cmath>
#include <stdexcept>

namespace capsim {

Eigen::Vector3d remove_gravity(const TrunkImu& imu, double gravity) {
  const Eigen::Matrix3d& r = imu.orientation;
  if ((r * r.transpose() - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > 1e-6 ||
      r.determinant() < 0.0) {
    throw std::invalid_argument("trunk orientation must be a proper rotation");
  }
  if (!imu.accel_trunk.allFinite()) {
    throw std::invalid_argument("trunk acceleration must be finite");
  }
  return r * imu.accel_trunk - Eigen::Vector3d(0.0, 0.0, gravity);
}

AxisKalmanFilter::AxisKalmanFilter(const FilterConfig& config) : config_(config) {
  if (!(config.process_noise_jerk > 0.0) || !(config.meas_noise_pos > 0.0) ||
      !(config.meas_noise_acc > 0.0)) {
    throw std::invalid_argument("filter noise parameters must be positive");
  }
  const Eigen::Matrix3d& p0 = config.initial_covariance;
  if ((p0 - p0.transpose()).cwiseAbs().maxCoeff() > 1e-9 ||
      Eigen::LLT<Eigen::Matrix3d>(p0).info() != Eigen::Success) {
    throw std::invalid_argument("initial covariance must be symmetric positive definite");
  }
  P_ = p0;
}

void AxisKalmanFilter::predict(double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("prediction interval must be positive");
  }
  Eigen::Matrix3d f = Eigen::Matrix3d::Identity();
  f(0, 1) = dt;
  f(0, 2) = 0.5 * dt * dt;
  f(1, 2) = dt;

  // Exact discretization of continuous white jerk with spectral density q.
  const double q = config_.process_noise_jerk;
  const double d2 = dt * dt, d3 = d2 * dt, d4 = d3 * dt, d5 = d4 * dt;
  Eigen::Matrix3d qd;
  qd << d5 / 20.0, d4 / 8.0, d3 / 6.0,  //
      d4 / 8.0, d3 / 3.0, d2 / 2.0,     //
      d3 / 6.0, d2 / 2.0, dt;
  qd *= q;

  x_ = f * x_;
  P_ = f * P_ * f.transpose() + qd;
  P_ = 0.5 * (P_ + P_.transpose()).eval();
}

void AxisKalmanFilter::update(double pos, double acc) {
  if (!std::isfinite(pos) || !std::isfinite(acc)) {
    throw std::invalid_argument("measurements must be finite");
  }
  Eigen::Matrix<double, 2, 3> h = Eigen::Matrix<double, 2, 3>::Zero();
  h(0, 0) = 1.0;
  h(1, 2) = 1.0;
  Eigen::Matrix2d r = Eigen::Matrix2d::Zero();
  r(0, 0) = config_.meas_noise_pos * config_.meas_noise_pos;
  r(1, 1) = config_.meas_noise_acc * config_.meas_noise_acc;

  const Eigen::Vector2d innov = Eigen::Vector2d(pos, acc) - h * x_;
  const Eigen::Matrix2d s = h * P_ * h.transpose() + r;
  const Eigen::Matrix<double, 3, 2> k = P_ * h.transpose() * s.inverse();

  x_ += k * innov;
  const Eigen::Matrix3d ikh = Eigen::Matrix3d::Identity() - k * h;
  P_ = ikh * P_ * ikh.transpose() + k * r * k.transpose();
  P_ = 0.5 * (P_ + P_.transpose()).eval();
}

void AxisKalmanFilter::reset(const CoMAxisEstimate& state) {
  x_ = Eigen::Vector3d(state.c, state.c_dot, state.c_ddot);
  P_ = config_.initial_covariance;
}

CoMAxisEstimate AxisKalmanFilter::state() const { return {x_(0), x_(1), x_(2)}; }

CoMEstimator::CoMEstimator(const FilterConfig& config, double gravity)
    : fx_(config), fy_(config), gravity_(gravity) {}

void CoMEstimator::step(const Eigen::Vector2d& kinematic_com, const TrunkImu& imu, double dt) {
  const Eigen::Vector3d world_acc = remove_gravity(imu, gravity_);
  if (!initialized_) {
    fx_.reset({kinematic_com.x(), 0.0, world_acc.x()});
    fy_.reset({kinematic_com.y(), 0.0, world_acc.y()});
    initialized_ = true;
    return;
  }
  fx_.predict(dt);
  fy_.predict(dt);
  fx_.update(kinematic_com.x(), world_acc.x());
  fy_.update(kinematic_com.y(), world_acc.y());
}

void CoMEstimator::reset(const CoMAxisEstimate& x_axis, const CoMAxisEstimate& y_axis) {
  fx_.reset(x_axis);
  fy_.reset(y_axis);
  initialized_ = true;
}

}  // namespace capsim
