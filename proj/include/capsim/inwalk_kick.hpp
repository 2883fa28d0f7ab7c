#pragma once

#include <Eigen/Dense>

#include "capsim/side.hpp"

namespace capsim {

/// One bell-shaped swing curve: rise from 0 to `amplitude` peaking at
/// `peak_phase`, then return to 0 at phase 1. Slopes vanish at 0, peak and 1.
struct SwingSpec {
  double amplitude = 0.0;   // m, may be negative (backswing)
  double peak_phase = 0.5;  // in (0, 1)
  // Curvature gain of the rising blend; the falling half uses 1 - c. Peak
  // amplitude equals `amplitude` for c in [0, 1]; values outside that range
  // can overshoot the peak.
  double curvature = 0.5;
};

/// Swing-curve phases and shape gains for the in-walk kick.
struct KickParams {
  double phi_fw = 0.60;          // forward-swing peak phase
  double phi_bw = 0.25;          // backswing peak phase
  double phi_adj = 0.30;         // lateral-adjust peak phase
  double c_fw = 0.5;
  double c_bw = 0.5;
  double c_adj = 0.5;
  double strength_blend = 0.8;   // pull of the forward amplitude toward optimal
  double alpha_opt = 0.30;       // m, optimal kick amplitude
  double optimal_distance = 0.12;  // m, ideal ball distance ahead of the foot
};

/// Amplitudes of the three swing curves for one kick.
struct KickAmplitudes {
  double forward = 0.0;   // m
  double backward = 0.0;  // m (signed; negative = true backswing)
  double lateral = 0.0;   // m
};

/// A kick the behavior layer asks the gait to perform.
struct KickRequest {
  Eigen::Vector2d ball_in_kick_frame = Eigen::Vector2d::Zero();  // m, origin at foot center
  double kick_direction = 0.0;  // rad, robot frame, 0 = ahead, positive = CCW (left)
  Side leg = Side::kRight;
};

/// Feasible kick directions for the right leg; the left leg mirrors it.
/// Angles are robot-frame CCW radians (0 = straight ahead, positive = left),
/// so the right leg covers front through right-side kicks plus a small
/// cross-body allowance.
struct FeasibilitySector {
  double min_angle = -1.7453292519943295;  // -100 deg
  double max_angle = 0.5235987755982988;   // +30 deg
};

/// Quartic blend between y0 and yf:
///   y0 + (yf - y0) * (6 (1-phi)^2 phi^2 c + 4 (1-phi) phi^3 + phi^4).
/// Endpoints are anchored with zero slope. Throws std::invalid_argument for
/// phi outside [0, 1].
double bezier_blend(double phi, double y0, double yf, double c);

/// Piecewise swing: blend 0 -> amplitude with gain c up to peak_phase, then
/// amplitude -> 0 with gain 1-c. C1-continuous at the junction. Throws for
/// phi outside [0, 1] or peak_phase outside (0, 1).
double swing(double phi, const SwingSpec& spec);

/// Forward/backward/lateral amplitudes for a ball at `ball_in_kick_frame`.
/// The forward amplitude is pulled toward the optimal amplitude by
/// `strength_blend`; the backswing absorbs the difference so the contact
/// point stays at the ball.
KickAmplitudes kick_amplitudes(const KickRequest& request, const KickParams& params);

/// Total kick-frame foot offset at `phi`: x = forward + backward swings,
/// y = lateral adjustment. Zero at phi in {0, 1}.
Eigen::Vector2d compose_kick(double phi, const KickAmplitudes& amplitudes,
                             const KickParams& params);

/// Whether `direction` is inside the leg's feasible sector.
bool feasible(double direction, Side leg, const FeasibilitySector& sector = {});

/// Rotate a kick-frame offset into the robot's sagittal/lateral axes:
/// sagittal = x cos(theta) - y sin(theta), lateral = x sin(theta) + y cos(theta).
Eigen::Vector2d kick_frame_to_local(const Eigen::Vector2d& kick_xy, double kick_direction);

}  // namespace capsim
