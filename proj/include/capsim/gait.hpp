#pragma once

#include <Eigen/Dense>

#include "capsim/capture_step.hpp"
#include "capsim/inwalk_kick.hpp"
#include "capsim/side.hpp"

namespace capsim {

/// Step-phase clock. phi runs 0 -> 1 over one step; support flips on wrap.
struct GaitPhase {
  double phi = 0.0;
  Side support = Side::kRight;
  double frequency_multiplier = 1.0;  // rate scale applied on the last advance
};

struct PhaseAdvance {
  double consumed = 0.0;  // seconds of dt used before the step completed
  bool exchanged = false;
};

/// Advances the phase at rate 1/step_duration, expressed as a multiplier on
/// the nominal rate and clamped to [min_multiplier, max_multiplier]. The
/// advance stops exactly at a support exchange (phi wraps to 0, support
/// flips) and reports how much of dt was consumed, so a caller can replan and
/// spend the remainder of the tick under the new step.
PhaseAdvance advance_phase(GaitPhase& phase, double step_duration,
                           const GaitNominal& nominal, double dt,
                           double min_multiplier = 0.3, double max_multiplier = 3.0);

/// Swing-foot target in the support-foot frame.
struct FootTarget {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
};

/// Horizontal half-cosine from liftoff to landing with a sinusoidal lift:
/// zero velocity at both ends, peak height at mid-swing.
FootTarget swing_target(double phi, const Eigen::Vector2d& liftoff,
                        const Eigen::Vector2d& landing, double lift_height);

/// Adds the kick deflection (rotated from the kick frame into the local
/// frame) on top of the base swing target. The kicking leg must be the swing
/// leg.
FootTarget compose_with_kick(const FootTarget& base, double phi,
                             const KickAmplitudes& amplitudes, const KickParams& params,
                             double kick_direction, Side support, Side kick_leg);

}  // namespace capsim
