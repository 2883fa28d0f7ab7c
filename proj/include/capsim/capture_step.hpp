#pragma once

#include <Eigen/Dense>

#include "capsim/lip.hpp"
#include "capsim/side.hpp"

namespace capsim {

/// The periodic gait the planner steers back to. All derived quantities are
/// computed on demand so the nominal cycle is always self-consistent.
struct GaitNominal {
  double step_duration = 0.5;            // s
  double lateral_step_width = 0.30;      // m between consecutive footprints
  double support_exchange_offset = 0.15; // m, CoM offset (toward the swing side) at exchange
  double apex_velocity_sagittal = 0.0;   // m/s, forward speed over the support foot

  /// CoM speed away from the support foot at the nominal exchange.
  double lateral_exchange_speed(const PendulumParams& p) const;
  /// Orbital energy of the nominal lateral oscillation (negative: the CoM
  /// turns around before the foot).
  double lateral_orbital_energy(const PendulumParams& p) const;
  /// Closest nominal approach of the CoM to the support foot.
  double lateral_apex_offset(const PendulumParams& p) const;
  /// Nominal forward step length implied by the apex velocity.
  double sagittal_step_length(const PendulumParams& p) const;
  /// Forward speed at the nominal support exchange.
  double sagittal_exchange_speed(const PendulumParams& p) const;
};

/// Admissible ZMP range within the support foot, relative to the ankle.
struct FootGeometry {
  double zmp_min = -0.05;  // m, heel
  double zmp_max = 0.10;   // m, toe
};

/// Bounds on what a planned step may command.
struct PlanLimits {
  double min_duration_scale = 0.3;  // x nominal step duration
  double max_duration_scale = 2.5;
  double reach_x = 0.5;       // m, sagittal landing offset bound (symmetric)
  double reach_y_min = 0.15;  // m, lateral landing offset, toward the swing side only
  double reach_y_max = 0.55;
};

struct LateralPlan {
  double duration = 0.0;   // s, full commanded duration of the current step
  double remaining = 0.0;  // s until the planned exchange
  double landing_offset_y = 0.0;  // m, signed, relative to the support foot
  double exchange_speed = 0.0;    // m/s, predicted |CoM| speed away from support at exchange
  bool timing_unreachable = false;  // CoM will cross over the support foot
  bool duration_clamped = false;
  bool landing_clamped = false;
};

struct SagittalPlan {
  double zmp_offset_x = 0.0;      // m within the foot
  double landing_offset_x = 0.0;  // m, relative to the support foot
  bool zmp_clamped = false;
  bool landing_clamped = false;
};

/// A full step command, refreshed every control tick.
struct StepPlan {
  double duration = 0.0;  // s, full duration of the current step since its exchange
  double remaining = 0.0; // s until the next exchange
  Eigen::Vector2d landing_offset = Eigen::Vector2d::Zero();  // m, relative to support foot
  Eigen::Vector2d zmp_offset = Eigen::Vector2d::Zero();      // m within the foot
  bool timing_unreachable = false;
  bool duration_clamped = false;
  bool landing_clamped = false;
  bool zmp_clamped = false;

  bool saturated() const { return timing_unreachable || duration_clamped || landing_clamped; }
};

/// Lateral half of the planner: step timing from the time the CoM needs to
/// return to the support-exchange offset, landing offset from matching the
/// post-exchange orbital energy to the nominal one.
///
/// `com_y` is the lateral CoM state relative to the support foot (world
/// orientation, y positive left); `elapsed` is time since the step began.
LateralPlan plan_lateral(const AxisState& com_y, Side support, const GaitNominal& nominal,
                         const PendulumParams& params, const PlanLimits& limits = {},
                         double elapsed = 0.0);

/// Sagittal half: the ZMP absorbs what the foot can (energy-matched pivot,
/// saturated into the foot box), the landing offset absorbs the rest so the
/// next step reaches the nominal apex velocity.
SagittalPlan plan_sagittal(const AxisState& com_x, const FootGeometry& foot,
                           const GaitNominal& nominal, const PendulumParams& params,
                           double time_to_exchange, const PlanLimits& limits = {});

/// Composition: the lateral plan fixes the clock, the sagittal plan fills in
/// the ZMP and forward landing offset at that exchange time.
StepPlan plan_step(const AxisState& com_x, const AxisState& com_y, Side support,
                   const GaitNominal& nominal, const FootGeometry& foot,
                   const PendulumParams& params, const PlanLimits& limits = {},
                   double elapsed = 0.0);

}  // namespace capsim
