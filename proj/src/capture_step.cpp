#include "capsim/capture_step.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace capsim {

namespace {

double clamp_flag(double v, double lo, double hi, bool* flagged) {
  if (v < lo) { *flagged = true; return lo; }
  if (v > hi) { *flagged = true; return hi; }
  return v;
}

}  // namespace

double GaitNominal::lateral_exchange_speed(const PendulumParams& p) const {
  const double tau = p.tau();
  return support_exchange_offset / tau * std::tanh(0.5 * step_duration / tau);
}

double GaitNominal::lateral_orbital_energy(const PendulumParams& p) const {
  const double v = lateral_exchange_speed(p);
  const double tau = p.tau();
  const double x = support_exchange_offset;
  return 0.5 * v * v - 0.5 * (x * x) / (tau * tau);
}

double GaitNominal::lateral_apex_offset(const PendulumParams& p) const {
  return support_exchange_offset / std::cosh(0.5 * step_duration / p.tau());
}

double GaitNominal::sagittal_step_length(const PendulumParams& p) const {
  const double tau = p.tau();
  return 2.0 * apex_velocity_sagittal * tau * std::sinh(0.5 * step_duration / tau);
}

double GaitNominal::sagittal_exchange_speed(const PendulumParams& p) const {
  const double v = apex_velocity_sagittal;
  const double half = 0.5 * sagittal_step_length(p);
  const double tau = p.tau();
  return std::sqrt(v * v + (half * half) / (tau * tau));
}

LateralPlan plan_lateral(const AxisState& com_y, Side support, const GaitNominal& nominal,
                         const PendulumParams& params, const PlanLimits& limits,
                         double elapsed) {
  if (!(elapsed >= 0.0) || !std::isfinite(elapsed))
    throw std::invalid_argument("plan_lateral: elapsed must be finite and >= 0");
  if (!(nominal.step_duration > 0.0) || !(nominal.support_exchange_offset > 0.0))
    throw std::invalid_argument("plan_lateral: nominal gait must have positive duration and offset");

  const double tau = params.tau();
  const double sigma = nominal.support_exchange_offset;

  // Work on the side-agnostic lateral axis: positive = toward the swing side.
  const double m = side_sign(mirror(support));
  AxisState eta{m * com_y.x, m * com_y.v};

  LateralPlan plan;

  // Step timing: the exchange happens when the CoM next reaches the exchange
  // offset moving outward.
  Crossing crossings[2];
  const int n = find_crossings(eta, sigma, params, crossings);
  bool timed = false;
  AxisState at_exchange = eta;
  for (int i = 0; i < n; ++i) {
    if (crossings[i].v >= -1e-12) {
      plan.remaining = crossings[i].t;
      at_exchange = AxisState{sigma, crossings[i].v};
      timed = true;
      break;
    }
  }
  if (!timed) {
    if (eta.x >= sigma && eta.v >= 0.0) {
      // Already at or past the exchange offset and still moving out: exchange
      // immediately. This is the normal aftermath of a strong outward push.
      plan.remaining = 0.0;
    } else {
      // The CoM will cross over the support foot instead of returning; no
      // exchange time exists. Step as soon as possible and let the landing
      // offset do what it can.
      plan.timing_unreachable = true;
      plan.remaining = 0.0;
    }
  }

  plan.duration = clamp_flag(elapsed + plan.remaining,
                             limits.min_duration_scale * nominal.step_duration,
                             limits.max_duration_scale * nominal.step_duration,
                             &plan.duration_clamped);
  if (plan.duration_clamped) {
    plan.remaining = std::max(plan.duration - elapsed, 0.0);
    at_exchange = propagate(eta, 0.0, params, plan.remaining);
  }

  // Landing offset: place the foot so the next support phase carries the
  // nominal orbital energy. The root on the far side of the CoM is the one
  // where the new support foot is outside the CoM path.
  const double e_nom = nominal.lateral_orbital_energy(params);
  const double disc = at_exchange.v * at_exchange.v - 2.0 * e_nom;
  double f;
  if (disc >= 0.0) {
    f = at_exchange.x + tau * std::sqrt(disc);
  } else {
    // Unreachable energy (only possible for a degenerate nominal cycle).
    f = nominal.lateral_step_width;
    plan.landing_clamped = true;
  }
  f = clamp_flag(f, limits.reach_y_min, limits.reach_y_max, &plan.landing_clamped);

  plan.exchange_speed = at_exchange.v;
  plan.landing_offset_y = m * f;
  return plan;
}

SagittalPlan plan_sagittal(const AxisState& com_x, const FootGeometry& foot,
                           const GaitNominal& nominal, const PendulumParams& params,
                           double time_to_exchange, const PlanLimits& limits) {
  if (!(foot.zmp_min <= 0.0) || !(foot.zmp_max >= 0.0) || !(foot.zmp_min < foot.zmp_max))
    throw std::invalid_argument("plan_sagittal: foot must contain the ankle");
  if (!(time_to_exchange >= 0.0) || !std::isfinite(time_to_exchange))
    throw std::invalid_argument("plan_sagittal: time_to_exchange must be finite and >= 0");

  const double tau = params.tau();
  const double v_nom = nominal.apex_velocity_sagittal;

  SagittalPlan plan;

  // Pivot choice. A pivot offset p drains orbital energy about the ankle at
  // rate p*v/tau^2, so forward motion gets a pivot proportional to the energy
  // error: ahead of the ankle to brake a surplus, behind it to make up a
  // deficit, exactly at the ankle on the nominal orbit. Backward motion
  // instead gets a pivot far enough behind that the CoM is guaranteed to turn
  // around and come back up to the nominal speed; for a zero nominal speed
  // that degenerates to the capture pivot (glide to rest over it).
  static constexpr double kPivotGain = 1.0;  // s^2/m
  const double x = com_x.x;
  const double v = com_x.v;
  double p;
  if (v < 0.0) {
    p = x - tau * std::sqrt(v_nom * v_nom + v * v);
  } else {
    const double energy_error =
        0.5 * (v * v - v_nom * v_nom) - 0.5 * (x * x) / (tau * tau);
    p = kPivotGain * energy_error;
  }
  plan.zmp_offset_x = clamp_flag(p, foot.zmp_min, foot.zmp_max, &plan.zmp_clamped);

  // Landing offset: predict the exchange state under the commanded pivot and
  // place the foot so the next phase passes the apex at the nominal speed.
  // Pure energy matching alone leaves the entry position free to oscillate
  // step to step, so a fraction of the nominal entry position is blended in;
  // the blend vanishes on the nominal gait. A backward-moving CoM instead
  // gets a capture step that brings it to rest.
  static constexpr double kEntryBlend = 0.3;
  const AxisState ex = propagate(com_x, plan.zmp_offset_x, params, time_to_exchange);
  const double half_step = 0.5 * nominal.sagittal_step_length(params);
  double f;
  if (ex.v > 1e-12) {
    const double d = ex.v * ex.v - v_nom * v_nom;
    if (d >= 0.0) {
      f = ex.x + (1.0 - kEntryBlend) * tau * std::sqrt(d) + kEntryBlend * half_step;
      // Never step beyond the point the CoM cannot climb over.
      f = std::min(f, ex.x + 0.999 * tau * ex.v);
    } else {
      f = ex.x;
    }
  } else if (ex.v < -1e-12) {
    f = ex.x - tau * (-ex.v);
  } else {
    f = ex.x;
  }
  plan.landing_offset_x = clamp_flag(f, -limits.reach_x, limits.reach_x, &plan.landing_clamped);
  return plan;
}

StepPlan plan_step(const AxisState& com_x, const AxisState& com_y, Side support,
                   const GaitNominal& nominal, const FootGeometry& foot,
                   const PendulumParams& params, const PlanLimits& limits,
                   double elapsed) {
  const LateralPlan lat = plan_lateral(com_y, support, nominal, params, limits, elapsed);
  const SagittalPlan sag =
      plan_sagittal(com_x, foot, nominal, params, lat.remaining, limits);

  StepPlan plan;
  plan.duration = lat.duration;
  plan.remaining = lat.remaining;
  plan.landing_offset = {sag.landing_offset_x, lat.landing_offset_y};
  plan.zmp_offset = {sag.zmp_offset_x, 0.0};
  plan.timing_unreachable = lat.timing_unreachable;
  plan.duration_clamped = lat.duration_clamped;
  plan.landing_clamped = lat.landing_clamped || sag.landing_clamped;
  plan.zmp_clamped = sag.zmp_clamped;
  return plan;
}

}  // namespace capsim
