#include "capsim/gait.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace capsim {

PhaseAdvance advance_phase(GaitPhase& phase, double step_duration,
                           const GaitNominal& nominal, double dt,
                           double min_multiplier, double max_multiplier) {
  if (!(step_duration > 0.0) || !std::isfinite(step_duration))
    throw std::invalid_argument("advance_phase: step_duration must be positive");
  if (!(dt >= 0.0) || !std::isfinite(dt))
    throw std::invalid_argument("advance_phase: dt must be finite and >= 0");
  if (!(nominal.step_duration > 0.0))
    throw std::invalid_argument("advance_phase: nominal step duration must be positive");

  const double mult = std::clamp(nominal.step_duration / step_duration,
                                 min_multiplier, max_multiplier);
  phase.frequency_multiplier = mult;
  const double rate = mult / nominal.step_duration;

  PhaseAdvance out;
  const double to_wrap = (1.0 - phase.phi) / rate;
  if (dt >= to_wrap) {
    out.consumed = to_wrap;
    out.exchanged = true;
    phase.phi = 0.0;
    phase.support = mirror(phase.support);
  } else {
    out.consumed = dt;
    phase.phi += dt * rate;
  }
  return out;
}

FootTarget swing_target(double phi, const Eigen::Vector2d& liftoff,
                        const Eigen::Vector2d& landing, double lift_height) {
  if (!(phi >= 0.0) || !(phi <= 1.0))
    throw std::invalid_argument("swing_target: phi must be in [0, 1]");
  const double s = 0.5 * (1.0 - std::cos(std::numbers::pi * phi));
  FootTarget t;
  t.position.head<2>() = liftoff + s * (landing - liftoff);
  t.position.z() = lift_height * std::sin(std::numbers::pi * phi);
  return t;
}

FootTarget compose_with_kick(const FootTarget& base, double phi,
                             const KickAmplitudes& amplitudes, const KickParams& params,
                             double kick_direction, Side support, Side kick_leg) {
  if (kick_leg == support)
    throw std::invalid_argument("compose_with_kick: the kicking leg must be the swing leg");
  const Eigen::Vector2d deflection =
      kick_frame_to_local(compose_kick(phi, amplitudes, params), kick_direction);
  FootTarget t = base;
  t.position.head<2>() += deflection;
  return t;
}

}  // namespace capsim
