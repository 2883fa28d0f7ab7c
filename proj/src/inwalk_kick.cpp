#include "capsim/inwalk_kick.hpp"

#include <cmath>
#include <stdexcept>

namespace capsim {

double bezier_blend(double phi, double y0, double yf, double c) {
  if (!(phi >= 0.0 && phi <= 1.0)) {
    throw std::invalid_argument("blend phase must lie in [0, 1]");
  }
  const double u = 1.0 - phi;
  const double shape = 6.0 * u * u * phi * phi * c + 4.0 * u * phi * phi * phi +
                       phi * phi * phi * phi;
  return y0 + (yf - y0) * shape;
}

double swing(double phi, const SwingSpec& spec) {
  if (!(phi >= 0.0 && phi <= 1.0)) {
    throw std::invalid_argument("swing phase must lie in [0, 1]");
  }
  if (!(spec.peak_phase > 0.0 && spec.peak_phase < 1.0)) {
    throw std::invalid_argument("swing peak phase must lie in (0, 1)");
  }
  if (phi < spec.peak_phase) {
    return bezier_blend(phi / spec.peak_phase, 0.0, spec.amplitude, spec.curvature);
  }
  return bezier_blend((phi - spec.peak_phase) / (1.0 - spec.peak_phase), spec.amplitude, 0.0,
                      1.0 - spec.curvature);
}

KickAmplitudes kick_amplitudes(const KickRequest& request, const KickParams& params) {
  // Amplitude that would put the contact point exactly at the ball, then
  // pulled toward the optimal amplitude; the backswing keeps the sum honest.
  const double alpha_x =
      request.ball_in_kick_frame.x() - params.optimal_distance + params.alpha_opt;
  KickAmplitudes a;
  a.forward = alpha_x + params.strength_blend * (params.alpha_opt - alpha_x);
  a.backward = a.forward - params.alpha_opt;
  a.lateral = request.ball_in_kick_frame.y();
  return a;
}

Eigen::Vector2d compose_kick(double phi, const KickAmplitudes& amplitudes,
                             const KickParams& params) {
  const double fw = swing(phi, {amplitudes.forward, params.phi_fw, params.c_fw});
  const double bw = swing(phi, {amplitudes.backward, params.phi_bw, params.c_bw});
  const double adj = swing(phi, {amplitudes.lateral, params.phi_adj, params.c_adj});
  return {fw + bw, adj};
}

bool feasible(double direction, Side leg, const FeasibilitySector& sector) {
  const double d = leg == Side::kRight ? direction : -direction;
  return d >= sector.min_angle && d <= sector.max_angle;
}

Eigen::Vector2d kick_frame_to_local(const Eigen::Vector2d& kick_xy, double kick_direction) {
  const double c = std::cos(kick_direction);
  const double s = std::sin(kick_direction);
  return {kick_xy.x() * c - kick_xy.y() * s, kick_xy.x() * s + kick_xy.y() * c};
}

}  // namespace capsim
