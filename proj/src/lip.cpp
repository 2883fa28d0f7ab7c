#include "capsim/lip.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace capsim {

namespace {

void check_finite(const AxisState& s, double pivot, const PendulumParams& p) {
  if (!(std::isfinite(s.x) && std::isfinite(s.v) && std::isfinite(pivot))) {
    throw std::invalid_argument("pendulum state must be finite");
  }
  if (!(p.com_height > 0.0) || !(p.gravity > 0.0)) {
    throw std::invalid_argument("pendulum height and gravity must be positive");
  }
}

}  // namespace

double PendulumParams::tau() const { return std::sqrt(com_height / gravity); }

AxisState propagate(const AxisState& s, double pivot, const PendulumParams& params, double dt) {
  check_finite(s, pivot, params);
  if (!(dt >= 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("propagation time must be finite and >= 0");
  }
  const double tau = params.tau();
  const double c = std::cosh(dt / tau);
  const double sh = std::sinh(dt / tau);
  const double r = s.x - pivot;
  return {pivot + r * c + s.v * tau * sh, (r / tau) * sh + s.v * c};
}

double orbital_energy(const AxisState& s, const PendulumParams& params) {
  check_finite(s, 0.0, params);
  const double tau = params.tau();
  return 0.5 * s.v * s.v - 0.5 * (s.x * s.x) / (tau * tau);
}

// x(t) = A cosh(t/tau) + B sinh(t/tau) with A = x0, B = v0*tau. Substituting
// u = exp(t/tau) turns x(t) = d into (A+B) u^2 - 2 d u + (A-B) = 0; real roots
// with u >= 1 are future crossings, t = tau * log(u).
int find_crossings(const AxisState& s, double target_x, const PendulumParams& params,
                   Crossing out[2]) {
  check_finite(s, target_x, params);
  const double tau = params.tau();
  const double a = s.x;
  const double b = s.v * tau;
  const double d = target_x;

  double roots[2];
  int n_roots = 0;
  const double lead = a + b;
  if (std::abs(lead) < 1e-300) {
    // Motion along the stable manifold: x(t) = (A-B)/2 * exp(-t/tau).
    if (d != 0.0) {
      const double u = (a - b) / (2.0 * d);
      if (u > 0.0) roots[n_roots++] = u;
    }
    // d == 0 is attained only asymptotically (or immediately if already there).
  } else {
    const double disc = d * d - a * a + b * b;
    if (disc >= 0.0) {
      const double sq = std::sqrt(disc);
      roots[n_roots++] = (d + sq) / lead;
      if (disc > 0.0) roots[n_roots++] = (d - sq) / lead;
    }
  }

  int n = 0;
  for (int i = 0; i < n_roots; ++i) {
    // u within one ulp of 1 counts as "now".
    const double u = roots[i] >= 1.0 ? roots[i] : (roots[i] > 1.0 - 1e-12 ? 1.0 : roots[i]);
    if (u >= 1.0) {
      const double t = tau * std::log(u);
      const double sh = 0.5 * (u - 1.0 / u);
      const double c = 0.5 * (u + 1.0 / u);
      out[n++] = {t, (a / tau) * sh + s.v * c};
    }
  }
  if (n == 2 && out[0].t > out[1].t) std::swap(out[0], out[1]);
  // An exact-equality start is a crossing at t = 0 even when the quadratic
  // degenerates (x = v = 0 on the stable manifold finds no root above).
  if (n == 0 && s.x == target_x) {
    out[0] = {0.0, s.v};
    n = 1;
  }
  return n;
}

std::optional<double> time_to_position(const AxisState& s, double target_x,
                                       const PendulumParams& params) {
  Crossing c[2];
  const int n = find_crossings(s, target_x, params, c);
  if (n == 0) return std::nullopt;
  return c[0].t;
}

}  // namespace capsim
