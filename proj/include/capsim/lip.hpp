#pragma once

#include <optional>

namespace capsim {

/// Constant-height linear inverted pendulum parameters.
struct PendulumParams {
  double com_height = 0.9;  // m, pendulum (CoM) height above the pivot
  double gravity = 9.81;    // m/s^2

  /// Time constant sqrt(h/g). Always derived, never cached.
  double tau() const;
};

/// One horizontal axis of the CoM: position and velocity.
struct AxisState {
  double x = 0.0;  // m
  double v = 0.0;  // m/s
};

/// Advance the pendulum by dt about a fixed pivot (ZMP) p.
/// Dynamics x'' = (x - p) / tau^2, solved in closed form.
/// Throws std::invalid_argument for dt < 0 or non-finite input.
AxisState propagate(const AxisState& s, double pivot, const PendulumParams& params, double dt);

/// Orbital energy v^2/2 - x^2/(2 tau^2) with the pivot at the origin.
/// Conserved along trajectories about that pivot. Negative energy means the
/// CoM turns around before reaching the pivot; positive means it passes over.
double orbital_energy(const AxisState& s, const PendulumParams& params);

/// Smallest t >= 0 with x(t) == target_x, pivot at the origin.
/// nullopt when the trajectory never attains the target.
std::optional<double> time_to_position(const AxisState& s, double target_x,
                                       const PendulumParams& params);

/// A future crossing of a target position: time and the velocity there.
struct Crossing {
  double t = 0.0;
  double v = 0.0;
};

/// All t >= 0 with x(t) == target_x (at most two), ascending in t.
/// Returns the count and fills `out`. Used by planners that must pick a
/// crossing by travel direction rather than the earliest one.
int find_crossings(const AxisState& s, double target_x, const PendulumParams& params,
                   Crossing out[2]);

}  // namespace capsim
