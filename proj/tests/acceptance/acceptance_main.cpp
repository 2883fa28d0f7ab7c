// Acceptance gate: end-to-end checks of the library and the scenario
// simulator, one criterion per entry. Each prints PASS/FAIL with its
// runtime; the exit code is the number of failed criteria. Unlike the unit
// tests, everything here goes through public entry points only.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "capsim/behavior.hpp"
#include "capsim/capture_step.hpp"
#include "capsim/com_filter.hpp"
#include "capsim/inwalk_kick.hpp"
#include "capsim/lip.hpp"
#include "capsim/side.hpp"
#include "capsim/sim/batch.hpp"
#include "capsim/sim/config.hpp"
#include "capsim/sim/trace.hpp"
#include "capsim/sim/world.hpp"
#include "support/oracles.hpp"

namespace {

using capsim::sim::RunResult;
using capsim::sim::ScenarioConfig;
using capsim::sim::TraceRecord;

std::string msg(const char* fmt, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, fmt);
  vsnprintf(buf, sizeof buf, fmt, ap);
  va_end(ap);
  return buf;
}

/// Collects failure messages; a criterion passes when none accumulate.
struct Checker {
  std::vector<std::string> fails;
  void require(bool ok, const std::string& what) {
    if (!ok) fails.push_back(what);
  }
};

bool has_token(const std::string& event, const std::string& token) {
  std::size_t pos = 0;
  while (pos <= event.size()) {
    const std::size_t semi = event.find(';', pos);
    const std::size_t end = (semi == std::string::npos) ? event.size() : semi;
    if (event.compare(pos, end - pos, token) == 0) return true;
    if (semi == std::string::npos) break;
    pos = semi + 1;
  }
  return false;
}

std::vector<std::size_t> token_rows(const std::vector<TraceRecord>& trace,
                                    const std::string& token) {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < trace.size(); ++i)
    if (has_token(trace[i].event, token)) rows.push_back(i);
  return rows;
}

/// One-sided second-order finite difference; dir = +1 probes into x > x0,
/// dir = -1 into x < x0. Exact on quadratics, so it resolves flat endpoints
/// of the swing curves without stepping outside their domain.
template <typename F>
double edge_slope(F f, double x0, double h, int dir) {
  const double s = static_cast<double>(dir);
  return (4.0 * f(x0 + s * h) - f(x0 + 2.0 * s * h) - 3.0 * f(x0)) / (2.0 * s * h);
}

Eigen::Vector2d rot2(const Eigen::Vector2d& v, double th) {
  return {v.x() * std::cos(th) - v.y() * std::sin(th),
          v.x() * std::sin(th) + v.y() * std::cos(th)};
}

// ---------------------------------------------------------------------------
// 1. Swing-curve suite: endpoint anchoring, zero endpoint slope, peak
//    attainment and a C1 junction, over randomized specs.

void swing_curve_suite(Checker& ck) {
  ck.require(capsim::bezier_blend(0.5, 0.0, 1.0, 1.0) == 0.6875,
             "blend midpoint worked value != 0.6875");

  oracle::Rng rng(101);
  double worst_anchor = 0.0, worst_end_slope = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double y0 = rng.uniform(-1.0, 1.0);
    const double yf = rng.uniform(-1.0, 1.0);
    const double c = rng.uniform(0.0, 1.0);
    worst_anchor = std::max(worst_anchor, std::abs(capsim::bezier_blend(0.0, y0, yf, c) - y0));
    worst_anchor = std::max(worst_anchor, std::abs(capsim::bezier_blend(1.0, y0, yf, c) - yf));
    auto f = [&](double p) { return capsim::bezier_blend(p, y0, yf, c); };
    worst_end_slope = std::max(worst_end_slope, std::abs(edge_slope(f, 0.0, 1e-4, +1)));
    worst_end_slope = std::max(worst_end_slope, std::abs(edge_slope(f, 1.0, 1e-4, -1)));
  }
  ck.require(worst_anchor == 0.0, msg("blend endpoints off by %.3g", worst_anchor));
  ck.require(worst_end_slope < 1e-6,
             msg("blend endpoint slope %.3g >= 1e-6", worst_end_slope));

  double worst_peak = 0.0, worst_overshoot = 0.0, worst_junction = 0.0;
  double worst_swing_end = 0.0, worst_swing_anchor = 0.0;
  for (int i = 0; i < 100; ++i) {
    capsim::SwingSpec spec;
    const double sign = rng.uniform(0.0, 1.0) < 0.5 ? -1.0 : 1.0;
    spec.amplitude = sign * rng.uniform(0.05, 0.35);
    spec.peak_phase = rng.uniform(0.2, 0.8);
    spec.curvature = rng.uniform(0.0, 1.0);
    auto f = [&](double p) { return capsim::swing(p, spec); };

    worst_swing_anchor = std::max(worst_swing_anchor, std::abs(f(0.0)));
    worst_swing_anchor = std::max(worst_swing_anchor, std::abs(f(1.0)));
    worst_peak = std::max(worst_peak, std::abs(f(spec.peak_phase) - spec.amplitude));
    double grid_max = 0.0;
    for (int k = 0; k <= 2000; ++k) grid_max = std::max(grid_max, std::abs(f(k / 2000.0)));
    worst_overshoot = std::max(worst_overshoot, grid_max - std::abs(spec.amplitude));

    const double h = 3e-5;  // small enough that the cubic FD residual is < 1e-6
    const double left = edge_slope(f, spec.peak_phase, h, -1);
    const double right = edge_slope(f, spec.peak_phase, h, +1);
    worst_junction = std::max(worst_junction, std::abs(left - right));
    worst_swing_end = std::max(worst_swing_end, std::abs(edge_slope(f, 0.0, h, +1)));
    worst_swing_end = std::max(worst_swing_end, std::abs(edge_slope(f, 1.0, h, -1)));
  }
  ck.require(worst_swing_anchor == 0.0, msg("swing endpoints off by %.3g", worst_swing_anchor));
  ck.require(worst_peak <= 1e-9, msg("swing peak misses its amplitude by %.3g", worst_peak));
  ck.require(worst_overshoot <= 1e-9, msg("swing overshoots its peak by %.3g", worst_overshoot));
  ck.require(worst_junction < 1e-6, msg("junction slope mismatch %.3g >= 1e-6", worst_junction));
  ck.require(worst_swing_end < 1e-6, msg("swing endpoint slope %.3g >= 1e-6", worst_swing_end));

  bool threw = false;
  try {
    capsim::bezier_blend(-0.01, 0.0, 1.0, 0.5);
  } catch (const std::invalid_argument&) {
    threw = true;
  }
  ck.require(threw, "blend accepted phase below the unit interval");
  threw = false;
  try {
    capsim::swing(1.01, {0.3, 0.6, 0.5});
  } catch (const std::invalid_argument&) {
    threw = true;
  }
  ck.require(threw, "swing accepted phase above the unit interval");
}

// ---------------------------------------------------------------------------
// 2. Kick amplitudes: the backswing sign follows the ball distance, with the
//    worked values for the three distance regimes.

void kick_amplitude_regimes(Checker& ck) {
  const capsim::KickParams params;  // alpha_opt 0.30, optimal distance 0.12
  capsim::KickRequest req;

  req.ball_in_kick_frame = {0.12 - 0.10, 0.0};  // closer than optimal
  capsim::KickAmplitudes a = capsim::kick_amplitudes(req, params);
  ck.require(std::abs(a.forward - 0.28) <= 1e-12,
             msg("close ball: forward %.15g != 0.28", a.forward));
  ck.require(std::abs(a.backward - (-0.02)) <= 1e-12,
             msg("close ball: backswing %.15g != -0.02", a.backward));
  ck.require(a.backward < 0.0, "close ball: backswing is not a pull-back");
  ck.require(a.lateral == 0.0, "close ball: lateral amplitude should be zero");

  req.ball_in_kick_frame = {0.12 + 0.10, 0.0};  // farther than optimal
  a = capsim::kick_amplitudes(req, params);
  ck.require(std::abs(a.forward - 0.32) <= 1e-12,
             msg("far ball: forward %.15g != 0.32", a.forward));
  ck.require(std::abs(a.backward - 0.02) <= 1e-12,
             msg("far ball: backswing %.15g != 0.02", a.backward));
  ck.require(a.backward > 0.0, "far ball: backswing should be positive");

  req.ball_in_kick_frame = {0.12, 0.05};  // at the optimal distance
  a = capsim::kick_amplitudes(req, params);
  ck.require(std::abs(a.forward - 0.30) <= 1e-12,
             msg("optimal ball: forward %.15g != 0.30", a.forward));
  ck.require(std::abs(a.backward) <= 1e-12,
             msg("optimal ball: backswing %.15g != 0", a.backward));
  ck.require(std::abs(a.lateral - 0.05) <= 1e-12,
             msg("optimal ball: lateral %.15g != ball y", a.lateral));
}

// ---------------------------------------------------------------------------
// 3. Pendulum closed form against RK4 integration.

void pendulum_matches_integration(Checker& ck) {
  const capsim::PendulumParams pp;  // 0.9 m, 9.81 m/s^2
  const double tau = pp.tau();
  oracle::Rng rng(303);
  double max_rel = 0.0, max_drift = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const capsim::AxisState s{rng.uniform(-0.5, 0.5), rng.uniform(-1.0, 1.0)};
    const double pivot = rng.uniform(-0.1, 0.1);
    const double dt = rng.uniform(0.0, 3.0 * tau);
    const capsim::AxisState closed = capsim::propagate(s, pivot, pp, dt);
    const oracle::PointState ref = oracle::rk4_pendulum({s.x, s.v}, pivot, tau, dt, 1e-5);
    max_rel = std::max(max_rel, std::abs(closed.x - ref.x) / std::max(1.0, std::abs(ref.x)));
    max_rel = std::max(max_rel, std::abs(closed.v - ref.v) / std::max(1.0, std::abs(ref.v)));
    const double e0 = capsim::orbital_energy({s.x - pivot, s.v}, pp);
    const double e1 = capsim::orbital_energy({closed.x - pivot, closed.v}, pp);
    max_drift = std::max(max_drift, std::abs(e1 - e0));
  }
  ck.require(max_rel <= 1e-6, msg("closed form vs RK4 relative error %.3g > 1e-6", max_rel));
  ck.require(max_drift <= 1e-9, msg("orbital energy drift %.3g > 1e-9", max_drift));
}

// ---------------------------------------------------------------------------
// 4. Outward push: the current step stretches past its nominal duration on
//    the push tick, the capture step is wider than the default step width,
//    and two exchanges after the capture step the gait is nominal again.

void outward_push_capture_step(Checker& ck) {
  const ScenarioConfig cfg = capsim::sim::make_lateral_push_scenario();
  const RunResult r = capsim::sim::run_scenario(cfg);
  const double t0 = cfg.robot.gait.step_duration;
  const double width = cfg.robot.gait.lateral_step_width;

  ck.require(!r.summary.fell, "robot fell under the default outward push");
  ck.require(r.summary.steps_to_recover == 3,
             msg("steps to recover = %d, expected 3", r.summary.steps_to_recover));
  ck.require(r.summary.capture_count >= 1, "no exchange was counted as a capture step");

  const auto pushes = token_rows(r.trace, "push");
  ck.require(pushes.size() == 1, msg("expected 1 push row, found %zu", pushes.size()));
  if (pushes.size() != 1) return;
  const std::size_t p = pushes[0];

  // (a) replanned duration is already stretched on the row that carries the
  // push event, i.e. within one tick.
  ck.require(r.trace[p].step_duration > 1.05 * t0,
             msg("push-row duration %.6g not above nominal %.3g", r.trace[p].step_duration, t0));

  std::vector<std::size_t> ex;
  for (const std::size_t i : token_rows(r.trace, "exchange"))
    if (i > p) ex.push_back(i);
  ck.require(ex.size() >= 3, msg("only %zu exchanges after the push", ex.size()));
  if (ex.size() < 3) return;

  // (b) the capture step lands strictly wider than the default width. The row
  // just before the exchange holds the completing step's final plan.
  const double capture_width = std::abs(r.trace[ex[0] - 1].step_y);
  ck.require(capture_width > width + 1e-3,
             msg("capture step width %.6g not above the %.3g default", capture_width, width));
  ck.require(r.summary.max_step_size > width + 1e-3,
             msg("max step size %.6g not above the %.3g default", r.summary.max_step_size, width));

  // (c) nominal duration and width again within two exchanges of the capture.
  const double d3 = r.trace[ex[2] - 1].step_duration;
  const double w3 = std::abs(r.trace[ex[2] - 1].step_y);
  ck.require(std::abs(d3 - t0) <= 0.05 * t0,
             msg("duration %.6g still off nominal two exchanges after capture", d3));
  ck.require(std::abs(w3 - width) <= 0.05 * width,
             msg("step width %.6g still off nominal two exchanges after capture", w3));
}

// ---------------------------------------------------------------------------
// 5. Backward push: the commanded pivot pins to the heel on the push tick,
//    the capture step goes backwards, and the apex speed is back within 10%
//    of nominal once the second recovery step has completed.

void backward_push_heel_and_apex(Checker& ck) {
  const ScenarioConfig cfg = capsim::sim::make_sagittal_push_scenario();
  const RunResult r = capsim::sim::run_scenario(cfg);
  const double vnom = cfg.robot.gait.apex_velocity_sagittal;

  ck.require(!r.summary.fell, "robot fell under the default backward push");

  const auto pushes = token_rows(r.trace, "push");
  ck.require(pushes.size() == 1, msg("expected 1 push row, found %zu", pushes.size()));
  if (pushes.size() != 1) return;
  const std::size_t p = pushes[0];

  ck.require(std::abs(r.trace[p].zmp_x - cfg.robot.foot.zmp_min) <= 1e-12,
             msg("push-row pivot %.9g is not the heel limit %.3g", r.trace[p].zmp_x,
                 cfg.robot.foot.zmp_min));
  ck.require(r.trace[p].step_x < 0.0,
             msg("push-row landing offset %.6g is not backwards", r.trace[p].step_x));

  std::vector<std::size_t> ex;
  for (const std::size_t i : token_rows(r.trace, "exchange"))
    if (i > p) ex.push_back(i);
  ck.require(ex.size() >= 5, msg("only %zu exchanges after the push", ex.size()));
  if (ex.size() < 5) return;

  // Steps that begin at the third exchange after the push (capture step, then
  // two recovery steps) must already run at the nominal apex speed.
  for (int k = 2; k + 1 < 5; ++k) {
    double apex = 1e9;
    for (std::size_t i = ex[k] + 1; i < ex[k + 1]; ++i)
      apex = std::min(apex, std::abs(r.trace[i].vel_x));
    ck.require(apex >= 0.9 * vnom && apex <= 1.1 * vnom,
               msg("apex speed %.6g of step %d is outside 10%% of %.3g", apex, k - 1, vnom));
  }
}

// ---------------------------------------------------------------------------
// 6. Push-recovery envelope: a finite survivable impact-speed threshold
//    exists, the lighter pendulum hits strictly softer, and both documented
//    default pushes are survivable.

void push_threshold_and_mass_order(Checker& ck) {
  auto summary_at = [](double impact_speed, double pendulum_mass) {
    ScenarioConfig cfg = capsim::sim::make_lateral_push_scenario();
    cfg.pushes[0].impact_speed = impact_speed;
    cfg.pushes[0].pendulum_mass = pendulum_mass;
    return capsim::sim::run_scenario(cfg).summary;
  };

  double lo = 0.72, hi = 4.0;
  const bool lo_ok = !summary_at(lo, 5.0).fell;
  const bool hi_falls = summary_at(hi, 5.0).fell;
  ck.require(lo_ok, "default impact speed already topples the robot");
  ck.require(hi_falls, "no fall even at the top of the bisection bracket");
  if (!lo_ok || !hi_falls) return;

  for (int i = 0; i < 14; ++i) {
    const double mid = 0.5 * (lo + hi);
    (summary_at(mid, 5.0).fell ? hi : lo) = mid;
  }
  const double threshold = 0.5 * (lo + hi);
  ck.require(threshold > 1.0 && threshold < 3.0,
             msg("survivable threshold %.3f outside the expected (1, 3) band", threshold));
  ck.require(!summary_at(threshold - 0.1, 5.0).fell,
             "robot falls clearly below the bisected threshold");
  ck.require(summary_at(threshold + 0.1, 5.0).fell,
             "robot survives clearly above the bisected threshold");

  const double dv3 = capsim::sim::push_delta_v(3.0, 0.72, 19.0);
  const double dv5 = capsim::sim::push_delta_v(5.0, 0.72, 19.0);
  ck.require(dv3 < dv5 - 1e-9, msg("delta-v not ordered by mass: %.6g vs %.6g", dv3, dv5));

  const auto s3 = summary_at(0.72, 3.0);
  const auto s5 = summary_at(0.72, 5.0);
  ck.require(!s3.fell && !s5.fell, "a default push is not survivable");
  ck.require(s3.max_step_size < s5.max_step_size - 1e-4,
             msg("capture steps not ordered by mass: %.6g vs %.6g", s3.max_step_size,
                 s5.max_step_size));
}

// ---------------------------------------------------------------------------
// 7. Moving ball: three passes, three in-stride strikes, three goals; every
//    contact falls in the strike window and within 0.05 s of the arrival
//    predicted from the recorded ball track.

void moving_ball_struck_on_time(Checker& ck) {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const ScenarioConfig cfg = capsim::sim::make_moving_ball_scenario(seed);
    ck.require(cfg.ball_passes.size() == 3,
               msg("seed %llu: scenario has %zu passes, expected 3",
                   static_cast<unsigned long long>(seed), cfg.ball_passes.size()));
    const RunResult r = capsim::sim::run_scenario(cfg);
    ck.require(!r.summary.fell,
               msg("seed %llu: robot fell", static_cast<unsigned long long>(seed)));
    ck.require(r.summary.goals == 3,
               msg("seed %llu: goals = %d, expected 3", static_cast<unsigned long long>(seed),
                   r.summary.goals));

    const auto passes = token_rows(r.trace, "pass");
    const auto starts = token_rows(r.trace, "kick_start");
    const auto contacts = token_rows(r.trace, "kick_contact");
    ck.require(contacts.size() == 3,
               msg("seed %llu: %zu contacts, expected 3", static_cast<unsigned long long>(seed),
                   contacts.size()));
    ck.require(starts.size() >= 3,
               msg("seed %llu: only %zu kick starts", static_cast<unsigned long long>(seed),
                   starts.size()));
    if (contacts.size() != 3) continue;

    std::size_t prev_contact = 0;
    for (const std::size_t c : contacts) {
      // The strike must happen while the kick swing is near its peak.
      ck.require(r.trace[c].kick_phase > 0.30 && r.trace[c].kick_phase < 0.92,
                 msg("seed %llu: contact at kick phase %.3f, outside the strike window",
                     static_cast<unsigned long long>(seed), r.trace[c].kick_phase));

      std::size_t start = 0;
      bool found = false;
      for (const std::size_t s : starts)
        if (s < c && s > prev_contact) {
          start = s;
          found = true;
        }
      ck.require(found, msg("seed %llu: contact without a preceding kick start",
                            static_cast<unsigned long long>(seed)));
      if (!found) continue;

      // Rebuild the arrival prediction from the recorded ball positions
      // between the pass and the moment the kick was scheduled.
      std::size_t pass_row = 0;
      for (const std::size_t pr : passes)
        if (pr <= start) pass_row = pr;
      const std::size_t first = std::max(pass_row, start >= 30 ? start - 30 : 0);
      std::vector<capsim::BallDetection> det;
      for (std::size_t i = first; i <= start; ++i)
        det.push_back({r.trace[i].t, {r.trace[i].ball_x, r.trace[i].ball_y}});
      ck.require(det.size() >= 3, msg("seed %llu: too few rows to refit the ball track",
                                      static_cast<unsigned long long>(seed)));
      if (det.size() < 3) continue;
      const capsim::BallTrack track = capsim::fit_ball_track(det);
      const auto arrival = capsim::predict_arrival(track, cfg.kick.contact_line_x);
      ck.require(arrival.has_value(), msg("seed %llu: refit track never reaches the foot",
                                          static_cast<unsigned long long>(seed)));
      if (arrival) {
        const double t_pred = track.t0 + *arrival;
        ck.require(std::abs(r.trace[c].t - t_pred) <= 0.05,
                   msg("seed %llu: contact at %.3f s vs predicted %.3f s",
                       static_cast<unsigned long long>(seed), r.trace[c].t, t_pred));
      }
      prev_contact = c;
    }
  }
}

// ---------------------------------------------------------------------------
// 8. Estimator: exact gravity removal under arbitrary orientation, healthy
//    covariance over long runs, and filtered velocity beating finite
//    differencing on noisy pendulum traces.

void estimator_suite(Checker& ck) {
  oracle::Rng rng(808);
  const double g = 9.81;
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    Eigen::Vector3d axis(rng.gaussian(), rng.gaussian(), rng.gaussian());
    if (axis.norm() < 1e-6) axis = Eigen::Vector3d::UnitZ();
    const Eigen::Matrix3d rot =
        Eigen::AngleAxisd(rng.uniform(-M_PI, M_PI), axis.normalized()).toRotationMatrix();
    const Eigen::Vector3d acc_world(rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3));
    capsim::TrunkImu imu;
    imu.orientation = rot;
    imu.accel_trunk = rot.transpose() * (acc_world + g * Eigen::Vector3d::UnitZ());
    const Eigen::Vector3d back = capsim::remove_gravity(imu, g);
    worst = std::max(worst, (back - acc_world).cwiseAbs().maxCoeff());
  }
  ck.require(worst <= 1e-9, msg("gravity removal error %.3g > 1e-9", worst));

  capsim::TrunkImu bad;
  bad.orientation = Eigen::Matrix3d::Identity();
  bad.orientation(0, 0) = 1.001;  // not orthonormal
  bool threw = false;
  try {
    capsim::remove_gravity(bad, g);
  } catch (const std::invalid_argument&) {
    threw = true;
  }
  ck.require(threw, "a non-orthonormal orientation was accepted");
  bad.orientation = Eigen::Matrix3d::Identity();
  bad.orientation(0, 0) = -1.0;  // reflection, det -1
  threw = false;
  try {
    capsim::remove_gravity(bad, g);
  } catch (const std::invalid_argument&) {
    threw = true;
  }
  ck.require(threw, "a reflection was accepted as an orientation");

  // Covariance health over 10^4 predict/update cycles.
  capsim::AxisKalmanFilter filter{capsim::FilterConfig{}};
  filter.reset({0.0, 0.0, 0.0});
  double min_eig = 1e9, max_asym = 0.0;
  auto probe = [&](const Eigen::Matrix3d& cov) {
    max_asym = std::max(max_asym, (cov - cov.transpose()).cwiseAbs().maxCoeff());
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(
        0.5 * (cov + cov.transpose()));
    min_eig = std::min(min_eig, eig.eigenvalues().minCoeff());
  };
  for (int i = 0; i < 10000; ++i) {
    filter.predict(0.01);
    probe(filter.covariance());
    filter.update(2e-3 * rng.gaussian(), 0.3 * rng.gaussian());
    probe(filter.covariance());
  }
  ck.require(max_asym <= 1e-12, msg("covariance asymmetry %.3g", max_asym));
  ck.require(min_eig >= -1e-12, msg("covariance eigenvalue %.3g below zero", min_eig));

  // Filtered velocity vs finite differencing, 100 noisy pendulum traces.
  const double tau = 0.3029, dt = 0.01;
  const int n = 500;
  capsim::PendulumParams pp;
  pp.gravity = 9.81;
  pp.com_height = tau * tau * pp.gravity;
  int wins = 0;
  for (int seed = 0; seed < 100; ++seed) {
    oracle::Rng noise(500 + seed);
    std::vector<double> pos(n), vel(n), acc(n);
    capsim::AxisState s{0.1, -0.25};
    for (int i = 0; i < n; ++i) {
      pos[i] = s.x;
      vel[i] = s.v;
      acc[i] = s.x / (tau * tau);
      s = capsim::propagate(s, 0.0, pp, dt);
    }
    std::vector<double> meas(n);
    for (int i = 0; i < n; ++i) meas[i] = pos[i] + 2e-3 * noise.gaussian();
    capsim::AxisKalmanFilter f{capsim::FilterConfig{}};
    f.reset({meas[0], 0.0, acc[0]});
    double se_filter = 0.0, se_fd = 0.0;
    int count = 0;
    for (int i = 1; i < n; ++i) {
      f.predict(dt);
      f.update(meas[i], acc[i] + 0.3 * noise.gaussian());
      if (i > 100) {
        const double fd = (meas[i] - meas[i - 1]) / dt;
        se_filter += std::pow(f.state().c_dot - vel[i], 2);
        se_fd += std::pow(fd - vel[i], 2);
        ++count;
      }
    }
    if (se_filter / count < se_fd / count) ++wins;
  }
  ck.require(wins >= 95, msg("filter beat differencing on only %d of 100 traces", wins));
}

// ---------------------------------------------------------------------------
// 9. Force-field commands: saturation, orthogonal circumvention terms,
//    rotational equivariance, obstacle clearance in closed loop, and an
//    equilibrium at the staging point.

void force_field_properties(Checker& ck) {
  const capsim::BehaviorGains gains;
  oracle::Rng rng(909);

  double max_walk = 0.0, max_turn = 0.0;
  bool all_finite = true;
  for (int i = 0; i < 500; ++i) {
    const capsim::RobotPose robot{{rng.uniform(-5, 5), rng.uniform(-5, 5)}, rng.uniform(-4, 4)};
    const Eigen::Vector2d ball(rng.uniform(-5, 5), rng.uniform(-5, 5));
    Eigen::Vector2d target(rng.uniform(-5, 5), rng.uniform(-5, 5));
    if ((target - ball).norm() < 1e-3) target.x() += 1.0;
    std::vector<capsim::Obstacle> obstacles;
    for (int k = 0; k < 3; ++k)
      obstacles.push_back({{rng.uniform(-5, 5), rng.uniform(-5, 5)}, rng.uniform(0.1, 0.4)});
    const capsim::GaitCommand cmd =
        capsim::compute_command(robot, ball, target, obstacles, gains);
    max_walk = std::max(max_walk, cmd.walk.norm());
    max_turn = std::max(max_turn, std::abs(cmd.turn));
    all_finite = all_finite && cmd.walk.allFinite() && std::isfinite(cmd.turn);
  }
  ck.require(max_walk <= 1.0 + 1e-12, msg("walk norm %.15g escapes the unit disk", max_walk));
  ck.require(max_turn <= 1.0, msg("turn %.15g escapes [-1, 1]", max_turn));
  ck.require(all_finite, "non-finite command on finite inputs");

  // Difference out each orthogonal term with its gain and check it against
  // its line; keep the field unsaturated so the decomposition is exact.
  capsim::BehaviorGains weak;
  weak.attract_gain = 0.05;
  weak.repel_gain = 0.002;
  weak.orthogonal_ball_gain = 0.02;
  weak.orthogonal_obstacle_gain = 0.02;
  {
    capsim::BehaviorGains no_orth = weak;
    no_orth.orthogonal_ball_gain = 0.0;
    const capsim::RobotPose robot{{1.4, 0.9}, 0.0};
    const Eigen::Vector2d ball(0.0, 0.0), target(1.0, 0.0);
    const Eigen::Vector2d term =
        capsim::compute_command(robot, ball, target, {}, weak).walk -
        capsim::compute_command(robot, ball, target, {}, no_orth).walk;
    ck.require(term.norm() > 1e-6, "ball circumvention term is inactive");
    const Eigen::Vector2d line = (ball - robot.position).normalized();
    ck.require(std::abs(term.normalized().dot(line)) < 1e-12,
               msg("ball term not orthogonal: dot %.3g", term.normalized().dot(line)));
  }
  {
    capsim::BehaviorGains no_orth = weak;
    no_orth.orthogonal_obstacle_gain = 0.0;
    const capsim::RobotPose robot{{-2.0, 0.1}, 0.0};
    const Eigen::Vector2d ball(0.0, 0.0), target(1.0, 0.0);
    const std::vector<capsim::Obstacle> obs = {{{-1.2, 0.0}, 0.25}};
    const Eigen::Vector2d term =
        capsim::compute_command(robot, ball, target, obs, weak).walk -
        capsim::compute_command(robot, ball, target, obs, no_orth).walk;
    ck.require(term.norm() > 1e-6, "obstacle circumvention term is inactive");
    const Eigen::Vector2d line = (obs[0].position - robot.position).normalized();
    ck.require(std::abs(term.normalized().dot(line)) < 1e-12,
               msg("obstacle term not orthogonal: dot %.3g", term.normalized().dot(line)));
  }

  double max_equiv = 0.0;
  for (int i = 0; i < 100; ++i) {
    const capsim::RobotPose robot{{rng.uniform(-4, 4), rng.uniform(-4, 4)}, rng.uniform(-3, 3)};
    const Eigen::Vector2d ball(rng.uniform(-4, 4), rng.uniform(-4, 4));
    Eigen::Vector2d target(rng.uniform(-4, 4), rng.uniform(-4, 4));
    if ((target - ball).norm() < 1e-3) target.y() += 1.0;
    const std::vector<capsim::Obstacle> obs = {
        {{rng.uniform(-4, 4), rng.uniform(-4, 4)}, rng.uniform(0.1, 0.4)}};
    const double th = rng.uniform(-3.0, 3.0);
    const capsim::GaitCommand base = capsim::compute_command(robot, ball, target, obs, gains);
    const capsim::RobotPose turned_robot{rot2(robot.position, th), robot.heading + th};
    const std::vector<capsim::Obstacle> turned_obs = {{rot2(obs[0].position, th), obs[0].radius}};
    const capsim::GaitCommand turned = capsim::compute_command(
        turned_robot, rot2(ball, th), rot2(target, th), turned_obs, gains);
    max_equiv = std::max(max_equiv, (turned.walk - rot2(base.walk, th)).norm());
    max_equiv = std::max(max_equiv, std::abs(turned.walk.norm() - base.walk.norm()));
    max_equiv = std::max(max_equiv, std::abs(turned.turn - base.turn));
  }
  ck.require(max_equiv < 1e-9, msg("rotation equivariance error %.3g >= 1e-9", max_equiv));

  // Closed-loop holonomic rollout around an obstacle on the straight path.
  const Eigen::Vector2d ball(0.0, 0.0), target(1.0, 0.0);
  const capsim::Obstacle obs{{-1.5, 0.0}, 0.3};
  const Eigen::Vector2d staging = capsim::behind_ball_position(ball, target, gains.standoff);
  Eigen::Vector2d pos(-3.0, 0.0);
  double min_clearance = 1e9;
  bool arrived = false;
  for (int i = 0; i < 6000; ++i) {
    const capsim::GaitCommand cmd = capsim::compute_command({pos, 0.0}, ball, target, {obs}, gains);
    pos += cmd.walk * 0.5 * 0.01;
    min_clearance = std::min(min_clearance, (pos - obs.position).norm());
    if ((pos - staging).norm() < 0.05) {
      arrived = true;
      break;
    }
  }
  ck.require(arrived, "rollout never reached the staging point");
  ck.require(min_clearance > obs.radius,
             msg("rollout clearance %.3f inside the obstacle radius %.3f", min_clearance,
                 obs.radius));

  const capsim::GaitCommand still = capsim::compute_command({staging, 0.0}, ball, target, {}, gains);
  ck.require(still.walk.norm() < 0.05 && std::abs(still.turn) < 0.05,
             msg("staging point is not an equilibrium: |walk| %.3f, turn %.3f",
                 still.walk.norm(), still.turn));
}

// ---------------------------------------------------------------------------
// 10. Determinism and I/O: byte-identical traces across repeats and across
//     batch/sequential execution, config round-trip identity, and the
//     documented trace header.

void determinism_and_io(Checker& ck) {
  const std::string header =
      "t,com_x,com_y,vel_x,vel_y,est_x,est_vx,est_ax,est_y,est_vy,est_ay,"
      "zmp_x,zmp_y,step_duration,step_x,step_y,support,gait_phase,kick_phase,"
      "ball_x,ball_y,event";
  ck.require(header == capsim::sim::kTraceHeader, "trace header drifted from its documentation");

  const std::vector<ScenarioConfig> configs = {
      ScenarioConfig{},
      capsim::sim::make_walk_scenario(),
      capsim::sim::make_lateral_push_scenario(),
      capsim::sim::make_sagittal_push_scenario(),
      capsim::sim::make_moving_ball_scenario(5),
  };
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const std::string once = capsim::sim::config_to_json(configs[i]);
    const std::string twice = capsim::sim::config_to_json(capsim::sim::config_from_json(once));
    ck.require(once == twice, msg("config %zu does not round-trip through JSON", i));
  }

  const ScenarioConfig cfg = capsim::sim::make_moving_ball_scenario(4);
  const RunResult a = capsim::sim::run_scenario(cfg);
  const RunResult b = capsim::sim::run_scenario(cfg);
  const std::string csv_a = capsim::sim::trace_to_csv(a.trace);
  ck.require(csv_a.compare(0, header.size(), header) == 0,
             "trace CSV does not start with the documented header");
  ck.require(csv_a == capsim::sim::trace_to_csv(b.trace),
             "same config and seed produced different traces");
  ck.require(capsim::sim::summary_line(a.summary) == capsim::sim::summary_line(b.summary),
             "same config and seed produced different summaries");

  std::vector<capsim::sim::BatchJob> jobs = {
      {"walk", capsim::sim::make_walk_scenario()},
      {"push", capsim::sim::make_lateral_push_scenario()},
      {"ball", cfg},
  };
  const std::vector<RunResult> batch = capsim::sim::run_batch(jobs, 3);
  ck.require(batch.size() == jobs.size(), "batch dropped a job");
  for (std::size_t i = 0; i < jobs.size() && i < batch.size(); ++i) {
    const RunResult solo = capsim::sim::run_scenario(jobs[i].config);
    ck.require(capsim::sim::trace_to_csv(batch[i].trace) == capsim::sim::trace_to_csv(solo.trace),
               msg("batch trace %zu differs from the sequential run", i));
    ck.require(capsim::sim::summary_line(batch[i].summary) ==
                   capsim::sim::summary_line(solo.summary),
               msg("batch summary %zu differs from the sequential run", i));
  }
}

struct Criterion {
  int id;
  const char* name;
  void (*fn)(Checker&);
};

const Criterion kCriteria[] = {
    {1, "swing curves anchor, peak exactly and stay C1 at the junction", swing_curve_suite},
    {2, "kick backswing sign follows the ball distance", kick_amplitude_regimes},
    {3, "pendulum closed form matches RK4 integration", pendulum_matches_integration},
    {4, "outward push stretches the step; nominal again in two exchanges",
     outward_push_capture_step},
    {5, "backward push pins the heel, steps back, apex speed recovers",
     backward_push_heel_and_apex},
    {6, "push threshold is finite and ordered by pendulum mass", push_threshold_and_mass_order},
    {7, "moving ball is struck in stride at the predicted time", moving_ball_struck_on_time},
    {8, "gravity removal exact; covariance healthy; filter beats differencing", estimator_suite},
    {9, "force field saturates, stays orthogonal, equivariant and clear", force_field_properties},
    {10, "byte-identical determinism and config/trace round-trips", determinism_and_io},
};

}  // namespace

int main() {
  int failed = 0;
  for (const Criterion& criterion : kCriteria) {
    Checker ck;
    const auto start = std::chrono::steady_clock::now();
    try {
      criterion.fn(ck);
    } catch (const std::exception& e) {
      ck.require(false, msg("unexpected exception: %s", e.what()));
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool pass = ck.fails.empty();
    std::printf("%s [%2d] %s (%.2f s)\n", pass ? "PASS" : "FAIL", criterion.id, criterion.name,
                seconds);
    for (const std::string& why : ck.fails) std::printf("         - %s\n", why.c_str());
    std::fflush(stdout);
    if (!pass) ++failed;
  }
  std::printf("%d/10 criteria passed\n", 10 - failed);
  return failed;
}
