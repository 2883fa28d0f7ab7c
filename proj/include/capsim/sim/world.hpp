#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "capsim/sim/config.hpp"
#include "capsim/sim/trace.hpp"

namespace capsim::sim {

/// Raised when a non-finite value appears in the world state; carries the
/// tick index of the record that went bad.
class SimulationAbort : public std::runtime_error {
 public:
  SimulationAbort(const std::string& what, long tick_index)
      : std::runtime_error(what), tick(tick_index) {}
  long tick;
};

struct Summary {
  bool fell = false;
  int steps_to_recover = 0;   // exchanges after the last push until nominal; -1 = never
  double max_step_size = 0.0; // largest landing offset norm over all exchanges
  int capture_count = 0;      // exchanges whose plan was saturated or off-nominal
  int goals = 0;
  long ticks = 0;
};

/// One machine-readable line: space-separated key=value pairs.
std::string summary_line(const Summary& summary);

struct RunResult {
  std::vector<TraceRecord> trace;
  Summary summary;
};

/// Instantaneous CoM velocity change of a plastic pendulum impact.
double push_delta_v(double pendulum_mass, double impact_speed, double robot_mass);

/// Runs one scenario to completion (or a fall). Deterministic for a given
/// config. Throws ConfigError on invalid config, SimulationAbort on NaN.
RunResult run_scenario(const ScenarioConfig& config);

}  // namespace capsim::sim
