#pragma once

#include <string>
#include <vector>

#include "capsim/sim/config.hpp"
#include "capsim/sim/world.hpp"

namespace capsim::sim {

struct BatchJob {
  std::string name;  // label echoed in the summary output
  ScenarioConfig config;
};

/// Runs jobs on a thread pool, each fully isolated. Results come back in
/// input order regardless of completion order; the first job exception (in
/// input order) is rethrown. threads == 0 picks the hardware concurrency.
std::vector<RunResult> run_batch(const std::vector<BatchJob>& jobs, unsigned threads = 0);

}  // namespace capsim::sim
