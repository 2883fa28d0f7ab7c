#pragma once

#include <string>
#include <vector>

namespace capsim::sim {

/// One simulator tick. Column order in the CSV matches the field order here.
struct TraceRecord {
  double t = 0.0;
  double com_x = 0.0, com_y = 0.0;    // world CoM
  double vel_x = 0.0, vel_y = 0.0;
  double est_x = 0.0, est_vx = 0.0, est_ax = 0.0;  // filter state, x axis
  double est_y = 0.0, est_vy = 0.0, est_ay = 0.0;  // filter state, y axis
  double zmp_x = 0.0, zmp_y = 0.0;    // commanded ZMP offset within the foot
  double step_duration = 0.0;         // current plan, full step duration
  double step_x = 0.0, step_y = 0.0;  // current plan, landing offset
  char support = 'R';
  double gait_phase = 0.0;
  double kick_phase = 0.0;            // 0 when no kick is active
  double ball_x = 0.0, ball_y = 0.0;
  std::string event;                  // ';'-joined tokens, empty if none
};

/// The exact header line (no newline). Documented in the README; tests hold
/// it byte-for-byte.
extern const char* const kTraceHeader;

/// One CSV row (no newline), numbers at 9 significant digits.
std::string format_record(const TraceRecord& record);

/// Full CSV document: header plus one newline-terminated line per record.
std::string trace_to_csv(const std::vector<TraceRecord>& trace);

/// Writes trace_to_csv to a file. Throws std::runtime_error on I/O failure.
void write_trace(const std::vector<TraceRecord>& trace, const std::string& path);

}  // namespace capsim::sim
