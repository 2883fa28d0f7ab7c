#include "capsim/sim/trace.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace capsim::sim {

const char* const kTraceHeader =
    "t,com_x,com_y,vel_x,vel_y,est_x,est_vx,est_ax,est_y,est_vy,est_ay,"
    "zmp_x,zmp_y,step_duration,step_x,step_y,support,gait_phase,kick_phase,"
    "ball_x,ball_y,event";

namespace {

void append_num(std::string& out, double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", value);
  out += buf;
  out += ',';
}

}  // namespace

std::string format_record(const TraceRecord& r) {
  std::string out;
  out.reserve(256);
  append_num(out, r.t);
  append_num(out, r.com_x);
  append_num(out, r.com_y);
  append_num(out, r.vel_x);
  append_num(out, r.vel_y);
  append_num(out, r.est_x);
  append_num(out, r.est_vx);
  append_num(out, r.est_ax);
  append_num(out, r.est_y);
  append_num(out, r.est_vy);
  append_num(out, r.est_ay);
  append_num(out, r.zmp_x);
  append_num(out, r.zmp_y);
  append_num(out, r.step_duration);
  append_num(out, r.step_x);
  append_num(out, r.step_y);
  out += r.support;
  out += ',';
  append_num(out, r.gait_phase);
  append_num(out, r.kick_phase);
  append_num(out, r.ball_x);
  append_num(out, r.ball_y);
  out += r.event;
  return out;
}

std::string trace_to_csv(const std::vector<TraceRecord>& trace) {
  std::string out = kTraceHeader;
  out += '\n';
  for (const TraceRecord& r : trace) {
    out += format_record(r);
    out += '\n';
  }
  return out;
}

void write_trace(const std::vector<TraceRecord>& trace, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  const std::string csv = trace_to_csv(trace);
  f.write(csv.data(), static_cast<std::streamsize>(csv.size()));
  if (!f) throw std::runtime_error("write failed: " + path);
}

}  // namespace capsim::sim
