#include "pulsejet/trace_io.hpp"

#include <cstdio>
#include <ostream>

#include "json.hpp"

namespace pulsejet::io {

std::string sig9(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

void write_trace_csv(std::ostream& out, const sim::Trajectory& trajectory) {
  out << kTraceHeader << '\n';
  for (const auto& f : trajectory.frames) {
    out << sig9(f.time) << ',' << sig9(f.body.position) << ',' << sig9(f.body.velocity) << ','
        << sig9(f.engine.hub_position) << ',' << sig9(f.engine.hub_velocity) << ','
        << sig9(f.sma_top.temperature) << ',' << sig9(f.sma_bottom.temperature) << ','
        << sig9(f.sma_top.austenite_fraction) << ',' << sig9(f.sma_bottom.austenite_fraction) << ','
        << sig9(f.bell_volume) << ',' << sig9(f.thrust) << ',' << sig9(f.drag) << '\n';
  }
}

void write_trace_json(std::ostream& out, const sim::Trajectory& trajectory) {
  nlohmann::ordered_json j;
  j["columns"] = {"time_s", "body_pos_m", "body_vel_mps", "hub_pos_m", "hub_vel_mps", "sma_top_temp_C",
                  "sma_bot_temp_C", "xi_top", "xi_bot", "bell_vol_m3", "thrust_N", "drag_N"};
  auto rows = nlohmann::json::array();
  for (const auto& f : trajectory.frames) {
    rows.push_back({f.time, f.body.position, f.body.velocity, f.engine.hub_position, f.engine.hub_velocity,
                    f.sma_top.temperature, f.sma_bottom.temperature, f.sma_top.austenite_fraction,
                    f.sma_bottom.austenite_fraction, f.bell_volume, f.thrust, f.drag});
  }
  j["rows"] = std::move(rows);
  out << j.dump() << '\n';
}

}  // namespace pulsejet::io
