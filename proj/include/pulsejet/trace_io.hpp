#pragma once

#include <iosfwd>
#include <string>

#include "pulsejet/swim.hpp"

namespace pulsejet::io {

// Column order of the trajectory CSV export.
inline constexpr const char* kTraceHeader =
    "time_s,body_pos_m,body_vel_mps,hub_pos_m,hub_vel_mps,sma_top_temp_C,sma_bot_temp_C,xi_top,xi_bot,"
    "bell_vol_m3,thrust_N,drag_N";

// printf-style %.9g.
std::string sig9(double v);

void write_trace_csv(std::ostream& out, const sim::Trajectory& trajectory);
void write_trace_json(std::ostream& out, const sim::Trajectory& trajectory);

}  // namespace pulsejet::io
