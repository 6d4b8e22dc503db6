#pragma once

#include <string>

#include "rydsim/dynamics.hpp"
#include "rydsim/gate_protocols.hpp"

namespace rydsim {

/// JSON document: scheme, n_atoms, thetas_rad, V_rad_per_us, V1_rad_per_us and
/// a segment list. Doubles are written in shortest round-trip form, so
/// schedule_from_json(schedule_to_json(s)) == s bit for bit.
std::string schedule_to_json(const PulseSchedule& schedule, int indent = 2);
/// Throws ErrorKind::parse on malformed input; the result is validated.
PulseSchedule schedule_from_json(const std::string& text);

/// `t_us,omega_rad_per_us,delta_rad_per_us,phi_rad` on `points` uniform
/// samples of one segment, time measured from the segment start.
std::string pulse_table_csv(const PulseSchedule& schedule, int segment_index,
                            int points);

enum class TrajectoryColumns { amplitudes, populations };

/// `t_us,re_amp_0,im_amp_0,...` or `t_us,pop_basis_0,...`. Density-matrix
/// trajectories only support populations.
std::string trajectory_csv(const Trajectory& trajectory, TrajectoryColumns columns);

/// Shortest text that parses back to the same double ("nan" for NaN).
std::string format_double(double value);

}  // namespace rydsim
