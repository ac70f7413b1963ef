#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "unireg/harness.hpp"
#include "unireg/trajectory.hpp"

namespace unireg {

/// Shortest round-trip text for a double (17 significant digits).
std::string format_number(double value);

/// One row per step: episode,k,t,r,x,u,e,K,N and, when `with_ase` is set,
/// branch_tag,omega,xi,omega_draw (empty on steps without an evaluation).
void write_session_csv(std::ostream& out, const std::vector<EpisodeLog>& logs, bool with_ase);

/// Columns k,t,r for steps [0, steps).
void write_trajectory_csv(std::ostream& out, const TrajectorySpec& trajectory,
                          std::int64_t steps);

}  // namespace unireg
