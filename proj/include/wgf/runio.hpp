#ifndef WGF_RUNIO_HPP
#define WGF_RUNIO_HPP

#include <string>
#include <vector>

#include "wgf/energy.hpp"
#include "wgf/stepper.hpp"

namespace wgf {

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);

/// One state of a stored series: scheme index, time stamp, positions.
struct StateRow {
    int k = 0;
    double time = 0.0;
    std::vector<double> positions;
};

/// States series: one record per (k, i) carrying t, the level s_i and the
/// position x_i.
void write_states(const std::string& path, const Trajectory& traj, bool json);

/// Scalars series: one record per k with the energy split, the second
/// moment and the step record, where present.
void write_scalars(const std::string& path, const Trajectory& traj,
                   const EnergySpec& spec, bool json);

/// Reads a states series back in file order; checks index and level
/// consistency.  Corruption surfaces as the matching validation error.
std::vector<StateRow> read_states(const std::string& path, bool json);

} // namespace wgf

#endif
