#pragma once

#include <cstddef>
#include <vector>

#include "swarmheat/pde_oracle.hpp"
#include "swarmheat/simulator.hpp"

namespace swarmheat {

struct CrossValidationSample {
    double t = 0.0;
    double E_particles = 0.0;
    double relative_l1 = 0.0;  // int |f_hat - f_pde| / int |f_pde|
};

struct CrossValidationReport {
    double E0 = 0.0;
    double t_end = 0.0;
    bool reached_efold = false;
    double max_relative_l1 = 0.0;
    std::size_t particle_steps = 0;
    std::size_t pde_substeps = 0;
    std::vector<CrossValidationSample> samples;
};

/// Runs the particle swarm and, alongside it, the continuity equation under the
/// grid feedback velocity, starting from the swarm's own KDE field on an
/// n-by-n grid. Stops once the particle error E has dropped by a factor e (or at
/// max_time) and reports how far the two densities drifted apart.
CrossValidationReport particle_pde_crossval(const SimConfig& cfg, const SwarmModel& model,
                                            std::size_t grid_n, double max_time,
                                            std::size_t compare_every = 20);

}  // namespace swarmheat
