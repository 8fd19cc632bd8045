#include "swarmheat/crossval.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace swarmheat {

namespace {

double l1_error(const ScalarField& a, const ScalarField& b) {
    double diff = 0.0, ref = 0.0;
    for (std::size_t q = 0; q < a.size(); ++q) {
        diff += std::abs(a.samples()[q] - b.samples()[q]);
        ref += std::abs(b.samples()[q]);
    }
    return diff / ref;
}

}  // namespace

CrossValidationReport particle_pde_crossval(const SimConfig& cfg, const SwarmModel& model,
                                            std::size_t grid_n, double max_time,
                                            std::size_t compare_every) {
    cfg.validate();
    SwarmState swarm = init_swarm(cfg, model.domain);
    const double dt_req = cfg.dt > 0.0 ? cfg.dt : default_dt(model, swarm.size());
    const auto [n_steps, dt] = step_plan(max_time, dt_req);

    const ScalarField desired_grid = ScalarField::from_function(
        model.domain, grid_n, grid_n, [&](Vec2 x) { return sample_field(model.desired, x); });
    ScalarField f_pde = kde_field(swarm, model, grid_n, cfg.threads);

    auto particle_error = [&](const ScalarField& kde) {
        double e = 0.0;
        for (std::size_t q = 0; q < kde.size(); ++q)
            e += std::abs(kde.samples()[q] - desired_grid.samples()[q]);
        return e * kde.cell_area();
    };

    CrossValidationReport rep;
    rep.E0 = particle_error(f_pde);
    const double target = rep.E0 / std::numbers::e;
    const double h = std::min(f_pde.dx(), f_pde.dy());

    for (std::size_t k = 1; k <= n_steps; ++k) {
        swarm = step(swarm, model, dt, cfg.threads);
        // Advance the PDE by the same dt, substepping for CFL and diffusion limits.
        double remaining = dt;
        while (remaining > 0.0) {
            const VelocityGrid v = control_velocity_grid(f_pde, desired_grid, model.law);
            const double vmax = max_speed(v);
            double sub = std::min(remaining, 0.2 * h * h / model.law.D);
            if (vmax > 0.0) sub = std::min(sub, 0.4 * h / vmax);
            f_pde = continuity_step(f_pde, v, sub, FluxScheme::upwind);
            remaining -= sub;
            if (remaining < 1e-15 * dt) remaining = 0.0;
            ++rep.pde_substeps;
        }
        rep.particle_steps = k;
        if (k % compare_every == 0 || k == n_steps) {
            const ScalarField kde = kde_field(swarm, model, grid_n, cfg.threads);
            CrossValidationSample s{static_cast<double>(k) * dt, particle_error(kde), l1_error(kde, f_pde)};
            rep.samples.push_back(s);
            rep.max_relative_l1 = std::max(rep.max_relative_l1, s.relative_l1);
            rep.t_end = s.t;
            if (s.E_particles <= target) {
                rep.reached_efold = true;
                break;
            }
        }
    }
    return rep;
}

}  // namespace swarmheat
