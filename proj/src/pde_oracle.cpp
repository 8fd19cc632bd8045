#include "swarmheat/pde_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "swarmheat/simd/kernels.hpp"

namespace swarmheat {

void GridSolverConfig::validate_for(const ScalarField& grid) const {
    if (!(D > 0.0)) throw std::invalid_argument("diffusion constant must be positive");
    if (!(dt > 0.0)) throw std::invalid_argument("PDE time step must be positive");
    const double h = std::min(grid.dx(), grid.dy());
    if (dt * D > 0.25 * h * h * (1.0 + 1e-12))
        throw std::invalid_argument("heat step violates the explicit stability bound dt <= 0.25 h^2 / D");
}

GridSolverConfig GridSolverConfig::stable(const ScalarField& grid, double D, double fraction) {
    const double h = std::min(grid.dx(), grid.dy());
    return {fraction * 0.25 * h * h / D, D};
}

ScalarField heat_step(const ScalarField& phi, const GridSolverConfig& cfg) {
    cfg.validate_for(phi);
    ScalarField out(phi.domain(), phi.nx(), phi.ny());
    const double cx = cfg.D * cfg.dt / (phi.dx() * phi.dx());
    const double cy = cfg.D * cfg.dt / (phi.dy() * phi.dy());
    const std::size_t nx = phi.nx();
    const std::size_t ny = phi.ny();
    const double* src = phi.samples().data();
    double* dst = out.samples().data();
    const simd::HeatRowFn row_fn = simd::heat_row();
    for (std::size_t j = 0; j < ny; ++j) {
        const double* row = src + j * nx;
        const double* below = j > 0 ? row - nx : row;
        const double* above = j + 1 < ny ? row + nx : row;
        row_fn(below, row, above, dst + j * nx, nx, cx, cy);
    }
    return out;
}

double max_speed(const VelocityGrid& v) {
    double m = 0.0;
    const auto vx = v.vx.samples();
    const auto vy = v.vy.samples();
    for (std::size_t k = 0; k < vx.size(); ++k) m = std::max(m, std::hypot(vx[k], vy[k]));
    return m;
}

ScalarField continuity_step(const ScalarField& f, const VelocityGrid& v, double dt,
                            FluxScheme scheme) {
    if (!f.same_grid(v.vx) || !f.same_grid(v.vy))
        throw std::invalid_argument("velocity grid does not match the density grid");
    if (!(dt > 0.0)) throw std::invalid_argument("continuity time step must be positive");
    const double spacing = std::min(f.dx(), f.dy());
    if (max_speed(v) * dt > 0.5 * spacing * (1.0 + 1e-12))
        throw std::invalid_argument("continuity step violates CFL: max|v| dt > 0.5 h");

    const std::size_t nx = f.nx();
    const std::size_t ny = f.ny();
    auto face_flux = [scheme](double v_face, double left, double right) {
        if (scheme == FluxScheme::central) return v_face * (0.5 * (left + right));
        return v_face * (v_face >= 0.0 ? left : right);
    };
    // Fluxes through interior faces only; wall faces stay zero.
    std::vector<double> fx((nx + 1) * ny, 0.0);
    std::vector<double> fy(nx * (ny + 1), 0.0);
    for (std::size_t j = 0; j < ny; ++j)
        for (std::size_t i = 1; i < nx; ++i) {
            const double vf = 0.5 * (v.vx.at(i - 1, j) + v.vx.at(i, j));
            fx[j * (nx + 1) + i] = face_flux(vf, f.at(i - 1, j), f.at(i, j));
        }
    for (std::size_t j = 1; j < ny; ++j)
        for (std::size_t i = 0; i < nx; ++i) {
            const double vf = 0.5 * (v.vy.at(i, j - 1) + v.vy.at(i, j));
            fy[j * nx + i] = face_flux(vf, f.at(i, j - 1), f.at(i, j));
        }
    ScalarField out(f.domain(), nx, ny);
    const double rx = dt / f.dx();
    const double ry = dt / f.dy();
    for (std::size_t j = 0; j < ny; ++j)
        for (std::size_t i = 0; i < nx; ++i) {
            const double div_x = fx[j * (nx + 1) + i + 1] - fx[j * (nx + 1) + i];
            const double div_y = fy[(j + 1) * nx + i] - fy[j * nx + i];
            out.at(i, j) = f.at(i, j) - rx * div_x - ry * div_y;
        }
    return out;
}

VelocityGrid central_gradient(const ScalarField& phi) {
    const std::size_t nx = phi.nx();
    const std::size_t ny = phi.ny();
    VelocityGrid g{ScalarField(phi.domain(), nx, ny), ScalarField(phi.domain(), nx, ny)};
    for (std::size_t j = 0; j < ny; ++j)
        for (std::size_t i = 0; i < nx; ++i) {
            const double l = i > 0 ? phi.at(i - 1, j) : phi.at(i, j);
            const double r = i + 1 < nx ? phi.at(i + 1, j) : phi.at(i, j);
            const double d = j > 0 ? phi.at(i, j - 1) : phi.at(i, j);
            const double u = j + 1 < ny ? phi.at(i, j + 1) : phi.at(i, j);
            g.vx.at(i, j) = (r - l) / (2.0 * phi.dx());
            g.vy.at(i, j) = (u - d) / (2.0 * phi.dy());
        }
    return g;
}

double lyapunov(const ScalarField& phi) {
    const VelocityGrid g = central_gradient(phi);
    double sum = 0.0;
    const auto gx = g.vx.samples();
    const auto gy = g.vy.samples();
    for (std::size_t k = 0; k < gx.size(); ++k) sum += gx[k] * gx[k] + gy[k] * gy[k];
    return 0.5 * sum * phi.cell_area();
}

VelocityGrid control_velocity_grid(const ScalarField& f, const ScalarField& desired,
                                   const ControlLaw& law) {
    const ScalarField phi = subtract(f, desired);
    VelocityGrid v = central_gradient(phi);
    for (std::size_t j = 0; j < f.ny(); ++j)
        for (std::size_t i = 0; i < f.nx(); ++i) {
            const Vec2 w = velocity(law, {v.vx.at(i, j), v.vy.at(i, j)}, f.at(i, j));
            v.vx.at(i, j) = w.x;
            v.vy.at(i, j) = w.y;
        }
    return v;
}

EigenmodeReport heat_eigenmode_check(double L, std::size_t n, double D, double fraction) {
    const Domain dom = Domain::square(L);
    const double k = std::numbers::pi / L;
    ScalarField phi = ScalarField::from_function(dom, n, n, [&](Vec2 x) { return std::cos(k * x.x); });
    const ScalarField mode = phi;
    auto amplitude = [&](const ScalarField& f) {
        double num = 0.0, den = 0.0;
        for (std::size_t q = 0; q < f.size(); ++q) {
            num += f.samples()[q] * mode.samples()[q];
            den += mode.samples()[q] * mode.samples()[q];
        }
        return num / den;
    };

    EigenmodeReport rep;
    rep.t_final = 1.0 / (D * k * k);
    const GridSolverConfig limit = GridSolverConfig::stable(phi, D, fraction);
    rep.steps = static_cast<std::size_t>(std::ceil(rep.t_final / limit.dt));
    const GridSolverConfig cfg{rep.t_final / static_cast<double>(rep.steps), D};
    const double a0 = amplitude(phi);
    for (std::size_t s = 0; s < rep.steps; ++s) phi = heat_step(phi, cfg);
    rep.measured_ratio = amplitude(phi) / a0;
    rep.analytic_ratio = std::exp(-D * k * k * rep.t_final);
    rep.relative_error = std::abs(rep.measured_ratio - rep.analytic_ratio) / rep.analytic_ratio;
    return rep;
}

TransformationReport transformation_check(double L, std::size_t n, double D, FluxScheme scheme) {
    const Domain dom = Domain::square(L);
    const double k = std::numbers::pi / L;
    const double area = L * L;
    // Both densities integrate to one and have zero normal derivative on the walls.
    const ScalarField desired = ScalarField::from_function(dom, n, n, [&](Vec2 x) {
        return (1.0 + 0.5 * std::cos(k * x.x) * std::cos(k * x.y)) / area;
    });
    const ScalarField f = ScalarField::from_function(dom, n, n, [&](Vec2 x) {
        return (1.0 + 0.3 * std::cos(2.0 * k * x.x) + 0.25 * std::cos(k * x.y) +
                0.2 * std::cos(k * x.x) * std::cos(2.0 * k * x.y)) /
               area;
    });
    ControlLaw law;
    law.D = D;
    law.f_floor = 1e-6 / area;

    const VelocityGrid v = control_velocity_grid(f, desired, law);
    const double h = std::min(f.dx(), f.dy());
    const double dt = std::min(0.05 * h * h / D, 0.25 * h / std::max(max_speed(v), 1e-300));

    const ScalarField f_next = continuity_step(f, v, dt, scheme);
    const ScalarField phi = subtract(f, desired);
    const ScalarField phi_next = heat_step(phi, {dt, D});

    double diff2 = 0.0, ref2 = 0.0;
    for (std::size_t q = 0; q < f.size(); ++q) {
        const double inc_cont = f_next.samples()[q] - f.samples()[q];
        const double inc_heat = phi_next.samples()[q] - phi.samples()[q];
        diff2 += (inc_cont - inc_heat) * (inc_cont - inc_heat);
        ref2 += inc_heat * inc_heat;
    }
    TransformationReport rep;
    rep.relative_l2 = std::sqrt(diff2 / ref2);
    rep.mass_drift = std::abs(integrate_field(f_next) - integrate_field(f));
    rep.dt = dt;
    return rep;
}

ScalarField random_smooth_field(const Domain& domain, std::size_t n, std::uint64_t seed, double mean,
                                int max_mode, int modes) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick(0, max_mode);
    std::uniform_real_distribution<double> amp(-1.0, 1.0);
    struct Mode { int a, b; double c; };
    std::vector<Mode> terms;
    while (static_cast<int>(terms.size()) < modes) {
        const int a = pick(rng), b = pick(rng);
        if (a == 0 && b == 0) continue;
        terms.push_back({a, b, amp(rng)});
    }
    const double kx = std::numbers::pi / domain.length_x;
    const double ky = std::numbers::pi / domain.length_y;
    ScalarField f = ScalarField::from_function(domain, n, n, [&](Vec2 x) {
        const Vec2 p = x - domain.lower;
        double v = 0.0;
        for (const Mode& m : terms) v += m.c * std::cos(m.a * kx * p.x) * std::cos(m.b * ky * p.y);
        return v;
    });
    const double shift = mean - integrate_field(f) / domain.area();
    for (double& v : f.samples()) v += shift;
    return f;
}

LyapunovReport lyapunov_decay(ScalarField phi, const GridSolverConfig& cfg, std::size_t steps) {
    LyapunovReport rep;
    rep.mean = integrate_field(phi) / phi.domain().area();
    auto max_dev = [&](const ScalarField& f) {
        double m = 0.0;
        for (double v : f.samples()) m = std::max(m, std::abs(v - rep.mean));
        return m;
    };
    rep.initial_max_dev = max_dev(phi);
    rep.values.push_back(lyapunov(phi));
    for (std::size_t s = 0; s < steps; ++s) {
        phi = heat_step(phi, cfg);
        const double v = lyapunov(phi);
        // Allow for round-off once V has decayed to the noise floor.
        if (v > rep.values.back() * (1.0 + 1e-12) + 1e-300) rep.monotone = false;
        rep.values.push_back(v);
    }
    rep.final_max_dev = max_dev(phi);
    return rep;
}

}  // namespace swarmheat
