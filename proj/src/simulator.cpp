#include "swarmheat/simulator.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "swarmheat/parallel.hpp"
#include "swarmheat/pde_oracle.hpp"

namespace swarmheat {

void SimConfig::validate() const {
    if (N == 0) throw std::invalid_argument("sim.N must be at least 1");
    if (dt < 0.0 || !std::isfinite(dt)) throw std::invalid_argument("sim.dt must be positive");
    if (T < 0.0 || !std::isfinite(T)) throw std::invalid_argument("sim.T must be nonnegative");
    if (dt > 0.0 && T > 0.0 && T < dt) throw std::invalid_argument("sim.T must be at least sim.dt");
    if (metrics_every == 0) throw std::invalid_argument("metrics.every must be at least 1");
    if (metrics_grid < 2) throw std::invalid_argument("metrics.grid must be at least 2");
    if (threads == 0) throw std::invalid_argument("thread count must be at least 1");
    if (init.kind == InitSpec::Kind::gaussian && !(init.sigma > 0.0))
        throw std::invalid_argument("sim.init_sigma must be positive");
}

namespace {

std::vector<Vec2> read_positions_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open initial positions '" + path.string() + "'");
    std::vector<Vec2> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        if (lineno == 1 && !(std::isdigit(static_cast<unsigned char>(line[0])) || line[0] == '-' ||
                             line[0] == '+' || line[0] == '.'))
            continue;  // header
        std::istringstream ss(line);
        Vec2 p;
        char comma = 0;
        if (!(ss >> p.x >> comma >> p.y) || comma != ',')
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": expected 'x,y'");
        out.push_back(p);
    }
    return out;
}

}  // namespace

SwarmState init_swarm(const SimConfig& cfg, const Domain& domain) {
    cfg.validate();
    domain.validate();
    SwarmState s;
    s.positions.reserve(cfg.N);
    std::mt19937_64 rng(cfg.seed);
    switch (cfg.init.kind) {
        case InitSpec::Kind::uniform:
            for (std::size_t i = 0; i < cfg.N; ++i) {
                const double ux = uniform01(rng);
                const double uy = uniform01(rng);
                s.positions.push_back(
                    {domain.lower.x + ux * domain.length_x, domain.lower.y + uy * domain.length_y});
            }
            break;
        case InitSpec::Kind::gaussian: {
            // Box-Muller pairs; draws outside the domain are rejected.
            std::size_t attempts = 0;
            while (s.positions.size() < cfg.N) {
                if (++attempts > 1000 * cfg.N + 1000000)
                    throw std::runtime_error("gaussian init: too many rejected samples");
                const double u1 = 1.0 - uniform01(rng);
                const double u2 = uniform01(rng);
                const double r = std::sqrt(-2.0 * std::log(u1));
                const double th = 2.0 * std::numbers::pi * u2;
                const Vec2 p = cfg.init.mean + cfg.init.sigma * Vec2{r * std::cos(th), r * std::sin(th)};
                if (domain.contains(p)) s.positions.push_back(p);
            }
            break;
        }
        case InitSpec::Kind::file: {
            s.positions = read_positions_csv(cfg.init.file);
            if (s.positions.size() != cfg.N)
                throw std::runtime_error("initial positions file has " + std::to_string(s.positions.size()) +
                                         " agents, sim.N is " + std::to_string(cfg.N));
            for (const Vec2& p : s.positions)
                if (!domain.contains(p))
                    throw std::runtime_error("initial position outside the domain in '" +
                                             cfg.init.file.string() + "'");
            break;
        }
    }
    return s;
}

Vec2 reflect_boundary(Vec2 x, const Domain& domain) {
    if (!is_finite(x)) throw SimulationError("non-finite agent position");
    auto axis = [](double v, double lo, double len) {
        const double hi = lo + len;
        if (v < lo) {
            if (lo - v > len) throw SimulationError("agent overshoot exceeds the domain size");
            return lo + (lo - v);
        }
        if (v > hi) {
            if (v - hi > len) throw SimulationError("agent overshoot exceeds the domain size");
            return hi - (v - hi);
        }
        return v;
    };
    return {axis(x.x, domain.lower.x, domain.length_x), axis(x.y, domain.lower.y, domain.length_y)};
}

double default_dt(const SwarmModel& model, std::size_t n_agents) {
    const double self = model.kernel.eval(Vec2{0.0, 0.0}) /
                        (static_cast<double>(n_agents) * model.h * model.h);
    const double f_eff = std::max(model.law.f_floor, self);
    return 0.1 * model.h * model.h * (f_eff / model.domain.uniform_level()) / model.law.D;
}

std::vector<Vec2> agent_velocities(const SwarmState& s, const SwarmModel& model, unsigned threads) {
    const DensityEstimator est(s.positions, model.kernel, model.h);
    const std::vector<DensityEstimate> local = est.at_agents(threads);
    std::vector<Vec2> v(s.size());
    parallel_for(s.size(), threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i)
            v[i] = agent_velocity(model.law, local[i], model.desired, s.positions[i]);
    });
    return v;
}

SwarmState advance(const SwarmState& s, std::span<const Vec2> velocities, const Domain& domain,
                   double dt) {
    SwarmState next;
    next.t = s.t + dt;
    next.positions.resize(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        const Vec2 moved = s.positions[i] + dt * velocities[i];
        if (!is_finite(moved))
            throw SimulationError("agent " + std::to_string(i) + " left the finite range at t = " +
                                  std::to_string(s.t) + " (time step too large?)");
        try {
            next.positions[i] = reflect_boundary(moved, domain);
        } catch (const SimulationError& e) {
            throw SimulationError(std::string(e.what()) + " (agent " + std::to_string(i) +
                                  ", t = " + std::to_string(s.t) + "; time step too large?)");
        }
    }
    return next;
}

SwarmState step(const SwarmState& s, const SwarmModel& model, double dt, unsigned threads) {
    const std::vector<Vec2> v = agent_velocities(s, model, threads);
    return advance(s, v, model.domain, dt);
}

ScalarField kde_field(const SwarmState& s, const SwarmModel& model, std::size_t n, unsigned threads) {
    ScalarField f(model.domain, n, n);
    std::vector<Vec2> centers;
    centers.reserve(n * n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) centers.push_back(f.cell_center(i, j));
    const DensityEstimator est(s.positions, model.kernel, model.h);
    const auto values = est.at_points(centers, threads);
    for (std::size_t k = 0; k < values.size(); ++k) f.samples()[k] = values[k].value;
    return f;
}

MetricsRecord compute_metrics(const SwarmState& s, std::span<const Vec2> velocities,
                              const SwarmModel& model, std::size_t grid_n, unsigned threads) {
    ScalarField phi = kde_field(s, model, grid_n, threads);
    for (std::size_t j = 0; j < grid_n; ++j)
        for (std::size_t i = 0; i < grid_n; ++i)
            phi.at(i, j) -= sample_field(model.desired, phi.cell_center(i, j));

    MetricsRecord m;
    m.t = s.t;
    double abs_sum = 0.0;
    double sum = 0.0;
    for (double v : phi.samples()) {
        abs_sum += std::abs(v);
        sum += v;
    }
    m.E = abs_sum * phi.cell_area();
    m.mass_defect = sum * phi.cell_area();
    m.V_hat = lyapunov(phi);
    double speed = 0.0;
    for (const Vec2& v : velocities) speed += norm(v);
    m.mean_speed = velocities.empty() ? 0.0 : speed / static_cast<double>(velocities.size());
    return m;
}

std::pair<std::size_t, double> step_plan(double T, double dt) {
    if (T <= 0.0) return {0, dt};
    const auto n = static_cast<std::size_t>(std::ceil(T / dt - 1e-9));
    const std::size_t steps = std::max<std::size_t>(n, 1);
    return {steps, T / static_cast<double>(steps)};
}

RunResult run(const SimConfig& cfg, const SwarmModel& model, const RunCallbacks& callbacks) {
    return run_from(init_swarm(cfg, model.domain), cfg, model, callbacks);
}

RunResult run_from(SwarmState state, const SimConfig& cfg, const SwarmModel& model,
                   const RunCallbacks& callbacks) {
    cfg.validate();
    model.law.validate();
    const double dt_req = cfg.dt > 0.0 ? cfg.dt : default_dt(model, state.size());
    const auto [n_steps, dt] = step_plan(cfg.T, dt_req);
    const double t0 = state.t;

    RunResult result;
    result.steps = n_steps;
    result.dt = dt;
    for (std::size_t k = 0;; ++k) {
        const bool last = k == n_steps;
        state.t = last && n_steps > 0 ? t0 + cfg.T : t0 + static_cast<double>(k) * dt;
        const std::vector<Vec2> v = agent_velocities(state, model, cfg.threads);
        if (callbacks.on_state) callbacks.on_state(k, state, v);
        if (k % cfg.metrics_every == 0 || last) {
            result.metrics.push_back(compute_metrics(state, v, model, cfg.metrics_grid, cfg.threads));
            if (callbacks.on_metrics) callbacks.on_metrics(result.metrics.back());
        }
        if (k == 0 || last || (cfg.snapshot_every > 0 && k % cfg.snapshot_every == 0)) {
            Snapshot snap{k, state.t, kde_field(state, model, cfg.metrics_grid, cfg.threads)};
            if (callbacks.on_snapshot) callbacks.on_snapshot(snap);
            result.snapshots.push_back(std::move(snap));
        }
        if (last) break;
        state = advance(state, v, model.domain, dt);
    }
    result.final_state = std::move(state);
    return result;
}

}  // namespace swarmheat
