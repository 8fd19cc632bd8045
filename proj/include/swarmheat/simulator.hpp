#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "swarmheat/controller.hpp"
#include "swarmheat/field.hpp"
#include "swarmheat/kde.hpp"
#include "swarmheat/kernels.hpp"

namespace swarmheat {

/// Raised when the explicit integration blows up (non-finite positions or
/// overshoots larger than the domain).
class SimulationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct InitSpec {
    enum class Kind { uniform, gaussian, file };
    Kind kind = Kind::uniform;
    Vec2 mean{0.5, 0.5};
    double sigma = 0.1;
    std::filesystem::path file;
};

struct SimConfig {
    std::size_t N = 1000;
    double dt = 0.0;  // 0 selects default_dt()
    double T = 0.1;
    std::uint64_t seed = 1;
    InitSpec init;
    unsigned threads = 1;
    std::size_t metrics_every = 50;
    std::size_t metrics_grid = 64;
    std::size_t snapshot_every = 0;  // 0 = initial and final only

    void validate() const;
};

/// Everything the closed loop needs besides the agents themselves.
struct SwarmModel {
    Domain domain;
    ScalarField desired;
    Kernel kernel = Kernel::gaussian();
    double h = 0.05;
    ControlLaw law;
};

struct MetricsRecord {
    double t = 0.0;
    double E = 0.0;            // int |f_hat - f_desired|
    double V_hat = 0.0;        // 1/2 int |grad Phi|^2
    double mass_defect = 0.0;  // int Phi
    double mean_speed = 0.0;
};

/// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

SwarmState init_swarm(const SimConfig& cfg, const Domain& domain);

/// Mirrors an overshoot back across each violated wall. Points inside the domain
/// are returned unchanged. Throws SimulationError when the overshoot exceeds the
/// domain size.
Vec2 reflect_boundary(Vec2 x, const Domain& domain);

/// dt = 0.1 h^2 (f_eff / f_uniform) / D with f_eff = max(f_floor, K(0)/(N h^2)),
/// the smallest density an agent can estimate at its own position.
double default_dt(const SwarmModel& model, std::size_t n_agents);

/// Velocities of all agents from one frozen estimate epoch.
std::vector<Vec2> agent_velocities(const SwarmState& s, const SwarmModel& model, unsigned threads);

/// Explicit Euler step of every agent from the same frozen velocities, followed
/// by wall reflection.
SwarmState advance(const SwarmState& s, std::span<const Vec2> velocities, const Domain& domain,
                   double dt);

/// agent_velocities + advance.
SwarmState step(const SwarmState& s, const SwarmModel& model, double dt, unsigned threads = 1);

/// KDE of the swarm sampled at the cell centers of an n-by-n grid over the domain.
ScalarField kde_field(const SwarmState& s, const SwarmModel& model, std::size_t n, unsigned threads);

MetricsRecord compute_metrics(const SwarmState& s, std::span<const Vec2> velocities,
                              const SwarmModel& model, std::size_t grid_n, unsigned threads);

struct Snapshot {
    std::size_t step = 0;
    double t = 0.0;
    ScalarField field;
};

struct RunCallbacks {
    /// Called for every step index k = 0..n_steps with the state at t_k and the
    /// velocities evaluated on it.
    std::function<void(std::size_t, const SwarmState&, std::span<const Vec2>)> on_state;
    std::function<void(const MetricsRecord&)> on_metrics;
    std::function<void(const Snapshot&)> on_snapshot;
};

struct RunResult {
    SwarmState final_state;
    std::vector<MetricsRecord> metrics;
    std::vector<Snapshot> snapshots;
    std::size_t steps = 0;
    double dt = 0.0;
};

/// Number of steps and the step length actually used (T is split evenly).
std::pair<std::size_t, double> step_plan(double T, double dt);

RunResult run(const SimConfig& cfg, const SwarmModel& model, const RunCallbacks& callbacks = {});

/// Runs from a given initial state instead of init_swarm().
RunResult run_from(SwarmState initial, const SimConfig& cfg, const SwarmModel& model,
                   const RunCallbacks& callbacks = {});

}  // namespace swarmheat
