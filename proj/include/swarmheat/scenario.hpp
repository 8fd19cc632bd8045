#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "swarmheat/controller.hpp"
#include "swarmheat/field.hpp"
#include "swarmheat/kernels.hpp"
#include "swarmheat/pde_oracle.hpp"
#include "swarmheat/simulator.hpp"

namespace swarmheat {

/// Scenario file problem; the message starts with the offending key path.
class ScenarioError : public std::runtime_error {
public:
    ScenarioError(const std::string& key, const std::string& what)
        : std::runtime_error(key + ": " + what), key_(key) {}
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

struct DesiredSpec {
    enum class Kind { uniform, gaussian_mixture, image };
    Kind kind = Kind::uniform;
    std::filesystem::path image;
    double floor = 1e-3;
    bool invert = false;
    std::size_t resolution = 128;  // grid for analytic densities
    std::vector<GaussianBump> components;
};

struct OracleSpec {
    std::size_t n = 128;
    double fraction = 0.2;  // of the explicit stability bound
    FluxScheme scheme = FluxScheme::central;
    std::size_t crossval_grid = 64;
    double crossval_max_time = 0.0;  // 0 = sim.T
};

struct Scenario {
    std::string name = "scenario";
    Domain domain;
    DesiredSpec desired;
    std::string kernel_name = "gaussian";
    double kernel_cutoff = 3.0;
    BandwidthPolicy::Mode bandwidth_mode = BandwidthPolicy::Mode::fixed;
    std::optional<double> bandwidth_h;  // default: min(L_x, L_y) / 20
    double bandwidth_c_nu = 1.0;
    ControlLaw control;
    std::optional<double> control_f_floor;  // default: 1e-2 * uniform level
    SimConfig sim;
    std::size_t trajectory_every = 0;  // 0 = same as metrics.every
    std::string simd = "auto";
    OracleSpec oracle;
};

/// Reads a `key = value` file. Unknown keys, malformed values and constraint
/// violations throw ScenarioError naming the key. Relative paths are resolved
/// against the file's directory.
Scenario parse_scenario(const std::filesystem::path& path);
Scenario parse_scenario_text(const std::string& text,
                             const std::filesystem::path& base_dir = std::filesystem::current_path());

/// Canonical text with every key spelled out; parse_scenario_text() of the result
/// yields the same scenario.
std::string to_text(const Scenario& s);

void validate(const Scenario& s);

ScalarField build_desired(const Scenario& s);

/// Resolves defaults (h, f_floor) and builds the closed-loop model. The initial
/// swarm is needed for the rule-of-thumb bandwidth.
SwarmModel build_model(const Scenario& s, const SwarmState& initial);

struct RunOptions {
    unsigned threads = 1;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> snapshot_every;
};

struct ScenarioOutcome {
    int exit_code = 0;
    std::string message;
    RunResult result;
};

/// Runs the scenario and writes manifest.scn, metrics.csv, trajectory.csv and
/// snapshots/ under out_dir. Simulator failures give a nonzero exit code.
ScenarioOutcome run_scenario(Scenario s, const std::filesystem::path& out_dir,
                             const RunOptions& options = {});

/// Shortest decimal that round-trips to the same double.
std::string format_number(double v);

}  // namespace swarmheat
