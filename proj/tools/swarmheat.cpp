#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "swarmheat/crossval.hpp"
#include "swarmheat/kde_checks.hpp"
#include "swarmheat/pde_oracle.hpp"
#include "swarmheat/scenario.hpp"
#include "swarmheat/simd/dispatch.hpp"
#include "swarmheat/version.hpp"

namespace sh = swarmheat;

namespace {

void setup_logging() {
    auto logger = spdlog::stderr_color_mt("swarmheat");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%l] %v");
    const char* env = std::getenv("SWARM_LOG");
    spdlog::set_level(env ? spdlog::level::from_str(env) : spdlog::level::warn);
}

struct Common {
    std::string scenario;
    std::string out;
    std::optional<std::uint64_t> seed;
    unsigned threads = 1;
    std::optional<std::size_t> snapshot_every;
    std::string simd;
};

sh::Scenario load(const Common& c) {
    sh::Scenario s = c.scenario.empty() ? sh::Scenario{} : sh::parse_scenario(c.scenario);
    if (!c.simd.empty()) s.simd = c.simd;
    if (c.seed) s.sim.seed = *c.seed;
    sh::validate(s);
    sh::simd::set_active_level(sh::simd::resolve_level(s.simd));
    return s;
}

void check_line(bool ok, const std::string& what) {
    std::printf("%s  %s\n", ok ? "PASS" : "FAIL", what.c_str());
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

int cmd_run(const Common& c) {
    sh::RunOptions opt;
    opt.threads = c.threads;
    opt.seed = c.seed;
    opt.snapshot_every = c.snapshot_every;
    sh::Scenario s = sh::parse_scenario(c.scenario);
    if (!c.simd.empty()) s.simd = c.simd;
    const auto outcome = sh::run_scenario(s, c.out, opt);
    std::printf("%s\n", outcome.message.c_str());
    return outcome.exit_code;
}

int cmd_oracle_heat(const Common& c) {
    const sh::Scenario s = load(c);
    const double L = s.domain.length_x;
    const auto rep = sh::heat_eigenmode_check(L, s.oracle.n, s.control.D, s.oracle.fraction);
    std::printf("eigenmode cos(pi x / L): L=%s D=%s n=%zu steps=%zu t=%s\n", num(L).c_str(),
                num(s.control.D).c_str(), s.oracle.n, rep.steps, num(rep.t_final).c_str());
    std::printf("  measured decay %.6f  analytic %.6f\n", rep.measured_ratio, rep.analytic_ratio);
    const bool ok = rep.relative_error < 0.02;
    check_line(ok, "decay rate within 2% (rel. error " + num(rep.relative_error) + ")");
    return ok ? 0 : 1;
}

int cmd_oracle_continuity(const Common& c) {
    const sh::Scenario s = load(c);
    const double L = s.domain.length_x;
    bool all = true;

    const auto tr = sh::transformation_check(L, s.oracle.n, s.control.D, s.oracle.scheme);
    const bool t_ok = tr.relative_l2 < 0.05;
    check_line(t_ok, "continuity step under feedback velocity matches heat step on the error (rel. L2 " +
                         num(tr.relative_l2) + ", mass drift " + num(tr.mass_drift) + ")");
    all = all && t_ok;

    const sh::Domain dom = sh::Domain::square(L);
    const std::size_t n = 16;
    const double dx = L / static_cast<double>(n);
    const sh::GridSolverConfig cfg{0.2 * dx * dx / s.control.D, s.control.D};
    const std::uint64_t base = s.sim.seed;
    for (std::uint64_t k = 0; k < 5; ++k) {
        const auto phi = sh::random_smooth_field(dom, n, base + k, 0.0);
        const auto rep = sh::lyapunov_decay(phi, cfg, 1000);
        const double ratio = rep.final_max_dev / rep.initial_max_dev;
        const bool ok = rep.monotone && ratio < 1e-3;
        check_line(ok, "Lyapunov seed " + std::to_string(base + k) + ": V non-increasing=" +
                           (rep.monotone ? "yes" : "no") + ", max|Phi| ratio " + num(ratio));
        all = all && ok;
    }

    const double mean = 0.5 / dom.area();
    const auto phi = sh::random_smooth_field(dom, n, base + 99, mean);
    const auto rep = sh::lyapunov_decay(phi, cfg, 1000);
    const double rel = rep.final_max_dev / std::abs(rep.mean);
    const bool b_ok = rel < 1e-3 && std::abs(rep.mean) > 0.0;
    check_line(b_ok, "nonzero-mean error settles at c/area=" + num(rep.mean) + " (rel. deviation " +
                         num(rel) + ")");
    all = all && b_ok;
    return all ? 0 : 1;
}

int cmd_oracle_crossval(const Common& c) {
    sh::Scenario s = load(c);
    s.sim.threads = c.threads;
    const sh::SwarmState init = sh::init_swarm(s.sim, s.domain);
    const sh::SwarmModel model = sh::build_model(s, init);
    if (s.sim.dt == 0.0) s.sim.dt = sh::default_dt(model, init.size());
    const double max_time = s.oracle.crossval_max_time > 0.0 ? s.oracle.crossval_max_time : s.sim.T;
    const auto rep = sh::particle_pde_crossval(s.sim, model, s.oracle.crossval_grid, max_time);
    for (const auto& smp : rep.samples)
        std::printf("  t=%-10s E=%-10s rel.L1=%s\n", num(smp.t).c_str(), num(smp.E_particles).c_str(),
                    num(smp.relative_l1).c_str());
    check_line(rep.reached_efold, "error e-folded by t=" + num(rep.t_end) + " (E0 " + num(rep.E0) + ")");
    const bool ok = rep.max_relative_l1 < 0.15;
    check_line(ok, "particle KDE tracks continuity solver within 15% (max rel. L1 " +
                       num(rep.max_relative_l1) + ")");
    return ok && rep.reached_efold ? 0 : 1;
}

int cmd_kde_check(const Common& c) {
    const std::uint64_t seed = c.seed.value_or(1);
    if (!c.simd.empty()) sh::simd::set_active_level(sh::simd::resolve_level(c.simd));
    bool all = true;
    for (const auto& k : sh::shipped_kernels()) {
        const auto rep = sh::check_admissibility(k, seed);
        const bool ok = rep.passed(1e-6);
        const std::string cut = k.kind() == sh::KernelKind::gaussian
                                    ? (k.has_finite_cutoff() ? ", cut " + num(k.cutoff_radius()) : ", untruncated")
                                    : "";
        check_line(ok, "admissible " + k.name() + " (d=" + std::to_string(k.dimension()) + cut +
                           "): integral-1=" + num(rep.integral - 1.0) + ", symmetry " +
                           num(rep.max_symmetry_error) + ", order " + std::to_string(rep.detected_order));
        all = all && ok;
    }
    for (std::uint64_t s = seed; s < seed + 3; ++s) {
        const auto rep = sh::gradient_fd_check(sh::Kernel::gaussian(2), 200, 0.1, 100, s);
        const bool ok = rep.max_relative_error < 1e-6;
        check_line(ok, "gradient vs finite differences, seed " + std::to_string(s) + ": max rel. error " +
                           num(rep.max_relative_error));
        all = all && ok;
    }
    {
        const auto rep = sh::consistency_trend(sh::Kernel::gaussian(2), {100, 1000, 10000}, 50,
                                               {seed, seed + 1, seed + 2}, c.threads);
        std::string errs;
        for (std::size_t i = 0; i < rep.sizes.size(); ++i)
            errs += " N=" + std::to_string(rep.sizes[i]) + ":" + num(rep.mean_abs_error[i]);
        check_line(rep.strictly_decreasing, "mean abs. error decreases with N:" + errs);
        all = all && rep.strictly_decreasing;
    }
    {
        const auto rep = sh::grid_agreement_check(2000, 0.05, 500, seed);
        const bool ok = rep.query_mismatches == 0 && rep.max_same_kernel_error < 1e-12 &&
                        rep.max_bound_ratio <= 1.0;
        check_line(ok, "grid vs brute force: query mismatches " + std::to_string(rep.query_mismatches) +
                           ", same-kernel error " + num(rep.max_same_kernel_error) +
                           ", truncation bound usage " + num(rep.max_bound_ratio));
        all = all && ok;
    }
    return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    setup_logging();
    CLI::App app{"Swarm density control by kernel density estimation and the heat equation"};
    app.set_version_flag("--version", std::string(sh::kVersion));
    app.require_subcommand(1);

    Common c;
    auto add_common = [&](CLI::App* sub, bool need_scenario) {
        auto* opt = sub->add_option("--scenario", c.scenario, "scenario file")->check(CLI::ExistingFile);
        if (need_scenario) opt->required();
        sub->add_option("--seed", c.seed, "override sim.seed");
        sub->add_option("--threads", c.threads, "worker threads")->check(CLI::Range(1u, 1024u));
        sub->add_option("--simd", c.simd, "scalar, avx2 or auto");
    };

    auto* run = app.add_subcommand("run", "run a scenario and write its artifacts");
    add_common(run, true);
    run->add_option("--out", c.out, "output directory")->required();
    run->add_option("--snapshot-every", c.snapshot_every, "steps between KDE snapshots");

    auto* oracle = app.add_subcommand("oracle", "grid PDE checks");
    oracle->require_subcommand(1);
    auto* heat = oracle->add_subcommand("heat", "heat-equation eigenmode decay");
    add_common(heat, false);
    auto* cont = oracle->add_subcommand("continuity", "continuity transform, Lyapunov decay, mean bias");
    add_common(cont, false);
    auto* cross = oracle->add_subcommand("crossval", "particle swarm against the continuity solver");
    add_common(cross, true);

    auto* kde = app.add_subcommand("kde-check", "estimator consistency suite");
    add_common(kde, false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return cmd_run(c);
        if (*heat) return cmd_oracle_heat(c);
        if (*cont) return cmd_oracle_continuity(c);
        if (*cross) return cmd_oracle_crossval(c);
        if (*kde) return cmd_kde_check(c);
    } catch (const sh::ScenarioError& e) {
        spdlog::error("scenario error: {}", e.what());
        return 2;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return 2;
    }
    return 0;
}
