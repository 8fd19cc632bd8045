// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <spdlog/spdlog.h>

#include "support.hpp"
#include "swarmheat/kde.hpp"
#include "swarmheat/kde_checks.hpp"
#include "swarmheat/pde_oracle.hpp"
#include "swarmheat/scenario.hpp"

using namespace swarmheat;
using testsupport::quad;

namespace {

const double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void criterion(int id, const char* title, double budget_s, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < budget_s;
    const bool ok = o.pass && in_time;
    if (!ok) ++failures;
    std::printf("%s %2d  %-44s %s [%.2f s of %.0f s]%s\n", ok ? "PASS" : "FAIL", id, title, o.detail.c_str(), secs,
                budget_s, in_time ? "" : " (over time)");
    std::fflush(stdout);
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::mt19937_64 rng_for(std::uint64_t seed) { return std::mt19937_64(seed * 0x9E3779B97F4A7C15ULL + 1); }

double unit(std::mt19937_64& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

// 1. Quadrature of every shipped kernel with tanh-sinh, plus sampled symmetry,
//    ray monotonicity and the |x K| tail beyond radius 10.
Outcome kernel_admissibility() {
    double worst_int = 0.0, worst_tail = 0.0, worst_sym = 0.0;
    bool unimodal = true;
    for (const Kernel& k : shipped_kernels()) {
        const double R = std::min(k.integration_radius(), 12.0);
        double integral = 0.0, tail = 0.0;
        if (k.dimension() == 1) {
            integral = quad([&](double x) { return k.eval(x); }, -R, R);
            if (k.integration_radius() > 10.0)
                tail = 2.0 * quad([&](double x) { return std::abs(x * k.eval(x)); }, 10.0, 40.0);
        } else {
            integral = quad([&](double x) {
                const double w = std::sqrt(std::max(0.0, R * R - x * x));
                return quad([&](double y) { return k.eval(Vec2{x, y}); }, -w, w);
            }, -R, R);
            if (k.integration_radius() > 10.0)
                tail = 2.0 * kPi * quad([&](double r) { return r * r * k.eval(Vec2{r, 0.0}); }, 10.0, 40.0);
        }
        worst_int = std::max(worst_int, std::abs(integral - 1.0));
        worst_tail = std::max(worst_tail, tail);
        auto rng = rng_for(1);
        const double peak = k.dimension() == 1 ? k.eval(0.0) : k.eval(Vec2{0.0, 0.0});
        for (int i = 0; i < 2000; ++i) {
            const double r = 4.0 * unit(rng), th = 2.0 * kPi * unit(rng), th2 = 2.0 * kPi * unit(rng);
            double a, b;
            if (k.dimension() == 1) {
                a = k.eval(r);
                b = k.eval(-r);
            } else {
                a = k.eval(Vec2{r * std::cos(th), r * std::sin(th)});
                b = k.eval(Vec2{r * std::cos(th2), r * std::sin(th2)});
            }
            worst_sym = std::max(worst_sym, std::abs(a - b) / peak);
            if (a > peak) unimodal = false;
        }
        for (int ray = 0; ray < 8; ++ray) {
            double prev = peak;
            for (int s = 1; s <= 500; ++s) {
                const double r = 4.0 * s / 500.0, th = kPi * ray / 4.0;
                const double v = k.dimension() == 1 ? k.eval(ray % 2 ? r : -r)
                                                    : k.eval(Vec2{r * std::cos(th), r * std::sin(th)});
                if (v > prev) unimodal = false;
                prev = v;
            }
        }
    }
    const bool ok = worst_int <= 1e-6 && worst_tail <= 1e-6 && worst_sym <= 1e-12 && unimodal;
    return {ok, "max|int K - 1| " + fmt("%.2e", worst_int) + ", tail " + fmt("%.1e", worst_tail) +
                    ", asym " + fmt("%.1e", worst_sym) + (unimodal ? ", unimodal" : ", NOT unimodal")};
}

// 2. Analytic gradient against central differences of the estimate.
Outcome gradient_vs_fd() {
    double worst = 0.0;
    const double h = 0.1, d = 1e-4 * h, cut = 3.0 * h;
    for (std::uint64_t seed : {11u, 12u, 13u}) {
        auto rng = rng_for(seed);
        std::vector<Vec2> agents(300);
        for (auto& a : agents) a = {unit(rng), unit(rng)};
        const DensityEstimator est(agents, Kernel::gaussian(), h);
        int probes = 0;
        while (probes < 100) {
            const Vec2 x{unit(rng), unit(rng)};
            // Central differences straddling the cutoff circle would see the jump.
            bool near_cut = false;
            for (const Vec2& a : agents)
                if (std::abs(norm(x - a) - cut) < 10.0 * d) near_cut = true;
            if (near_cut) continue;
            const DensityEstimate e = est.at(x);
            const Vec2 fd{(est.at(x + Vec2{d, 0}).value - est.at(x - Vec2{d, 0}).value) / (2 * d),
                          (est.at(x + Vec2{0, d}).value - est.at(x - Vec2{0, d}).value) / (2 * d)};
            const double scale = std::max(norm(e.gradient), 1e-2 * e.value / h);
            worst = std::max(worst, norm(e.gradient - fd) / scale);
            ++probes;
        }
    }
    return {worst < 1e-6, "max rel. error " + fmt("%.2e", worst) + " (limit 1e-6), 300 probes"};
}

// 3. Mean absolute error against the standard bivariate Gaussian with h = N^(-1/6).
Outcome consistency_check() {
    const std::vector<std::size_t> sizes{100, 1000, 10000};
    std::vector<double> mae(sizes.size(), 0.0);
    auto normal_pair = [](std::mt19937_64& rng) {
        std::normal_distribution<double> n(0.0, 1.0);
        const double a = n(rng);
        return Vec2{a, n(rng)};
    };
    auto truth = [](Vec2 p) { return std::exp(-0.5 * norm2(p)) / (2.0 * kPi); };
    for (std::uint64_t seed : {21u, 22u, 23u}) {
        auto prng = rng_for(seed + 100);
        std::vector<Vec2> probes(50);
        for (auto& p : probes) p = normal_pair(prng);
        for (std::size_t s = 0; s < sizes.size(); ++s) {
            auto rng = rng_for(seed * 31 + s);
            std::vector<Vec2> pts(sizes[s]);
            for (auto& p : pts) p = normal_pair(rng);
            const double h = std::pow(static_cast<double>(sizes[s]), -1.0 / 6.0);
            const DensityEstimator est(pts, Kernel::gaussian(), h);
            double e = 0.0;
            for (const Vec2& p : probes) e += std::abs(est.at(p).value - truth(p));
            mae[s] += e / 50.0 / 3.0;
        }
    }
    const bool ok = mae[1] < mae[0] && mae[2] < mae[1];
    return {ok, "MAE " + fmt("%.4f", mae[0]) + " > " + fmt("%.4f", mae[1]) + " > " + fmt("%.4f", mae[2])};
}

// 4. Grid-accelerated estimate against an untruncated double loop, and grid
//    queries against a plain distance filter.
Outcome grid_vs_brute() {
    const double h = 0.05;
    auto rng = rng_for(31);
    std::vector<Vec2> agents(5000);
    for (auto& a : agents) a = {unit(rng), unit(rng)};
    const Kernel k = Kernel::gaussian();
    const DensityEstimator est(agents, k, h);
    const double tau = std::exp(-18.0);  // mass of (2/pi) e^{-2|u|^2} beyond |u| = 3
    const double k0 = 2.0 / kPi;
    double worst_ratio = 0.0;
    std::size_t mismatches = 0;
    for (int p = 0; p < 500; ++p) {
        const Vec2 x{1.2 * unit(rng) - 0.1, 1.2 * unit(rng) - 0.1};
        const double g = est.at(x, KdeMethod::grid).value;
        double full = 0.0;
        for (const Vec2& a : agents) full += k0 * std::exp(-2.0 * norm2((x - a) * (1.0 / h)));
        full /= agents.size() * h * h;
        const double bound = tau * (g + k0 / (h * h)) + 1e-13 * std::max(g, 1.0);
        worst_ratio = std::max(worst_ratio, std::abs(g - full) / bound);
        std::vector<std::size_t> want;
        for (std::size_t j = 0; j < agents.size(); ++j) {
            const double dx = agents[j].x - x.x, dy = agents[j].y - x.y;
            if (dx * dx + dy * dy <= 9.0 * h * h) want.push_back(j);
        }
        if (est.grid().query(x, 3.0 * h) != want) ++mismatches;
    }
    return {worst_ratio <= 1.0 && mismatches == 0,
            "max |grid - exact| / bound " + fmt("%.3f", worst_ratio) + ", query mismatches " +
                std::to_string(mismatches) + " of 500"};
}

// 5. Projection of the solution on cos(pi x / L) after one e-folding time.
Outcome heat_eigenmode() {
    const double L = 1.0, D = 5.0, k = kPi / L;
    const std::size_t n = 128;
    ScalarField phi = ScalarField::from_function(Domain::square(L), n, n, [&](Vec2 x) { return std::cos(k * x.x); });
    const ScalarField mode = phi;
    auto amp = [&](const ScalarField& f) {
        double a = 0.0, b = 0.0;
        for (std::size_t q = 0; q < f.size(); ++q) a += f.samples()[q] * mode.samples()[q], b += mode.samples()[q] * mode.samples()[q];
        return a / b;
    };
    const double T = 1.0 / (D * k * k), dx = L / n;
    const std::size_t steps = static_cast<std::size_t>(std::ceil(T / (0.05 * dx * dx / D)));
    const GridSolverConfig cfg{T / steps, D};
    const double a0 = amp(phi);
    for (std::size_t s = 0; s < steps; ++s) phi = heat_step(phi, cfg);
    const double ratio = amp(phi) / a0, want = std::exp(-1.0);
    const double err = std::abs(ratio - want) / want;
    return {err < 0.02, "decay " + fmt("%.6f", ratio) + " vs " + fmt("%.6f", want) + ", rel. error " + fmt("%.2e", err)};
}

// 6. Continuity update under v = -D grad(Phi) / f (analytic gradient) against
//    the heat update of Phi, on smooth analytic f and f^d.
Outcome transformation() {
    const std::size_t n = 128;
    const double L = 1.0, D = 5.0, k = kPi / L, h = L / n;
    const Domain dom = Domain::square(L);
    auto fd = [&](Vec2 x) { return 1.0 + 0.4 * std::cos(k * x.x) * std::cos(2 * k * x.y); };
    auto ff = [&](Vec2 x) { return 1.0 + 0.3 * std::cos(2 * k * x.x) + 0.2 * std::cos(k * x.y); };
    auto grad_phi = [&](Vec2 x) {
        return Vec2{-0.6 * k * std::sin(2 * k * x.x) + 0.4 * k * std::sin(k * x.x) * std::cos(2 * k * x.y),
                    -0.2 * k * std::sin(k * x.y) + 0.8 * k * std::cos(k * x.x) * std::sin(2 * k * x.y)};
    };
    const ScalarField f = ScalarField::from_function(dom, n, n, ff);
    const ScalarField d = ScalarField::from_function(dom, n, n, fd);
    VelocityGrid v{ScalarField(dom, n, n), ScalarField(dom, n, n)};
    double vmax = 0.0;
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2 x = f.cell_center(i, j);
            const Vec2 w = (-D / ff(x)) * grad_phi(x);
            v.vx.at(i, j) = w.x;
            v.vy.at(i, j) = w.y;
            vmax = std::max(vmax, norm(w));
        }
    const double dt = std::min(0.05 * h * h / D, 0.25 * h / vmax);
    const ScalarField fc = continuity_step(f, v, dt, FluxScheme::central);
    const ScalarField phi = subtract(f, d);
    const ScalarField ph = heat_step(phi, {dt, D});
    double num = 0.0, den = 0.0;
    for (std::size_t q = 0; q < f.size(); ++q) {
        const double a = fc.samples()[q] - f.samples()[q];
        const double b = ph.samples()[q] - phi.samples()[q];
        num += (a - b) * (a - b);
        den += b * b;
    }
    const double rel = std::sqrt(num / den);
    return {rel < 0.05, "relative L2 " + fmt("%.2e", rel) + " (limit 5e-2)"};
}

ScalarField random_cosine_field(std::size_t n, std::uint64_t seed, double mean) {
    auto rng = rng_for(seed);
    std::vector<std::array<double, 3>> modes;
    for (int m = 0; m < 6; ++m) {
        const int p = static_cast<int>(rng() % 5), q = static_cast<int>(rng() % 5);
        if (p == 0 && q == 0) continue;
        modes.push_back({static_cast<double>(p), static_cast<double>(q), 2.0 * unit(rng) - 1.0});
    }
    if (modes.empty()) modes.push_back({1.0, 0.0, 1.0});
    return ScalarField::from_function(Domain::unit_square(), n, n, [&](Vec2 x) {
        double s = mean;
        for (const auto& m : modes) s += m[2] * std::cos(m[0] * kPi * x.x) * std::cos(m[1] * kPi * x.y);
        return s;
    });
}

double oracle_V(const ScalarField& p) {
    const std::size_t n = p.nx();
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) {
            const double gx = (p.at(std::min(i + 1, n - 1), j) - p.at(i > 0 ? i - 1 : 0, j)) / (2 * p.dx());
            const double gy = (p.at(i, std::min(j + 1, n - 1)) - p.at(i, j > 0 ? j - 1 : 0)) / (2 * p.dy());
            s += gx * gx + gy * gy;
        }
    return 0.5 * s * p.cell_area();
}

double max_abs_dev(const ScalarField& p, double c) {
    double m = 0.0;
    for (double v : p.samples()) m = std::max(m, std::abs(v - c));
    return m;
}

// 7. V non-increasing over 1000 heat steps from 5 random zero-mean fields.
Outcome lyapunov_monotone() {
    const std::size_t n = 16;
    const double D = 5.0, dx = 1.0 / n;
    const GridSolverConfig cfg{0.2 * dx * dx / D, D};
    bool monotone = true;
    double worst_ratio = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        ScalarField phi = random_cosine_field(n, 40 + seed, 0.0);
        const double m0 = max_abs_dev(phi, 0.0);
        double V = oracle_V(phi);
        for (int s = 0; s < 1000; ++s) {
            phi = heat_step(phi, cfg);
            const double next = oracle_V(phi);
            if (next > V * (1.0 + 1e-12)) monotone = false;
            V = next;
        }
        worst_ratio = std::max(worst_ratio, max_abs_dev(phi, 0.0) / m0);
    }
    return {monotone && worst_ratio < 1e-3,
            std::string(monotone ? "V non-increasing" : "V INCREASED") + ", worst final/initial max|Phi| " +
                fmt("%.2e", worst_ratio)};
}

// 8. A field with mean c/area relaxes to that constant, not to zero.
Outcome nonzero_mean_bias() {
    const std::size_t n = 16;
    const double D = 5.0, dx = 1.0 / n, c = 0.4;
    const GridSolverConfig cfg{0.2 * dx * dx / D, D};
    ScalarField phi = random_cosine_field(n, 77, c);
    for (int s = 0; s < 1000; ++s) phi = heat_step(phi, cfg);
    const double dev = max_abs_dev(phi, c) / c;
    double lo = 1e300;
    for (double v : phi.samples()) lo = std::min(lo, std::abs(v));
    const bool ok = dev < 1e-3 && lo > 0.5 * c;
    return {ok, "max|Phi - c/area| / (c/area) " + fmt("%.2e", dev) + ", min|Phi| " + fmt("%.3f", lo) + " (c = 0.4)"};
}

// 9. Bimodal image scenario with the experiment parameters, three seeds.
Outcome bimodal_reproduction() {
    const Scenario base = parse_scenario(std::filesystem::path(SWARMHEAT_SCENARIO_DIR) / "bimodal.scn");
    if (base.sim.N != 1000 || base.control.D != 5.0 || base.kernel_name != "gaussian" ||
        std::abs(base.bandwidth_h.value_or(0.0) - base.domain.length_x / 20.0) > 1e-15)
        return {false, "scenario does not use N = 1000, D = 5, h = L/20, gaussian"};
    const auto dir = testsupport::scratch_dir("accept_bimodal");
    bool ok = true;
    std::string detail;
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        RunOptions opt;
        opt.seed = seed;
        const ScenarioOutcome out = run_scenario(base, dir / std::to_string(seed), opt);
        if (out.exit_code != 0) return {false, out.message};
        const auto& m = out.result.metrics;
        double max_speed = 0.0, max_mass = 0.0;
        for (const auto& r : m) max_speed = std::max(max_speed, r.mean_speed), max_mass = std::max(max_mass, std::abs(r.mass_defect));
        const double e_ratio = m.back().E / m.front().E, s_ratio = m.back().mean_speed / max_speed;
        ok = ok && e_ratio < 0.5 && s_ratio < 0.2 && max_mass < 5e-2;
        detail += "seed " + std::to_string(seed) + ": E " + fmt("%.3f", e_ratio) + ", speed " + fmt("%.3f", s_ratio) +
                  ", |mass| " + fmt("%.3f", max_mass) + (seed < 3 ? "; " : "");
    }
    std::filesystem::remove_all(dir);
    return {ok, detail};
}

// 10. Same manifest, same bytes: repeated runs, 1 vs 8 workers, manifest rerun.
Outcome determinism() {
    Scenario s = parse_scenario(std::filesystem::path(SWARMHEAT_SCENARIO_DIR) / "bimodal.scn");
    s.sim.T = 0.02;
    const auto dir = testsupport::scratch_dir("accept_determinism");
    RunOptions one, eight;
    one.threads = 1;
    eight.threads = 8;
    if (run_scenario(s, dir / "a", one).exit_code || run_scenario(s, dir / "b", one).exit_code ||
        run_scenario(s, dir / "c", eight).exit_code)
        return {false, "run failed"};
    const Scenario m = parse_scenario(dir / "a" / "manifest.scn");
    if (run_scenario(m, dir / "d", eight).exit_code) return {false, "manifest rerun failed"};
    const std::string a = testsupport::slurp(dir / "a" / "metrics.csv");
    const bool same = !a.empty() && a == testsupport::slurp(dir / "b" / "metrics.csv") &&
                      a == testsupport::slurp(dir / "c" / "metrics.csv") &&
                      a == testsupport::slurp(dir / "d" / "metrics.csv");
    const auto rows = std::count(a.begin(), a.end(), '\n');
    std::filesystem::remove_all(dir);
    return {same, std::string(same ? "identical" : "DIFFERENT") + " metrics.csv (" + std::to_string(rows) +
                      " lines) over 2 runs, 1 vs 8 threads, manifest rerun"};
}

}  // namespace

int main() {
    const char* log = std::getenv("SWARM_LOG");
    spdlog::set_level(log ? spdlog::level::from_str(log) : spdlog::level::warn);
    criterion(1, "kernel admissibility", 1, kernel_admissibility);
    criterion(2, "KDE gradient vs finite differences", 5, gradient_vs_fd);
    criterion(3, "KDE consistency trend", 60, consistency_check);
    criterion(4, "grid KDE vs brute force", 10, grid_vs_brute);
    criterion(5, "heat eigenmode decay", 10, heat_eigenmode);
    criterion(6, "continuity-to-heat transformation", 30, transformation);
    criterion(7, "Lyapunov monotonicity", 30, lyapunov_monotone);
    criterion(8, "nonzero-mean error bias", 10, nonzero_mean_bias);
    criterion(9, "bimodal image reproduction", 600, bimodal_reproduction);
    criterion(10, "determinism", 120, determinism);
    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
