#include "swarmheat/kde_checks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "swarmheat/simulator.hpp"

namespace swarmheat {

std::vector<Kernel> shipped_kernels() {
    return {Kernel::gaussian(2), Kernel::gaussian(2, std::numeric_limits<double>::infinity()),
            Kernel::gaussian(1, std::numeric_limits<double>::infinity(), 1.0), Kernel::epanechnikov(2),
            Kernel::epanechnikov(1)};
}

namespace {

std::vector<Vec2> uniform_points(std::mt19937_64& rng, std::size_t n, const Domain& d) {
    std::vector<Vec2> out(n);
    for (auto& p : out)
        p = {d.lower.x + d.length_x * uniform01(rng), d.lower.y + d.length_y * uniform01(rng)};
    return out;
}

Vec2 standard_normal_pair(std::mt19937_64& rng) {
    double u1 = uniform01(rng);
    while (u1 <= 0.0) u1 = uniform01(rng);
    const double u2 = uniform01(rng);
    const double r = std::sqrt(-2.0 * std::log(u1));
    return {r * std::cos(2.0 * std::numbers::pi * u2), r * std::sin(2.0 * std::numbers::pi * u2)};
}

// Correlated bivariate Gaussian used as the known density.
constexpr double kSx = 1.0, kSy = 0.6, kRho = 0.3;

Vec2 sample_reference(std::mt19937_64& rng) {
    const Vec2 z = standard_normal_pair(rng);
    return {kSx * z.x, kSy * (kRho * z.x + std::sqrt(1.0 - kRho * kRho) * z.y)};
}

double reference_density(Vec2 p) {
    const double a = p.x / kSx, b = p.y / kSy;
    const double q = (a * a - 2.0 * kRho * a * b + b * b) / (1.0 - kRho * kRho);
    return std::exp(-0.5 * q) / (2.0 * std::numbers::pi * kSx * kSy * std::sqrt(1.0 - kRho * kRho));
}

}  // namespace

GradientCheckReport gradient_fd_check(const Kernel& k, std::size_t n_agents, double h,
                                      std::size_t probes, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const Domain dom = Domain::unit_square();
    const auto agents = uniform_points(rng, n_agents, dom);
    const DensityEstimator est(agents, k, h);
    const double delta = 1e-4 * h;
    const double cut = k.has_finite_cutoff() ? k.cutoff_radius() * h
                       : k.kind() == KernelKind::epanechnikov ? h
                                                              : -1.0;

    GradientCheckReport rep;
    while (rep.probes < probes) {
        const Vec2 x = uniform_points(rng, 1, dom).front();
        if (cut > 0.0) {
            // The kernel has a kink or jump on the circle |x - r_j| = cut.
            const bool near = std::any_of(agents.begin(), agents.end(), [&](Vec2 a) {
                return std::abs(norm(x - a) - cut) < 10.0 * delta;
            });
            if (near) {
                ++rep.redrawn;
                continue;
            }
        }
        const DensityEstimate e = est.at(x, KdeMethod::brute);
        const double fx = (est.at(x + Vec2{delta, 0.0}, KdeMethod::brute).value -
                           est.at(x - Vec2{delta, 0.0}, KdeMethod::brute).value) / (2.0 * delta);
        const double fy = (est.at(x + Vec2{0.0, delta}, KdeMethod::brute).value -
                           est.at(x - Vec2{0.0, delta}, KdeMethod::brute).value) / (2.0 * delta);
        const double scale = std::max(norm(e.gradient), 1e-2 * e.value / h);
        if (scale > 0.0)
            rep.max_relative_error =
                std::max(rep.max_relative_error, norm(e.gradient - Vec2{fx, fy}) / scale);
        ++rep.probes;
    }
    return rep;
}

ConsistencyReport consistency_trend(const Kernel& k, const std::vector<std::size_t>& sizes,
                                    std::size_t probes, const std::vector<std::uint64_t>& seeds,
                                    unsigned threads) {
    ConsistencyReport rep;
    rep.sizes = sizes;
    rep.mean_abs_error.assign(sizes.size(), 0.0);
    for (const std::uint64_t seed : seeds) {
        std::mt19937_64 probe_rng(seed ^ 0x9e3779b97f4a7c15ULL);
        std::vector<Vec2> pts(probes);
        for (auto& p : pts) p = sample_reference(probe_rng);
        for (std::size_t i = 0; i < sizes.size(); ++i) {
            std::mt19937_64 rng(seed * 1000003ULL + sizes[i]);
            std::vector<Vec2> agents(sizes[i]);
            for (auto& a : agents) a = sample_reference(rng);
            const double h = select_bandwidth(BandwidthPolicy::rule_of_thumb(sample_sigma(agents)),
                                              agents.size(), 2, k.order());
            const DensityEstimator est(agents, k, h);
            const auto values = est.at_points(pts, threads);
            double mae = 0.0;
            for (std::size_t p = 0; p < pts.size(); ++p)
                mae += std::abs(values[p].value - reference_density(pts[p]));
            rep.mean_abs_error[i] += mae / static_cast<double>(pts.size()) / static_cast<double>(seeds.size());
        }
    }
    rep.strictly_decreasing = true;
    for (std::size_t i = 1; i < sizes.size(); ++i)
        if (!(rep.mean_abs_error[i] < rep.mean_abs_error[i - 1])) rep.strictly_decreasing = false;
    return rep;
}

double truncation_bound(const Kernel& truncated, double f_truncated, double h) {
    const double c = truncated.cutoff_radius();
    const Kernel full = Kernel::gaussian(2, std::numeric_limits<double>::infinity());
    const double a = full.params().exponent;
    const double tau = std::exp(-a * c * c);
    return tau * (f_truncated + full.eval(Vec2{0.0, 0.0}) / (h * h));
}

GridAgreementReport grid_agreement_check(std::size_t n_agents, double h, std::size_t probes,
                                         std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const Domain dom = Domain::unit_square();
    const auto agents = uniform_points(rng, n_agents, dom);
    const Kernel k = Kernel::gaussian(2);
    const DensityEstimator est(agents, k, h);
    const DensityEstimator exact(agents, Kernel::gaussian(2, std::numeric_limits<double>::infinity()), h);

    GridAgreementReport rep;
    const Domain wide{{-0.1, -0.1}, 1.2, 1.2};
    for (std::size_t p = 0; p < probes; ++p) {
        const Vec2 x = uniform_points(rng, 1, wide).front();
        const DensityEstimate g = est.at(x, KdeMethod::grid);
        const DensityEstimate b = est.at(x, KdeMethod::brute);
        const double scale = std::max(b.value, k.eval(Vec2{0.0, 0.0}) / (h * h) * 1e-3);
        rep.max_same_kernel_error = std::max(rep.max_same_kernel_error, std::abs(g.value - b.value) / scale);
        const double u = exact.at(x, KdeMethod::brute).value;
        rep.max_bound_ratio = std::max(rep.max_bound_ratio, std::abs(g.value - u) / truncation_bound(k, g.value, h));

        const double r = k.cutoff_radius() * h;
        std::vector<std::size_t> filtered;
        for (std::size_t j = 0; j < agents.size(); ++j)
            if (norm2(agents[j] - x) <= r * r) filtered.push_back(j);
        if (est.grid().query(x, r) != filtered) ++rep.query_mismatches;
        ++rep.probes;
    }
    return rep;
}

}  // namespace swarmheat
