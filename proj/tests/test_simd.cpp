#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "swarmheat/kde.hpp"
#include "swarmheat/pde_oracle.hpp"
#include "swarmheat/simd/dispatch.hpp"
#include "swarmheat/simd/kernels.hpp"

using namespace swarmheat;
namespace sd = swarmheat::simd;

namespace {

struct LevelGuard {
    sd::SimdLevel saved = sd::active_level();
    ~LevelGuard() { sd::set_active_level(saved); }
};

}  // namespace

TEST_CASE("level parsing") {
    CHECK(sd::parse_level("scalar") == sd::SimdLevel::scalar);
    CHECK(sd::parse_level("auto") == sd::detected_level());
    CHECK_THROWS(sd::parse_level("sse9"));
    CHECK(sd::level_available(sd::SimdLevel::scalar));
}

TEST_CASE("vector KDE sums match the scalar reference") {
    if (!sd::level_available(sd::SimdLevel::avx2)) {
        MESSAGE("AVX2 not available on this machine; skipping");
        return;
    }
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    const Kernel kernels[] = {Kernel::gaussian(), Kernel::gaussian(2, std::numeric_limits<double>::infinity()),
                              Kernel::epanechnikov(2)};
    for (const Kernel& k : kernels) {
        for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 17u, 256u}) {
            std::vector<double> xs(n), ys(n);
            for (std::size_t i = 0; i < n; ++i) xs[i] = u(rng), ys[i] = u(rng);
            for (int q = 0; q < 20; ++q) {
                const double qx = u(rng), qy = u(rng), inv_h = 1.0 / 1.3;
                const auto a = sd::kde_sum_scalar(k.params(), qx, qy, inv_h, xs.data(), ys.data(), n);
                const auto b = sd::kde_sum_avx2(k.params(), qx, qy, inv_h, xs.data(), ys.data(), n);
                const double scale = std::max(a.value, 1e-300) + 1e-14 * k.params().norm;
                CHECK(std::abs(a.value - b.value) <= 1e-13 * scale);
                CHECK(std::abs(a.gx - b.gx) <= 1e-13 * 8.0 * scale);
                CHECK(std::abs(a.gy - b.gy) <= 1e-13 * 8.0 * scale);
            }
        }
    }
}

TEST_CASE("vector heat rows are bit-identical to the scalar reference") {
    if (!sd::level_available(sd::SimdLevel::avx2)) {
        MESSAGE("AVX2 not available on this machine; skipping");
        return;
    }
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (std::size_t n : {1u, 2u, 5u, 6u, 7u, 8u, 9u, 64u, 131u}) {
        std::vector<double> lo(n), mid(n), hi(n), a(n), b(n);
        for (std::size_t i = 0; i < n; ++i) lo[i] = u(rng), mid[i] = u(rng), hi[i] = u(rng);
        sd::heat_row_scalar(lo.data(), mid.data(), hi.data(), a.data(), n, 0.11, 0.07);
        sd::heat_row_avx2(lo.data(), mid.data(), hi.data(), b.data(), n, 0.11, 0.07);
        for (std::size_t i = 0; i < n; ++i) CHECK(a[i] == b[i]);
    }
}

TEST_CASE("dispatched paths agree end to end") {
    if (!sd::level_available(sd::SimdLevel::avx2)) {
        MESSAGE("AVX2 not available on this machine; skipping");
        return;
    }
    LevelGuard guard;
    const ScalarField phi = random_smooth_field(Domain::unit_square(), 48, 2, 0.0);
    const GridSolverConfig cfg = GridSolverConfig::stable(phi, 5.0);
    sd::set_active_level(sd::SimdLevel::scalar);
    const ScalarField a = heat_step(phi, cfg);
    std::mt19937_64 rng(2);
    std::vector<Vec2> agents(2000);
    for (auto& p : agents) p = {static_cast<double>(rng() % 100000) / 1e5, static_cast<double>(rng() % 100000) / 1e5};
    const auto ea = DensityEstimator(agents, Kernel::gaussian(), 0.05).at_agents();
    sd::set_active_level(sd::SimdLevel::avx2);
    const ScalarField b = heat_step(phi, cfg);
    const auto eb = DensityEstimator(agents, Kernel::gaussian(), 0.05).at_agents();
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(a.samples()[k] == b.samples()[k]);
    for (std::size_t i = 0; i < agents.size(); ++i)
        CHECK(std::abs(ea[i].value - eb[i].value) <= 1e-13 * ea[i].value);
}
