#include "swarmheat/kde.hpp"

#include <cmath>
#include <stdexcept>

#include "swarmheat/parallel.hpp"
#include "swarmheat/simd/kernels.hpp"

namespace swarmheat {

DensityEstimator::DensityEstimator(std::span<const Vec2> positions, Kernel kernel, double h)
    : kernel_(std::move(kernel)), h_(h) {
    if (positions.empty()) throw std::invalid_argument("density estimate of an empty swarm");
    if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("bandwidth h must be positive");
    if (kernel_.dimension() != 2) throw std::invalid_argument("swarm density estimation needs a 2-D kernel");
    const double n = static_cast<double>(positions.size());
    value_scale_ = 1.0 / (n * h * h);
    gradient_scale_ = 1.0 / (n * h * h * h);
    xs_.reserve(positions.size());
    ys_.reserve(positions.size());
    for (const Vec2& p : positions) {
        xs_.push_back(p.x);
        ys_.push_back(p.y);
    }
    use_grid_ = kernel_.has_finite_cutoff();
    if (use_grid_) grid_ = NeighborGrid(positions, kernel_.cutoff_radius() * h);
}

DensityEstimate DensityEstimator::at(Vec2 x, KdeMethod method) const {
    const KernelParams params = kernel_.params();
    const simd::KdeSumFn sum = simd::kde_sum();
    const double inv_h = 1.0 / h_;
    simd::KernelSums total;
    if (method == KdeMethod::brute || !use_grid_) {
        total = sum(params, x.x, x.y, inv_h, xs_.data(), ys_.data(), xs_.size());
    } else {
        grid_.for_each_nearby_bucket(x, grid_.radius(), [&](std::size_t b) {
            const auto bx = grid_.bucket_xs(b);
            const auto by = grid_.bucket_ys(b);
            const simd::KernelSums part = sum(params, x.x, x.y, inv_h, bx.data(), by.data(), bx.size());
            total.value += part.value;
            total.gx += part.gx;
            total.gy += part.gy;
        });
    }
    return {total.value * value_scale_, {total.gx * gradient_scale_, total.gy * gradient_scale_}};
}

std::vector<DensityEstimate> DensityEstimator::at_points(std::span<const Vec2> points,
                                                         unsigned threads) const {
    std::vector<DensityEstimate> out(points.size());
    parallel_for(points.size(), threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) out[i] = at(points[i]);
    });
    return out;
}

std::vector<DensityEstimate> DensityEstimator::at_agents(unsigned threads) const {
    std::vector<DensityEstimate> out(xs_.size());
    parallel_for(xs_.size(), threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) out[i] = at({xs_[i], ys_[i]});
    });
    return out;
}

DensityEstimate estimate_density(const SwarmState& s, const Kernel& k, double h, Vec2 x,
                                 KdeMethod method) {
    return DensityEstimator(s.positions, k, h).at(x, method);
}

std::vector<DensityEstimate> estimate_all_agents(const SwarmState& s, const Kernel& k, double h,
                                                 unsigned threads) {
    return DensityEstimator(s.positions, k, h).at_agents(threads);
}

}  // namespace swarmheat
