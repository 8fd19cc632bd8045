#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "swarmheat/geometry.hpp"
#include "swarmheat/kernels.hpp"

namespace swarmheat {

/// Agent positions and the simulation clock.
struct SwarmState {
    std::vector<Vec2> positions;
    double t = 0.0;

    std::size_t size() const { return positions.size(); }
};

/// Kernel density estimate and its spatial gradient at one point.
struct DensityEstimate {
    double value = 0.0;
    Vec2 gradient{};
};

enum class KdeMethod { brute, grid };

/// Uniform bucket grid over the bounding box of a point set. Buckets are stored
/// contiguously in ascending cell index, agents within a bucket in ascending
/// agent index, with coordinates copied alongside for vectorized sums.
class NeighborGrid {
public:
    NeighborGrid() = default;
    NeighborGrid(std::span<const Vec2> positions, double radius);

    double radius() const { return radius_; }
    double cell_size() const { return cell_; }
    std::size_t cells_x() const { return nx_; }
    std::size_t cells_y() const { return ny_; }
    std::size_t bucket_count() const { return nx_ * ny_; }
    std::size_t occupied_buckets() const;

    std::span<const std::uint32_t> bucket(std::size_t b) const {
        return {agents_.data() + start_[b], start_[b + 1] - start_[b]};
    }
    std::span<const double> bucket_xs(std::size_t b) const {
        return {xs_.data() + start_[b], start_[b + 1] - start_[b]};
    }
    std::span<const double> bucket_ys(std::size_t b) const {
        return {ys_.data() + start_[b], start_[b + 1] - start_[b]};
    }

    /// Calls fn(bucket) for every nonempty bucket that can hold a point within
    /// `reach` of p, in ascending bucket order.
    template <class F>
    void for_each_nearby_bucket(Vec2 p, double reach, F&& fn) const {
        if (nx_ == 0) return;
        long lo_x, hi_x, lo_y, hi_y;
        cell_range(p, reach, lo_x, hi_x, lo_y, hi_y);
        for (long cy = lo_y; cy <= hi_y; ++cy)
            for (long cx = lo_x; cx <= hi_x; ++cx) {
                const std::size_t b = static_cast<std::size_t>(cy) * nx_ + static_cast<std::size_t>(cx);
                if (start_[b + 1] > start_[b]) fn(b);
            }
    }

    /// Indices of all points within distance `r` of p (inclusive), ascending.
    std::vector<std::size_t> query(Vec2 p, double r) const;

private:
    void cell_range(Vec2 p, double reach, long& lo_x, long& hi_x, long& lo_y, long& hi_y) const;

    double radius_ = 0.0;
    double cell_ = 0.0;
    Vec2 origin_{};
    std::size_t nx_ = 0;
    std::size_t ny_ = 0;
    std::vector<std::size_t> start_;  // bucket_count() + 1 offsets
    std::vector<std::uint32_t> agents_;
    std::vector<double> xs_;
    std::vector<double> ys_;
};

NeighborGrid build_neighbor_grid(const SwarmState& s, double radius);

/// Evaluates f_hat(x) = 1/(N h^2) sum_j K((x - r_j)/h) and its gradient for a
/// frozen set of agent positions. Immutable after construction; concurrent
/// queries are safe.
class DensityEstimator {
public:
    DensityEstimator(std::span<const Vec2> positions, Kernel kernel, double h);

    std::size_t agent_count() const { return xs_.size(); }
    double bandwidth() const { return h_; }
    const Kernel& kernel() const { return kernel_; }
    const NeighborGrid& grid() const { return grid_; }

    DensityEstimate at(Vec2 x, KdeMethod method = KdeMethod::grid) const;

    /// Estimates at every agent position (grid method), split across `threads`
    /// workers. Results do not depend on the worker count.
    std::vector<DensityEstimate> at_agents(unsigned threads = 1) const;

    /// Estimates at arbitrary points (grid method).
    std::vector<DensityEstimate> at_points(std::span<const Vec2> points, unsigned threads = 1) const;

private:
    Kernel kernel_;
    double h_;
    double value_scale_;
    double gradient_scale_;
    std::vector<double> xs_;
    std::vector<double> ys_;
    NeighborGrid grid_;
    bool use_grid_ = false;
};

DensityEstimate estimate_density(const SwarmState& s, const Kernel& k, double h, Vec2 x,
                                 KdeMethod method = KdeMethod::grid);

std::vector<DensityEstimate> estimate_all_agents(const SwarmState& s, const Kernel& k, double h,
                                                 unsigned threads = 1);

}  // namespace swarmheat
