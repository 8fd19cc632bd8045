#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "swarmheat/kde.hpp"

namespace swarmheat {

NeighborGrid::NeighborGrid(std::span<const Vec2> positions, double radius) : radius_(radius) {
    if (!(radius > 0.0) || !std::isfinite(radius))
        throw std::invalid_argument("neighbor grid radius must be positive and finite");
    if (positions.size() > std::numeric_limits<std::uint32_t>::max())
        throw std::invalid_argument("too many agents for the neighbor grid");
    // Slightly wider than the radius so rounding at cell edges cannot push a
    // neighbour two cells away.
    cell_ = radius * (1.0 + 1e-9);
    if (positions.empty()) {
        start_.assign(1, 0);
        return;
    }
    Vec2 lo = positions.front(), hi = positions.front();
    for (const Vec2& p : positions) {
        if (!is_finite(p)) throw std::invalid_argument("non-finite agent position");
        lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
        hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
    }
    origin_ = lo;
    const double max_cells = 4.0 * static_cast<double>(positions.size()) + 16.0;
    auto cells_for = [&](double c) {
        return std::floor((hi.x - lo.x) / c + 1.0) * std::floor((hi.y - lo.y) / c + 1.0);
    };
    while (cells_for(cell_) > max_cells) cell_ *= 2.0;
    nx_ = static_cast<std::size_t>((hi.x - lo.x) / cell_) + 1;
    ny_ = static_cast<std::size_t>((hi.y - lo.y) / cell_) + 1;

    const std::size_t n = positions.size();
    std::vector<std::size_t> cell_of(n);
    start_.assign(nx_ * ny_ + 1, 0);
    for (std::size_t a = 0; a < n; ++a) {
        const auto cx = std::min(nx_ - 1, static_cast<std::size_t>((positions[a].x - lo.x) / cell_));
        const auto cy = std::min(ny_ - 1, static_cast<std::size_t>((positions[a].y - lo.y) / cell_));
        cell_of[a] = cy * nx_ + cx;
        ++start_[cell_of[a] + 1];
    }
    for (std::size_t b = 0; b < nx_ * ny_; ++b) start_[b + 1] += start_[b];
    // Counting sort; stable, so agents stay in ascending order within a bucket.
    std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
    agents_.resize(n);
    xs_.resize(n);
    ys_.resize(n);
    for (std::size_t a = 0; a < n; ++a) {
        const std::size_t slot = fill[cell_of[a]]++;
        agents_[slot] = static_cast<std::uint32_t>(a);
        xs_[slot] = positions[a].x;
        ys_[slot] = positions[a].y;
    }
}

std::size_t NeighborGrid::occupied_buckets() const {
    std::size_t count = 0;
    for (std::size_t b = 0; b < bucket_count(); ++b) count += start_[b + 1] > start_[b];
    return count;
}

void NeighborGrid::cell_range(Vec2 p, double reach, long& lo_x, long& hi_x, long& lo_y,
                              long& hi_y) const {
    const long span = std::max(1L, static_cast<long>(std::ceil(reach / cell_)));
    auto axis = [&](double coord, double origin, std::size_t n, long& lo, long& hi) {
        const double c = std::floor((coord - origin) / cell_);
        // Clamp in floating point first so far-away queries cannot overflow.
        const double limit = static_cast<double>(n) + static_cast<double>(span) + 1.0;
        const long center = static_cast<long>(std::clamp(c, -limit, limit));
        lo = std::max(0L, center - span);
        hi = std::min(static_cast<long>(n) - 1, center + span);
    };
    axis(p.x, origin_.x, nx_, lo_x, hi_x);
    axis(p.y, origin_.y, ny_, lo_y, hi_y);
}

std::vector<std::size_t> NeighborGrid::query(Vec2 p, double r) const {
    std::vector<std::size_t> out;
    const double r2 = r * r;
    for_each_nearby_bucket(p, r, [&](std::size_t b) {
        const auto ids = bucket(b);
        const auto xs = bucket_xs(b);
        const auto ys = bucket_ys(b);
        for (std::size_t k = 0; k < ids.size(); ++k) {
            const double dx = xs[k] - p.x;
            const double dy = ys[k] - p.y;
            if (dx * dx + dy * dy <= r2) out.push_back(ids[k]);
        }
    });
    std::sort(out.begin(), out.end());
    return out;
}

NeighborGrid build_neighbor_grid(const SwarmState& s, double radius) {
    return NeighborGrid(s.positions, radius);
}

}  // namespace swarmheat
