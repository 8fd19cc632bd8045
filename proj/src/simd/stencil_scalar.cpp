#include "swarmheat/simd/kernels.hpp"

namespace swarmheat::simd {

void heat_row_scalar(const double* below, const double* row, const double* above, double* out,
                     std::size_t n, double cx, double cy) {
    for (std::size_t i = 0; i < n; ++i) {
        const double c = row[i];
        const double l = i > 0 ? row[i - 1] : c;
        const double r = i + 1 < n ? row[i + 1] : c;
        const double lap_x = (l + r) - (c + c);
        const double lap_y = (below[i] + above[i]) - (c + c);
        out[i] = c + (cx * lap_x + cy * lap_y);
    }
}

}  // namespace swarmheat::simd
