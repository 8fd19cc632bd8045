#pragma once

#include <cstddef>

#include "swarmheat/kernels.hpp"

namespace swarmheat::simd {

/// Sum over j of K(u_j) and grad K(u_j), u_j = (q - r_j) * inv_h.
struct KernelSums {
    double value = 0.0;
    double gx = 0.0;
    double gy = 0.0;
};

using KdeSumFn = KernelSums (*)(const KernelParams&, double qx, double qy, double inv_h,
                                const double* xs, const double* ys, std::size_t n);

KernelSums kde_sum_scalar(const KernelParams& p, double qx, double qy, double inv_h,
                          const double* xs, const double* ys, std::size_t n);
#if SWARMHEAT_WITH_AVX2
KernelSums kde_sum_avx2(const KernelParams& p, double qx, double qy, double inv_h,
                        const double* xs, const double* ys, std::size_t n);
#endif

/// One explicit heat update of a grid row:
///   out = c + (cx * ((l + r) - 2c) + cy * ((d + u) - 2c))
/// with mirrored ghosts at the row ends. `below`/`above` are the neighbouring rows
/// (the row itself at a wall). Every variant rounds identically.
using HeatRowFn = void (*)(const double* below, const double* row, const double* above,
                           double* out, std::size_t n, double cx, double cy);

void heat_row_scalar(const double* below, const double* row, const double* above, double* out,
                     std::size_t n, double cx, double cy);
#if SWARMHEAT_WITH_AVX2
void heat_row_avx2(const double* below, const double* row, const double* above, double* out,
                   std::size_t n, double cx, double cy);
#endif

/// Implementations for the active level.
KdeSumFn kde_sum();
HeatRowFn heat_row();

}  // namespace swarmheat::simd
