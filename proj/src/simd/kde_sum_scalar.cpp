#include <cmath>

#include "swarmheat/simd/kernels.hpp"

namespace swarmheat::simd {

KernelSums kde_sum_scalar(const KernelParams& p, double qx, double qy, double inv_h,
                          const double* xs, const double* ys, std::size_t n) {
    KernelSums s;
    const bool gaussian = p.kind == KernelKind::gaussian;
    const double support2 = gaussian ? p.cutoff2 : (p.cutoff2 < 1.0 ? p.cutoff2 : 1.0);
    for (std::size_t j = 0; j < n; ++j) {
        const double ux = (qx - xs[j]) * inv_h;
        const double uy = (qy - ys[j]) * inv_h;
        const double r2 = ux * ux + uy * uy;
        if (!(r2 <= support2)) continue;
        double k = 0.0;
        double g = 0.0;
        if (gaussian) {
            k = p.norm * std::exp(-p.exponent * r2);
            g = (-2.0 * p.exponent) * k;
        } else {
            k = p.norm * (1.0 - r2);
            g = -2.0 * p.norm;
        }
        s.value += k;
        s.gx += g * ux;
        s.gy += g * uy;
    }
    return s;
}

}  // namespace swarmheat::simd
