#include <immintrin.h>

#include <cmath>

#include "swarmheat/simd/kernels.hpp"

namespace swarmheat::simd {

namespace {

// exp(x) for x <= 0: Cody-Waite reduction to |r| <= ln2/2, degree-13 Taylor
// polynomial, exponent reassembled from the integer part. Below -708 the input
// is clamped (result ~1e-308 instead of a denormal or zero).
inline __m256d exp_nonpositive(__m256d x) {
    x = _mm256_max_pd(x, _mm256_set1_pd(-708.0));
    const __m256d k = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(1.4426950408889634)),
                                      _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(k, _mm256_set1_pd(6.93145751953125e-1), x);
    r = _mm256_fnmadd_pd(k, _mm256_set1_pd(1.42860682030941723212e-6), r);

    static constexpr double inv_fact[] = {
        1.0 / 6227020800.0, 1.0 / 479001600.0, 1.0 / 39916800.0, 1.0 / 3628800.0,
        1.0 / 362880.0,     1.0 / 40320.0,     1.0 / 5040.0,     1.0 / 720.0,
        1.0 / 120.0,        1.0 / 24.0,        1.0 / 6.0,        1.0 / 2.0,
        1.0,                1.0};
    __m256d poly = _mm256_set1_pd(inv_fact[0]);
    for (int i = 1; i < 14; ++i) poly = _mm256_fmadd_pd(poly, r, _mm256_set1_pd(inv_fact[i]));

    const __m256d magic = _mm256_set1_pd(6755399441055744.0);  // 1.5 * 2^52
    __m256i ki = _mm256_sub_epi64(_mm256_castpd_si256(_mm256_add_pd(k, magic)),
                                  _mm256_castpd_si256(magic));
    const __m256i bits = _mm256_slli_epi64(_mm256_add_epi64(ki, _mm256_set1_epi64x(1023)), 52);
    return _mm256_mul_pd(poly, _mm256_castsi256_pd(bits));
}

inline double hsum(__m256d v) {
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, v);
    return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

}  // namespace

KernelSums kde_sum_avx2(const KernelParams& p, double qx, double qy, double inv_h,
                        const double* xs, const double* ys, std::size_t n) {
    const bool gaussian = p.kind == KernelKind::gaussian;
    const double support2 = gaussian ? p.cutoff2 : (p.cutoff2 < 1.0 ? p.cutoff2 : 1.0);

    const __m256d vqx = _mm256_set1_pd(qx);
    const __m256d vqy = _mm256_set1_pd(qy);
    const __m256d vinv = _mm256_set1_pd(inv_h);
    const __m256d vsupport = _mm256_set1_pd(support2);
    const __m256d vnorm = _mm256_set1_pd(p.norm);
    const __m256d vneg_a = _mm256_set1_pd(-p.exponent);
    const __m256d vgrad = _mm256_set1_pd(gaussian ? -2.0 * p.exponent : -2.0 * p.norm);
    const __m256d one = _mm256_set1_pd(1.0);

    __m256d acc_v = _mm256_setzero_pd();
    __m256d acc_x = _mm256_setzero_pd();
    __m256d acc_y = _mm256_setzero_pd();

    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
        const __m256d ux = _mm256_mul_pd(_mm256_sub_pd(vqx, _mm256_loadu_pd(xs + j)), vinv);
        const __m256d uy = _mm256_mul_pd(_mm256_sub_pd(vqy, _mm256_loadu_pd(ys + j)), vinv);
        const __m256d r2 = _mm256_add_pd(_mm256_mul_pd(ux, ux), _mm256_mul_pd(uy, uy));
        const __m256d inside = _mm256_cmp_pd(r2, vsupport, _CMP_LE_OQ);
        if (_mm256_movemask_pd(inside) == 0) continue;
        __m256d k;
        __m256d g;
        if (gaussian) {
            k = _mm256_mul_pd(vnorm, exp_nonpositive(_mm256_mul_pd(vneg_a, r2)));
            g = _mm256_mul_pd(vgrad, k);
        } else {
            k = _mm256_mul_pd(vnorm, _mm256_sub_pd(one, r2));
            g = vgrad;
        }
        k = _mm256_and_pd(k, inside);
        g = _mm256_and_pd(g, inside);
        acc_v = _mm256_add_pd(acc_v, k);
        acc_x = _mm256_add_pd(acc_x, _mm256_mul_pd(g, ux));
        acc_y = _mm256_add_pd(acc_y, _mm256_mul_pd(g, uy));
    }

    KernelSums s{hsum(acc_v), hsum(acc_x), hsum(acc_y)};
    if (j < n) {
        const KernelSums tail = kde_sum_scalar(p, qx, qy, inv_h, xs + j, ys + j, n - j);
        s.value += tail.value;
        s.gx += tail.gx;
        s.gy += tail.gy;
    }
    return s;
}

}  // namespace swarmheat::simd
