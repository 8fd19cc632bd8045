#include <immintrin.h>

#include "swarmheat/simd/kernels.hpp"

namespace swarmheat::simd {

void heat_row_avx2(const double* below, const double* row, const double* above, double* out,
                   std::size_t n, double cx, double cy) {
    if (n < 6) {
        heat_row_scalar(below, row, above, out, n, cx, cy);
        return;
    }
    {
        const double c = row[0];
        const double lap_x = (c + row[1]) - (c + c);
        const double lap_y = (below[0] + above[0]) - (c + c);
        out[0] = c + (cx * lap_x + cy * lap_y);
    }
    const __m256d vcx = _mm256_set1_pd(cx);
    const __m256d vcy = _mm256_set1_pd(cy);
    std::size_t i = 1;
    for (; i + 4 <= n - 1; i += 4) {
        const __m256d c = _mm256_loadu_pd(row + i);
        const __m256d l = _mm256_loadu_pd(row + i - 1);
        const __m256d r = _mm256_loadu_pd(row + i + 1);
        const __m256d d = _mm256_loadu_pd(below + i);
        const __m256d u = _mm256_loadu_pd(above + i);
        const __m256d c2 = _mm256_add_pd(c, c);
        const __m256d lap_x = _mm256_sub_pd(_mm256_add_pd(l, r), c2);
        const __m256d lap_y = _mm256_sub_pd(_mm256_add_pd(d, u), c2);
        const __m256d inc = _mm256_add_pd(_mm256_mul_pd(vcx, lap_x), _mm256_mul_pd(vcy, lap_y));
        _mm256_storeu_pd(out + i, _mm256_add_pd(c, inc));
    }
    for (; i < n; ++i) {
        const double c = row[i];
        const double l = row[i - 1];
        const double r = i + 1 < n ? row[i + 1] : c;
        const double lap_x = (l + r) - (c + c);
        const double lap_y = (below[i] + above[i]) - (c + c);
        out[i] = c + (cx * lap_x + cy * lap_y);
    }
}

}  // namespace swarmheat::simd
