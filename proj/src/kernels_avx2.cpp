// AVX2+FMA kernel variants. This translation unit is compiled with
// -mavx2 -mfma; callers must check avx2::available() before entering.

#if defined(__x86_64__) || defined(_M_X64)

#include "divopt/kernels.hpp"

#include <immintrin.h>

namespace divopt::kernels::avx2 {

bool available() {
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

} // namespace

double dot(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 8 <= n; k += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k + 4), _mm256_loadu_pd(b + k + 4), acc1);
    }
    for (; k + 4 <= n; k += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k), acc0);
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; k < n; ++k) s += a[k] * b[k];
    return s;
}

double dot_rev(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t k = 0;
    // b is consumed back-to-front: lane-reverse each backward load.
    for (; k + 8 <= n; k += 8) {
        __m256d vb0 = _mm256_loadu_pd(b + n - 4 - k);
        __m256d vb1 = _mm256_loadu_pd(b + n - 8 - k);
        vb0 = _mm256_permute4x64_pd(vb0, _MM_SHUFFLE(0, 1, 2, 3));
        vb1 = _mm256_permute4x64_pd(vb1, _MM_SHUFFLE(0, 1, 2, 3));
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k), vb0, acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k + 4), vb1, acc1);
    }
    for (; k + 4 <= n; k += 4) {
        __m256d vb = _mm256_loadu_pd(b + n - 4 - k);
        vb = _mm256_permute4x64_pd(vb, _MM_SHUFFLE(0, 1, 2, 3));
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k), vb, acc0);
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; k < n; ++k) s += a[k] * b[n - 1 - k];
    return s;
}

void scale(double* dst, const double* src, double s, std::size_t n) {
    const __m256d vs = _mm256_set1_pd(s);
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4)
        _mm256_storeu_pd(dst + k, _mm256_mul_pd(vs, _mm256_loadu_pd(src + k)));
    for (; k < n; ++k) dst[k] = s * src[k];
}

} // namespace divopt::kernels::avx2

#endif // x86-64
