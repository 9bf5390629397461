#include "divopt/kernels.hpp"

#include <atomic>

namespace divopt::kernels {

namespace scalar {

double dot(const double* a, const double* b, std::size_t n) {
    double s0 = 0.0, s1 = 0.0;
    std::size_t k = 0;
    for (; k + 2 <= n; k += 2) {
        s0 += a[k] * b[k];
        s1 += a[k + 1] * b[k + 1];
    }
    if (k < n) s0 += a[k] * b[k];
    return s0 + s1;
}

double dot_rev(const double* a, const double* b, std::size_t n) {
    double s0 = 0.0, s1 = 0.0;
    const double* br = b + n - 1;
    std::size_t k = 0;
    for (; k + 2 <= n; k += 2) {
        s0 += a[k] * br[-(std::ptrdiff_t)k];
        s1 += a[k + 1] * br[-(std::ptrdiff_t)(k + 1)];
    }
    if (k < n) s0 += a[k] * br[-(std::ptrdiff_t)k];
    return s0 + s1;
}

void scale(double* dst, const double* src, double s, std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) dst[k] = s * src[k];
}

} // namespace scalar

namespace {

std::atomic<bool> g_force_scalar{false};

bool use_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
    static const bool ok = avx2::available();
    return ok && !g_force_scalar.load(std::memory_order_relaxed);
#else
    return false;
#endif
}

} // namespace

double dot(const double* a, const double* b, std::size_t n) {
#if defined(__x86_64__) || defined(_M_X64)
    if (use_avx2()) return avx2::dot(a, b, n);
#endif
    return scalar::dot(a, b, n);
}

double dot_rev(const double* a, const double* b, std::size_t n) {
#if defined(__x86_64__) || defined(_M_X64)
    if (use_avx2()) return avx2::dot_rev(a, b, n);
#endif
    return scalar::dot_rev(a, b, n);
}

void scale(double* dst, const double* src, double s, std::size_t n) {
#if defined(__x86_64__) || defined(_M_X64)
    if (use_avx2()) {
        avx2::scale(dst, src, s, n);
        return;
    }
#endif
    scalar::scale(dst, src, s, n);
}

const char* active_isa() { return use_avx2() ? "avx2" : "scalar"; }

void force_scalar(bool on) { g_force_scalar.store(on, std::memory_order_relaxed); }

} // namespace divopt::kernels
