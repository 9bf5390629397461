#pragma once

#include <cstddef>

// Data-parallel inner loops used by the solvers. Every kernel has a scalar
// reference implementation and, on x86-64, an AVX2+FMA variant. The dispatched
// entry points pick the widest ISA the running CPU supports; tests compare the
// variants against the scalar reference on random inputs.
namespace divopt::kernels {

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
// sum_{k<n} a[k] * b[n-1-k]  (correlation inner product; b walked backward)
double dot_rev(const double* a, const double* b, std::size_t n);
void scale(double* dst, const double* src, double s, std::size_t n);
} // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
bool available();
double dot(const double* a, const double* b, std::size_t n);
double dot_rev(const double* a, const double* b, std::size_t n);
void scale(double* dst, const double* src, double s, std::size_t n);
} // namespace avx2
#endif

// Dispatched entry points.
double dot(const double* a, const double* b, std::size_t n);
double dot_rev(const double* a, const double* b, std::size_t n);
void scale(double* dst, const double* src, double s, std::size_t n);

// Name of the ISA the dispatcher selected ("avx2" or "scalar").
const char* active_isa();

// Test hook: force the scalar path regardless of CPU support.
void force_scalar(bool on);

} // namespace divopt::kernels
