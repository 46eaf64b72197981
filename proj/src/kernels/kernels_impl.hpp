#pragma once

#include <cstddef>

// Per-backend entry points behind the public dispatch layer. Each backend
// implements the identical contract; see kernels.hpp for semantics.

namespace drumsim::kernels::scalar {
void diff_rectify(const double* a, const double* b, double gain, double* out, std::size_t n);
void square(const double* x, double* out, std::size_t n);
void axpy(double s, const double* x, double* y, std::size_t n);
void abs_diff(double value, const double* b, double* out, std::size_t n);
void add_shifted_min(const double* cost, const double* prev, double* out, std::size_t n);
double sum(const double* x, std::size_t n);
double max_value(const double* x, std::size_t n);
} // namespace drumsim::kernels::scalar

#if defined(__x86_64__) || defined(_M_X64)
#define DRUMSIM_HAVE_AVX2_BACKEND 1
namespace drumsim::kernels::avx2 {
void diff_rectify(const double* a, const double* b, double gain, double* out, std::size_t n);
void square(const double* x, double* out, std::size_t n);
void axpy(double s, const double* x, double* y, std::size_t n);
void abs_diff(double value, const double* b, double* out, std::size_t n);
void add_shifted_min(const double* cost, const double* prev, double* out, std::size_t n);
double sum(const double* x, std::size_t n);
double max_value(const double* x, std::size_t n);
} // namespace drumsim::kernels::avx2
#else
#define DRUMSIM_HAVE_AVX2_BACKEND 0
#endif

#if defined(__aarch64__) || defined(__ARM_NEON)
#define DRUMSIM_HAVE_NEON_BACKEND 1
namespace drumsim::kernels::neon {
void diff_rectify(const double* a, const double* b, double gain, double* out, std::size_t n);
void square(const double* x, double* out, std::size_t n);
void axpy(double s, const double* x, double* y, std::size_t n);
void abs_diff(double value, const double* b, double* out, std::size_t n);
void add_shifted_min(const double* cost, const double* prev, double* out, std::size_t n);
double sum(const double* x, std::size_t n);
double max_value(const double* x, std::size_t n);
} // namespace drumsim::kernels::neon
#else
#define DRUMSIM_HAVE_NEON_BACKEND 0
#endif
