#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace drumsim::kernels {

// Data-parallel inner loops used by the signal chain, envelope builder and
// DTW. Every kernel has a scalar reference implementation; AVX2 (x86-64) and
// NEON (aarch64) variants are selected at runtime when the CPU supports them.
//
// Element-wise kernels (diff_rectify, square, axpy, abs_diff,
// add_shifted_min) are bit-identical across backends: they perform the same
// per-element operation sequence and never use FMA. Reductions (sum) may
// differ from the scalar result in the last ulp because of lane reordering;
// max_value is exact.

enum class Backend { scalar, avx2, neon };

const char* backend_name(Backend b);

// Backend currently used by the dispatch table.
Backend active_backend();

// Backends usable on this machine (always contains scalar).
std::vector<Backend> available_backends();

// Force a specific backend (tests, benchmarks). Throws std::invalid_argument
// if the backend is not available on this CPU.
void force_backend(Backend b);

// Reset to automatic detection (best available backend).
void reset_backend();

// out[i] = |gain * (a[i] - b[i])|
void diff_rectify(const double* a, const double* b, double gain, double* out, std::size_t n);

// out[i] = x[i] * x[i]
void square(const double* x, double* out, std::size_t n);

// y[i] += s * x[i]
void axpy(double s, const double* x, double* y, std::size_t n);

// out[j] = |value - b[j]|
void abs_diff(double value, const double* b, double* out, std::size_t n);

// DTW row relaxation helper:
//   out[0] = cost[0] + prev[0]
//   out[j] = cost[j] + min(prev[j-1], prev[j])   for j >= 1
// The caller finishes the row with the sequential in-row dependency.
void add_shifted_min(const double* cost, const double* prev, double* out, std::size_t n);

double sum(const double* x, std::size_t n);

// Maximum element; 0 for an empty range.
double max_value(const double* x, std::size_t n);

} // namespace drumsim::kernels
