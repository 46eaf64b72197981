#include "kernels_impl.hpp"

#include <algorithm>
#include <cmath>

// Scalar reference kernels. These define the semantics the SIMD variants are
// equivalence-tested against.

namespace drumsim::kernels::scalar {

void diff_rectify(const double* a, const double* b, double gain, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = std::abs(gain * (a[i] - b[i]));
  }
}

void square(const double* x, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = x[i] * x[i];
  }
}

void axpy(double s, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = y[i] + s * x[i];
  }
}

void abs_diff(double value, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = std::abs(value - b[i]);
  }
}

void add_shifted_min(const double* cost, const double* prev, double* out, std::size_t n) {
  if (n == 0) return;
  out[0] = cost[0] + prev[0];
  for (std::size_t j = 1; j < n; ++j) {
    out[j] = cost[j] + std::min(prev[j - 1], prev[j]);
  }
}

double sum(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i];
  return acc;
}

double max_value(const double* x, std::size_t n) {
  if (n == 0) return 0.0;
  double m = x[0];
  for (std::size_t i = 1; i < n; ++i) m = std::max(m, x[i]);
  return m;
}

} // namespace drumsim::kernels::scalar
