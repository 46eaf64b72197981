#include "kernels_impl.hpp"

#if DRUMSIM_HAVE_AVX2_BACKEND

#include <immintrin.h>

#include <algorithm>
#include <cmath>

// AVX2 variants, 4 doubles per lane group. FMA is deliberately not used so
// results stay bit-identical to the scalar reference (mul and add round
// separately in both).

namespace drumsim::kernels::avx2 {

namespace {
inline __m256d abs_pd(__m256d v) {
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  return _mm256_andnot_pd(sign_mask, v);
}
} // namespace

void diff_rectify(const double* a, const double* b, double gain, double* out, std::size_t n) {
  const __m256d g = _mm256_set1_pd(gain);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d va = _mm256_loadu_pd(a + i);
    __m256d vb = _mm256_loadu_pd(b + i);
    __m256d d = _mm256_mul_pd(g, _mm256_sub_pd(va, vb));
    _mm256_storeu_pd(out + i, abs_pd(d));
  }
  for (; i < n; ++i) {
    out[i] = std::abs(gain * (a[i] - b[i]));
  }
}

void square(const double* x, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_loadu_pd(x + i);
    _mm256_storeu_pd(out + i, _mm256_mul_pd(v, v));
  }
  for (; i < n; ++i) {
    out[i] = x[i] * x[i];
  }
}

void axpy(double s, const double* x, double* y, std::size_t n) {
  const __m256d vs = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    __m256d vx = _mm256_loadu_pd(x + i);
    _mm256_storeu_pd(y + i, _mm256_add_pd(vy, _mm256_mul_pd(vs, vx)));
  }
  for (; i < n; ++i) {
    y[i] = y[i] + s * x[i];
  }
}

void abs_diff(double value, const double* b, double* out, std::size_t n) {
  const __m256d vv = _mm256_set1_pd(value);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vb = _mm256_loadu_pd(b + i);
    _mm256_storeu_pd(out + i, abs_pd(_mm256_sub_pd(vv, vb)));
  }
  for (; i < n; ++i) {
    out[i] = std::abs(value - b[i]);
  }
}

void add_shifted_min(const double* cost, const double* prev, double* out, std::size_t n) {
  if (n == 0) return;
  out[0] = cost[0] + prev[0];
  std::size_t j = 1;
  // prev[j-1] is an unaligned load one element back.
  for (; j + 4 <= n; j += 4) {
    __m256d p = _mm256_loadu_pd(prev + j);
    __m256d pm1 = _mm256_loadu_pd(prev + j - 1);
    __m256d c = _mm256_loadu_pd(cost + j);
    _mm256_storeu_pd(out + j, _mm256_add_pd(c, _mm256_min_pd(pm1, p)));
  }
  for (; j < n; ++j) {
    out[j] = cost[j] + std::min(prev[j - 1], prev[j]);
  }
}

double sum(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double total = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) total += x[i];
  return total;
}

double max_value(const double* x, std::size_t n) {
  if (n == 0) return 0.0;
  if (n < 4) {
    double m = x[0];
    for (std::size_t i = 1; i < n; ++i) m = std::max(m, x[i]);
    return m;
  }
  __m256d acc = _mm256_loadu_pd(x);
  std::size_t i = 4;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_max_pd(acc, _mm256_loadu_pd(x + i));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double m = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
  for (; i < n; ++i) m = std::max(m, x[i]);
  return m;
}

} // namespace drumsim::kernels::avx2

#endif // DRUMSIM_HAVE_AVX2_BACKEND
