#include "kernels_impl.hpp"

#if DRUMSIM_HAVE_NEON_BACKEND

#include <arm_neon.h>

#include <algorithm>
#include <cmath>

// NEON variants, 2 doubles per vector. Same no-FMA rule as the AVX2 backend.

namespace drumsim::kernels::neon {

void diff_rectify(const double* a, const double* b, double gain, double* out, std::size_t n) {
  const float64x2_t g = vdupq_n_f64(gain);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t va = vld1q_f64(a + i);
    float64x2_t vb = vld1q_f64(b + i);
    float64x2_t d = vmulq_f64(g, vsubq_f64(va, vb));
    vst1q_f64(out + i, vabsq_f64(d));
  }
  for (; i < n; ++i) {
    out[i] = std::abs(gain * (a[i] - b[i]));
  }
}

void square(const double* x, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t v = vld1q_f64(x + i);
    vst1q_f64(out + i, vmulq_f64(v, v));
  }
  for (; i < n; ++i) {
    out[i] = x[i] * x[i];
  }
}

void axpy(double s, const double* x, double* y, std::size_t n) {
  const float64x2_t vs = vdupq_n_f64(s);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t vy = vld1q_f64(y + i);
    float64x2_t vx = vld1q_f64(x + i);
    vst1q_f64(y + i, vaddq_f64(vy, vmulq_f64(vs, vx)));
  }
  for (; i < n; ++i) {
    y[i] = y[i] + s * x[i];
  }
}

void abs_diff(double value, const double* b, double* out, std::size_t n) {
  const float64x2_t vv = vdupq_n_f64(value);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t vb = vld1q_f64(b + i);
    vst1q_f64(out + i, vabsq_f64(vsubq_f64(vv, vb)));
  }
  for (; i < n; ++i) {
    out[i] = std::abs(value - b[i]);
  }
}

void add_shifted_min(const double* cost, const double* prev, double* out, std::size_t n) {
  if (n == 0) return;
  out[0] = cost[0] + prev[0];
  std::size_t j = 1;
  for (; j + 2 <= n; j += 2) {
    float64x2_t p = vld1q_f64(prev + j);
    float64x2_t pm1 = vld1q_f64(prev + j - 1);
    float64x2_t c = vld1q_f64(cost + j);
    vst1q_f64(out + j, vaddq_f64(c, vminq_f64(pm1, p)));
  }
  for (; j < n; ++j) {
    out[j] = cost[j] + std::min(prev[j - 1], prev[j]);
  }
}

double sum(const double* x, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    acc = vaddq_f64(acc, vld1q_f64(x + i));
  }
  double total = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
  for (; i < n; ++i) total += x[i];
  return total;
}

double max_value(const double* x, std::size_t n) {
  if (n == 0) return 0.0;
  if (n < 2) return x[0];
  float64x2_t acc = vld1q_f64(x);
  std::size_t i = 2;
  for (; i + 2 <= n; i += 2) {
    acc = vmaxq_f64(acc, vld1q_f64(x + i));
  }
  double m = std::max(vgetq_lane_f64(acc, 0), vgetq_lane_f64(acc, 1));
  for (; i < n; ++i) m = std::max(m, x[i]);
  return m;
}

} // namespace drumsim::kernels::neon

#endif // DRUMSIM_HAVE_NEON_BACKEND
