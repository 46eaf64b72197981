#include "drumsim/kernels.hpp"

#include "kernels_impl.hpp"

#include <stdexcept>

namespace drumsim::kernels {

namespace {

struct KernelTable {
  void (*diff_rectify)(const double*, const double*, double, double*, std::size_t);
  void (*square)(const double*, double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*abs_diff)(double, const double*, double*, std::size_t);
  void (*add_shifted_min)(const double*, const double*, double*, std::size_t);
  double (*sum)(const double*, std::size_t);
  double (*max_value)(const double*, std::size_t);
};

constexpr KernelTable kScalarTable = {
    &scalar::diff_rectify, &scalar::square,   &scalar::axpy,
    &scalar::abs_diff,     &scalar::add_shifted_min, &scalar::sum,
    &scalar::max_value,
};

#if DRUMSIM_HAVE_AVX2_BACKEND
constexpr KernelTable kAvx2Table = {
    &avx2::diff_rectify, &avx2::square,   &avx2::axpy,
    &avx2::abs_diff,     &avx2::add_shifted_min, &avx2::sum,
    &avx2::max_value,
};
#endif

#if DRUMSIM_HAVE_NEON_BACKEND
constexpr KernelTable kNeonTable = {
    &neon::diff_rectify, &neon::square,   &neon::axpy,
    &neon::abs_diff,     &neon::add_shifted_min, &neon::sum,
    &neon::max_value,
};
#endif

bool backend_supported(Backend b) {
  switch (b) {
    case Backend::scalar:
      return true;
    case Backend::avx2:
#if DRUMSIM_HAVE_AVX2_BACKEND && defined(__GNUC__)
      return __builtin_cpu_supports("avx2") != 0;
#else
      return false;
#endif
    case Backend::neon:
#if DRUMSIM_HAVE_NEON_BACKEND
      // NEON is baseline on aarch64.
      return true;
#else
      return false;
#endif
  }
  return false;
}

Backend detect_best() {
  if (backend_supported(Backend::avx2)) return Backend::avx2;
  if (backend_supported(Backend::neon)) return Backend::neon;
  return Backend::scalar;
}

const KernelTable* table_for(Backend b) {
  switch (b) {
#if DRUMSIM_HAVE_AVX2_BACKEND
    case Backend::avx2:
      return &kAvx2Table;
#endif
#if DRUMSIM_HAVE_NEON_BACKEND
    case Backend::neon:
      return &kNeonTable;
#endif
    default:
      return &kScalarTable;
  }
}

struct Dispatch {
  Backend backend;
  const KernelTable* table;
  Dispatch() : backend(detect_best()), table(table_for(backend)) {}
};

Dispatch& dispatch() {
  static Dispatch d;
  return d;
}

} // namespace

const char* backend_name(Backend b) {
  switch (b) {
    case Backend::scalar: return "scalar";
    case Backend::avx2:   return "avx2";
    case Backend::neon:   return "neon";
  }
  return "unknown";
}

Backend active_backend() { return dispatch().backend; }

std::vector<Backend> available_backends() {
  std::vector<Backend> out{Backend::scalar};
  if (backend_supported(Backend::avx2)) out.push_back(Backend::avx2);
  if (backend_supported(Backend::neon)) out.push_back(Backend::neon);
  return out;
}

void force_backend(Backend b) {
  if (!backend_supported(b)) {
    throw std::invalid_argument(std::string("kernel backend not available: ") + backend_name(b));
  }
  dispatch().backend = b;
  dispatch().table = table_for(b);
}

void reset_backend() {
  dispatch().backend = detect_best();
  dispatch().table = table_for(dispatch().backend);
}

void diff_rectify(const double* a, const double* b, double gain, double* out, std::size_t n) {
  dispatch().table->diff_rectify(a, b, gain, out, n);
}

void square(const double* x, double* out, std::size_t n) {
  dispatch().table->square(x, out, n);
}

void axpy(double s, const double* x, double* y, std::size_t n) {
  dispatch().table->axpy(s, x, y, n);
}

void abs_diff(double value, const double* b, double* out, std::size_t n) {
  dispatch().table->abs_diff(value, b, out, n);
}

void add_shifted_min(const double* cost, const double* prev, double* out, std::size_t n) {
  dispatch().table->add_shifted_min(cost, prev, out, n);
}

double sum(const double* x, std::size_t n) { return dispatch().table->sum(x, n); }

double max_value(const double* x, std::size_t n) { return dispatch().table->max_value(x, n); }

} // namespace drumsim::kernels
