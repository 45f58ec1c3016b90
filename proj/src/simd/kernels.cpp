#include "covrank/simd.hpp"

#include <atomic>
#include <cassert>
#include <cstdlib>
#include <cstring>

namespace covrank::simd {

namespace scalar {

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void mul(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void scale(double alpha, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

}  // namespace scalar

namespace {

bool detect_avx2() {
#if defined(COVRANK_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend initial_backend() {
  if (const char* env = std::getenv("COVRANK_SIMD"); env && std::strcmp(env, "scalar") == 0) {
    return Backend::scalar;
  }
  return detect_avx2() ? Backend::avx2 : Backend::scalar;
}

std::atomic<Backend>& backend_slot() {
  static std::atomic<Backend> slot{initial_backend()};
  return slot;
}

}  // namespace

Backend active_backend() { return backend_slot().load(std::memory_order_relaxed); }

bool avx2_available() {
  static const bool ok = detect_avx2();
  return ok;
}

void set_backend(Backend b) {
  if (b == Backend::avx2 && !avx2_available()) b = Backend::scalar;
  backend_slot().store(b, std::memory_order_relaxed);
}

std::string_view backend_name(Backend b) { return b == Backend::avx2 ? "avx2" : "scalar"; }

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
#if defined(COVRANK_HAVE_AVX2)
  if (active_backend() == Backend::avx2) return avx2::dot(a.data(), b.data(), a.size());
#endif
  return scalar::dot(a.data(), b.data(), a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
#if defined(COVRANK_HAVE_AVX2)
  if (active_backend() == Backend::avx2) return avx2::axpy(alpha, x.data(), y.data(), x.size());
#endif
  scalar::axpy(alpha, x.data(), y.data(), x.size());
}

void mul(std::span<const double> a, std::span<const double> b, std::span<double> out) {
  assert(a.size() == b.size() && a.size() == out.size());
#if defined(COVRANK_HAVE_AVX2)
  if (active_backend() == Backend::avx2) return avx2::mul(a.data(), b.data(), out.data(), a.size());
#endif
  scalar::mul(a.data(), b.data(), out.data(), a.size());
}

void scale(double alpha, std::span<double> x) {
#if defined(COVRANK_HAVE_AVX2)
  if (active_backend() == Backend::avx2) return avx2::scale(alpha, x.data(), x.size());
#endif
  scalar::scale(alpha, x.data(), x.size());
}

}  // namespace covrank::simd
