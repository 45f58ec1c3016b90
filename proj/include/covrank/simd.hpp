#pragma once

// Data-parallel double-precision kernels used by the numeric core.
//
// Every kernel has a scalar reference implementation. On x86-64 an AVX2/FMA
// variant is compiled into a separate translation unit and selected at
// runtime when the CPU supports it. Setting COVRANK_SIMD=scalar in the
// environment, or calling set_backend(Backend::scalar), forces the reference
// path. Vector variants reassociate sums, so results agree with the scalar
// path to rounding (tests use a relative tolerance of 1e-12), not bitwise.

#include <cstddef>
#include <span>
#include <string_view>

namespace covrank::simd {

enum class Backend { scalar, avx2 };

/// Backend currently used by the dispatching entry points below.
Backend active_backend();

/// True when the running CPU and the build both support the AVX2 variant.
bool avx2_available();

/// Overrides the dispatch choice. Requesting avx2 on a machine without it
/// falls back to scalar. Not thread-safe against concurrent kernel calls.
void set_backend(Backend b);

std::string_view backend_name(Backend b);

// Dispatching kernels. Spans must have equal length where two are given.
double dot(std::span<const double> a, std::span<const double> b);
/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
/// out = a .* b
void mul(std::span<const double> a, std::span<const double> b, std::span<double> out);
/// x *= alpha
void scale(double alpha, std::span<double> x);

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void mul(const double* a, const double* b, double* out, std::size_t n);
void scale(double alpha, double* x, std::size_t n);
}  // namespace scalar

#if defined(COVRANK_HAVE_AVX2)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void mul(const double* a, const double* b, double* out, std::size_t n);
void scale(double alpha, double* x, std::size_t n);
}  // namespace avx2
#endif

}  // namespace covrank::simd
