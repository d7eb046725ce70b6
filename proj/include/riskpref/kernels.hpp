#pragma once

// Data-parallel arithmetic used by the solvers, KNN and metrics.
//
// Every kernel has a scalar reference implementation. SIMD variants (AVX2+FMA
// on x86-64) are compiled in separate translation units and selected once at
// runtime from CPU feature detection. RISKPREF_SIMD=scalar|avx2 in the
// environment overrides the choice. Variants agree with the reference up to
// floating-point reassociation; tests/unit/test_kernels.cpp pins that bound.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace riskpref::kernels {

enum class Backend { scalar, avx2 };

struct KernelTable {
  double (*dot)(const double* a, const double* b, std::size_t n);
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  double (*sum)(const double* a, std::size_t n);
  double (*sum_sq_diff)(const double* a, const double* b, std::size_t n);
  double (*sum_abs_diff)(const double* a, const double* b, std::size_t n);
};

const KernelTable& table(Backend backend);
Backend active_backend() noexcept;
// Throws riskpref::Error if the backend was not compiled in or the CPU lacks it.
void set_backend(Backend backend);
bool backend_available(Backend backend) noexcept;
std::vector<Backend> available_backends();
std::string_view backend_name(Backend backend) noexcept;

namespace detail {
const KernelTable& active() noexcept;
}  // namespace detail

inline double dot(std::span<const double> a, std::span<const double> b) {
  return detail::active().dot(a.data(), b.data(), a.size());
}

// y += alpha * x
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  detail::active().axpy(alpha, x.data(), y.data(), x.size());
}

inline double sum(std::span<const double> a) {
  return detail::active().sum(a.data(), a.size());
}

inline double sum_sq_diff(std::span<const double> a, std::span<const double> b) {
  return detail::active().sum_sq_diff(a.data(), b.data(), a.size());
}

inline double sum_abs_diff(std::span<const double> a, std::span<const double> b) {
  return detail::active().sum_abs_diff(a.data(), b.data(), a.size());
}

}  // namespace riskpref::kernels
