#pragma once

#include <cstddef>

namespace riskpref::kernels {

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
double sum(const double* a, std::size_t n);
double sum_sq_diff(const double* a, const double* b, std::size_t n);
double sum_abs_diff(const double* a, const double* b, std::size_t n);
}  // namespace scalar

#if defined(RISKPREF_HAVE_AVX2)
// Compiled with -mavx2 -mfma; only call after the CPU check in dispatch.cpp.
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
double sum(const double* a, std::size_t n);
double sum_sq_diff(const double* a, const double* b, std::size_t n);
double sum_abs_diff(const double* a, const double* b, std::size_t n);
}  // namespace avx2
#endif

}  // namespace riskpref::kernels
