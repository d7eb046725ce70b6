#include "riskpref/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

#include "kernels_impl.hpp"
#include "riskpref/error.hpp"

namespace riskpref::kernels {

namespace {

constexpr KernelTable kScalarTable{
    &scalar::dot, &scalar::axpy, &scalar::sum, &scalar::sum_sq_diff, &scalar::sum_abs_diff,
};

#if defined(RISKPREF_HAVE_AVX2)
constexpr KernelTable kAvx2Table{
    &avx2::dot, &avx2::axpy, &avx2::sum, &avx2::sum_sq_diff, &avx2::sum_abs_diff,
};
#endif

bool cpu_has_avx2() noexcept {
#if defined(RISKPREF_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend initial_backend() noexcept {
  if (const char* env = std::getenv("RISKPREF_SIMD")) {
    const std::string choice(env);
    if (choice == "scalar") return Backend::scalar;
    if (choice == "avx2" && cpu_has_avx2()) return Backend::avx2;
  }
  return cpu_has_avx2() ? Backend::avx2 : Backend::scalar;
}

std::atomic<Backend>& current() noexcept {
  static std::atomic<Backend> backend{initial_backend()};
  return backend;
}

}  // namespace

bool backend_available(Backend backend) noexcept {
  switch (backend) {
    case Backend::scalar:
      return true;
    case Backend::avx2:
      return cpu_has_avx2();
  }
  return false;
}

std::vector<Backend> available_backends() {
  std::vector<Backend> out{Backend::scalar};
  if (backend_available(Backend::avx2)) out.push_back(Backend::avx2);
  return out;
}

std::string_view backend_name(Backend backend) noexcept {
  return backend == Backend::avx2 ? "avx2" : "scalar";
}

const KernelTable& table(Backend backend) {
  if (!backend_available(backend)) {
    throw Error("kernel backend not available: " + std::string(backend_name(backend)));
  }
#if defined(RISKPREF_HAVE_AVX2)
  if (backend == Backend::avx2) return kAvx2Table;
#endif
  return kScalarTable;
}

Backend active_backend() noexcept { return current().load(std::memory_order_relaxed); }

void set_backend(Backend backend) {
  table(backend);  // validates
  current().store(backend, std::memory_order_relaxed);
}

namespace detail {
const KernelTable& active() noexcept {
#if defined(RISKPREF_HAVE_AVX2)
  if (current().load(std::memory_order_relaxed) == Backend::avx2) return kAvx2Table;
#endif
  return kScalarTable;
}
}  // namespace detail

}  // namespace riskpref::kernels
