#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "riskpref/error.hpp"
#include "riskpref/kernels.hpp"

using namespace riskpref::kernels;

namespace {

std::vector<double> random_vec(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> z(0.0, 3.0);
  std::vector<double> v(n);
  for (auto& x : v) x = z(rng);
  return v;
}

// Reassociation error bound for a sum of n terms with magnitude total `mag`.
double bound(std::size_t n, double mag) { return 4.0 * (static_cast<double>(n) + 8.0) * 2.2e-16 * mag + 1e-300; }

}  // namespace

TEST_CASE("scalar backend is always available") {
  CHECK(backend_available(Backend::scalar));
  CHECK(backend_name(Backend::scalar) == "scalar");
  CHECK(backend_name(Backend::avx2) == "avx2");
}

TEST_CASE("every SIMD variant matches the scalar reference") {
  const auto& ref = table(Backend::scalar);
  std::mt19937_64 rng(11);
  for (const Backend b : available_backends()) {
    const auto& k = table(b);
    CAPTURE(backend_name(b));
    for (std::size_t n : {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 33, 64, 65, 127, 1000, 4099}) {
      CAPTURE(n);
      const auto a = random_vec(n, rng);
      const auto c = random_vec(n, rng);
      double mag_dot = 0.0, mag_sum = 0.0, mag_sq = 0.0, mag_abs = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        mag_dot += std::fabs(a[i] * c[i]);
        mag_sum += std::fabs(a[i]);
        mag_sq += (a[i] - c[i]) * (a[i] - c[i]);
        mag_abs += std::fabs(a[i] - c[i]);
      }
      CHECK(std::fabs(k.dot(a.data(), c.data(), n) - ref.dot(a.data(), c.data(), n)) <= bound(n, mag_dot));
      CHECK(std::fabs(k.sum(a.data(), n) - ref.sum(a.data(), n)) <= bound(n, mag_sum));
      CHECK(std::fabs(k.sum_sq_diff(a.data(), c.data(), n) - ref.sum_sq_diff(a.data(), c.data(), n)) <=
            bound(n, mag_sq));
      CHECK(std::fabs(k.sum_abs_diff(a.data(), c.data(), n) - ref.sum_abs_diff(a.data(), c.data(), n)) <=
            bound(n, mag_abs));

      // axpy is elementwise: FMA may differ from mul+add by one rounding.
      auto y1 = c;
      auto y2 = c;
      k.axpy(0.37, a.data(), y1.data(), n);
      ref.axpy(0.37, a.data(), y2.data(), n);
      for (std::size_t i = 0; i < n; ++i) {
        CHECK(std::fabs(y1[i] - y2[i]) <= 4e-16 * (std::fabs(0.37 * a[i]) + std::fabs(c[i])));
      }
    }
  }
}

TEST_CASE("scalar reference agrees with a long-double oracle") {
  std::mt19937_64 rng(5);
  const auto& ref = table(Backend::scalar);
  const auto a = random_vec(513, rng);
  const auto c = random_vec(513, rng);
  long double d = 0, s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d += static_cast<long double>(a[i]) * c[i];
    s += a[i];
  }
  CHECK(ref.dot(a.data(), c.data(), a.size()) == doctest::Approx(static_cast<double>(d)).epsilon(1e-12));
  CHECK(ref.sum(a.data(), a.size()) == doctest::Approx(static_cast<double>(s)).epsilon(1e-12));
}

TEST_CASE("backend switching") {
  const Backend before = active_backend();
  set_backend(Backend::scalar);
  CHECK(active_backend() == Backend::scalar);
  const std::vector<double> a{1, 2, 3}, b{4, 5, 6};
  CHECK(dot(a, b) == 32.0);
  if (!backend_available(Backend::avx2)) {
    CHECK_THROWS_AS(set_backend(Backend::avx2), riskpref::Error);
  } else {
    set_backend(Backend::avx2);
    CHECK(dot(a, b) == 32.0);
  }
  set_backend(before);
}
