#include "smootherlab/kernels.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

namespace smootherlab::kernels {
namespace {

std::vector<double> random_values(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(eng);
  return v;
}

double naive_dot(const std::vector<double>& a, const std::vector<double>& b) {
  long double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<long double>(a[i]) * b[i];
  return static_cast<double>(s);
}

TEST(Kernels, ScalarMatchesLongDoubleReference) {
  for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 16u, 33u, 1000u}) {
    const auto a = random_values(n, n + 1);
    const auto b = random_values(n, n + 2);
    EXPECT_NEAR(scalar::dot(a.data(), b.data(), n), naive_dot(a, b), 1e-12 * (1.0 + n));
    EXPECT_NEAR(scalar::squared_norm(a.data(), n), naive_dot(a, a), 1e-12 * (1.0 + n));
    std::vector<double> diff(n);
    for (std::size_t i = 0; i < n; ++i) diff[i] = a[i] - b[i];
    EXPECT_NEAR(scalar::squared_distance(a.data(), b.data(), n), naive_dot(diff, diff), 1e-12 * (1.0 + n));
  }
}

TEST(Kernels, Avx2AgreesWithScalar) {
  if (!isa_supported(Isa::avx2)) GTEST_SKIP() << "CPU lacks AVX2/FMA";
  const auto& s = table(Isa::scalar);
  const auto& v = table(Isa::avx2);
  for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 8u, 15u, 17u, 64u, 257u, 4096u}) {
    const auto a = random_values(n, 3 * n + 1);
    const auto b = random_values(n, 3 * n + 2);
    const double scale = 1e-13 * (1.0 + static_cast<double>(n));
    EXPECT_NEAR(v.dot(a.data(), b.data(), n), s.dot(a.data(), b.data(), n), scale);
    EXPECT_NEAR(v.squared_norm(a.data(), n), s.squared_norm(a.data(), n), scale);
    EXPECT_NEAR(v.squared_distance(a.data(), b.data(), n), s.squared_distance(a.data(), b.data(), n), scale);

    auto y1 = b;
    auto y2 = b;
    s.axpy(0.37, a.data(), y1.data(), n);
    v.axpy(0.37, a.data(), y2.data(), n);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(y1[i], y2[i], 1e-15);
  }
}

TEST(Kernels, AxpyScalarExact) {
  std::vector<double> x{1, 2, 3, 4, 5};
  std::vector<double> y{1, 1, 1, 1, 1};
  scalar::axpy(2.0, x.data(), y.data(), x.size());
  EXPECT_EQ(y, (std::vector<double>{3, 5, 7, 9, 11}));
}

TEST(Kernels, ActiveTableIsUsable) {
  const auto a = random_values(37, 9);
  EXPECT_NEAR(dot(a, a), squared_norm(a), 1e-12);
  EXPECT_FALSE(isa_name(active_isa()).empty());
  EXPECT_TRUE(isa_supported(Isa::scalar));
}

}  // namespace
}  // namespace smootherlab::kernels
