#include "smootherlab/rff.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

namespace smootherlab {
namespace {

TEST(Rff, DefaultScaleIsOneFifth) { EXPECT_EQ(kDefaultRffScale, 1.0 / 5.0); }

TEST(Rff, PrefixesAreStable) {
  const RffMap small = sample_frequencies(0, 100, 784, 0.2);
  const RffMap large = sample_frequencies(0, 500, 784, 0.2);
  EXPECT_EQ(small.frequencies, large.frequencies.topRows(100));
}

TEST(Rff, FrequencyStdMatchesScale) {
  const RffMap map = sample_frequencies(7, 1000, 1000, 0.2);
  const double n = static_cast<double>(map.frequencies.size());
  const double mean = map.frequencies.mean();
  const double sd = std::sqrt((map.frequencies.array() - mean).square().sum() / (n - 1.0));
  EXPECT_NEAR(sd, 0.2, 0.002);
  EXPECT_NEAR(mean, 0.0, 5.0 * 0.2 / std::sqrt(n));
}

TEST(Rff, ZeroInputGivesOnes) {
  const RffMap map = sample_frequencies(1, 20, 4);
  const Matrix x = Matrix::Zero(3, 4);
  EXPECT_EQ(transform(map, x, 20), Matrix::Ones(3, 20));
}

TEST(Rff, CosineOfPi) {
  RffMap map;
  map.frequencies = Matrix::Zero(1, 3);
  map.frequencies(0, 0) = std::numbers::pi;
  Matrix x = Matrix::Zero(1, 3);
  x(0, 0) = 1.0;
  EXPECT_NEAR(transform(map, x, 1)(0, 0), -1.0, 1e-15);
}

TEST(Rff, MatchesDirectCosine) {
  const RffMap map = sample_frequencies(3, 5, 6, 0.7);
  Matrix x(3, 6);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = 0.1 * static_cast<double>(i % 11) - 0.3;
  const Matrix phi = transform(map, x, 5);
  for (Eigen::Index i = 0; i < 3; ++i) {
    for (Eigen::Index p = 0; p < 5; ++p) {
      double s = 0.0;
      for (Eigen::Index j = 0; j < 6; ++j) s += map.frequencies(p, j) * x(i, j);
      EXPECT_NEAR(phi(i, p), std::cos(s), 1e-12);
    }
    const Vector single = transform_point(map, std::span<const double>(x.row(i).data(), 6), 5);
    EXPECT_EQ(single.transpose(), phi.row(i));
  }
}

TEST(Rff, RejectsBadArguments) {
  const RffMap map = sample_frequencies(1, 10, 4);
  EXPECT_THROW(transform(map, Matrix::Zero(2, 4), 11), ArgumentError);
  EXPECT_THROW(transform(map, Matrix::Zero(2, 3), 5), ArgumentError);
  EXPECT_THROW(sample_frequencies(1, 0, 4), ArgumentError);
  EXPECT_THROW(sample_frequencies(1, 5, 4, -1.0), ArgumentError);
}

}  // namespace
}  // namespace smootherlab
