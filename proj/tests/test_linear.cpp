#include "smootherlab/linear_smoothers.hpp"

#include <gtest/gtest.h>

#include <random>

namespace smootherlab {
namespace {

Matrix gaussian(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::normal_distribution<double> g;
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = g(eng);
  return m;
}

Vector gaussian_vector(Eigen::Index n, std::uint64_t seed) { return gaussian(n, 1, seed).col(0); }

TEST(Linear, OlsSingleFeatureExact) {
  Matrix phi(2, 1);
  phi << 1, 2;
  Vector y(2);
  y << 1, 2;
  const LinearFit fit = fit_ols(phi, y);
  EXPECT_NEAR(fit.coefficients(0), 1.0, 1e-14);
  EXPECT_NEAR(fit.fitted_values(1), 2.0, 1e-14);
}

TEST(Linear, OlsSatisfiesNormalEquations) {
  const Matrix phi = gaussian(40, 6, 1);
  const Vector y = gaussian_vector(40, 2);
  const LinearFit fit = fit_ols(phi, y);
  const Vector grad = phi.transpose() * (phi * fit.coefficients - y);
  EXPECT_LT(grad.norm(), 1e-10);
  EXPECT_EQ(fit.rank, 6);
}

TEST(Linear, OlsRejectsWideAndDeficientDesigns) {
  EXPECT_THROW(fit_ols(gaussian(3, 5, 1), gaussian_vector(3, 2)), ArgumentError);
  Matrix phi = gaussian(10, 3, 3);
  phi.col(2) = phi.col(0);
  EXPECT_THROW(fit_ols(phi, gaussian_vector(10, 4)), SingularityError);
}

TEST(Linear, MinNormOnIdentityBlock) {
  Matrix phi = Matrix::Zero(3, 5);
  phi.leftCols(3).setIdentity();
  Vector y(3);
  y << 1, -2, 3;
  const LinearFit fit = fit_minnorm(phi, y);
  Vector expected = Vector::Zero(5);
  expected.head(3) = y;
  EXPECT_LT((fit.coefficients - expected).norm(), 1e-14);
}

TEST(Linear, MinNormInterpolatesWithSmallestNorm) {
  const Matrix phi = gaussian(8, 20, 5);
  const Vector y = gaussian_vector(8, 6);
  const LinearFit fit = fit_minnorm(phi, y);
  EXPECT_LT((phi * fit.coefficients - y).norm(), 1e-10);
  // any other interpolator differs by a null-space vector and is longer
  const Eigen::JacobiSVD<Matrix> svd(phi, Eigen::ComputeFullV);
  const Vector null_dir = svd.matrixV().col(15);
  EXPECT_LT((phi * null_dir).norm(), 1e-10);
  EXPECT_GT((fit.coefficients + 0.1 * null_dir).norm(), fit.coefficients.norm());
  EXPECT_NEAR(fit.coefficients.dot(null_dir), 0.0, 1e-10);
}

TEST(Linear, SvdBasisTwoByThree) {
  Matrix phi(2, 3);
  phi << 1, 0, 1, 0, 1, 1;
  Vector y(2);
  y << 1, 2;
  const LinearFit a = fit_svd_basis(phi, y);
  const LinearFit b = fit_minnorm(phi, y);
  EXPECT_EQ(a.rank, 2);
  EXPECT_LT((a.predict(phi) - y).norm(), 1e-12);
  Matrix x0(1, 3);
  x0 << 0.3, -0.4, 2.0;
  EXPECT_NEAR(a.predict(x0)(0), b.predict(x0)(0), 1e-12);
}

TEST(Linear, PcrConstantTargetsPredictConstant) {
  const Matrix phi = gaussian(30, 5, 7);
  const Vector y = Vector::Constant(30, 4.25);
  const LinearFit fit = fit_pcr(phi, y, 3);
  EXPECT_LT((fit.predict(gaussian(10, 5, 8)).array() - 4.25).abs().maxCoeff(), 1e-12);
}

TEST(Linear, PcrWeightsSumToOne) {
  const Matrix phi = gaussian(30, 5, 9);
  const LinearFit fit = fit_pcr(phi, gaussian_vector(30, 10), 2);
  const Matrix w = weights_linear_batch(fit, gaussian(4, 5, 11));
  for (Eigen::Index k = 0; k < 4; ++k) EXPECT_NEAR(w.row(k).sum(), 1.0, 1e-12);
}

TEST(Linear, PcrRejectsTooManyComponents) {
  EXPECT_THROW(fit_pcr(gaussian(10, 20, 1), gaussian_vector(10, 2), 10), ArgumentError);
  EXPECT_NO_THROW(fit_pcr(gaussian(10, 20, 1), gaussian_vector(10, 2), 9));
}

TEST(Linear, PcrDropsConstantColumns) {
  Matrix phi = gaussian(20, 4, 12);
  phi.col(1).setConstant(2.0);
  const LinearFit fit = fit_pcr(phi, gaussian_vector(20, 13), 2);
  ASSERT_TRUE(fit.pcr_state.has_value());
  EXPECT_EQ(fit.pcr_state->dropped_columns, 1);
}

TEST(Linear, InterpolatorWeightsAtTrainingPointsAreUnitVectors) {
  const Matrix phi = gaussian(6, 15, 14);
  const LinearFit fit = fit_minnorm(phi, gaussian_vector(6, 15));
  const Matrix w = weights_linear_batch(fit, phi);
  EXPECT_LT((w - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Linear, WeightsReproducePredictions) {
  const Matrix phi = gaussian(25, 4, 16);
  const Vector y = gaussian_vector(25, 17);
  const Matrix x0 = gaussian(5, 4, 18);
  for (const LinearFit& fit : {fit_ols(phi, y), fit_pcr(phi, y, 3)}) {
    const Matrix w = weights_linear_batch(fit, x0);
    EXPECT_LT((w * y - fit.predict(x0)).cwiseAbs().maxCoeff(), 1e-12);
    const Vector single = weights_linear(fit, std::span<const double>(x0.row(2).data(), 4));
    EXPECT_LT((single.transpose() - w.row(2)).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(Linear, OlsHatIsProjection) {
  const Matrix phi = gaussian(30, 7, 19);
  const Matrix h = hat_matrix(fit_ols(phi, gaussian_vector(30, 20)));
  EXPECT_NEAR(h.trace(), 7.0, 1e-10);
  EXPECT_LT((h * h - h).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((h - h.transpose()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Linear, LeastSquaresDispatch) {
  EXPECT_EQ(fit_least_squares(gaussian(10, 3, 1), gaussian_vector(10, 2)).mode, LinearMode::ols);
  EXPECT_EQ(fit_least_squares(gaussian(10, 10, 1), gaussian_vector(10, 2)).mode, LinearMode::min_norm);
}

}  // namespace
}  // namespace smootherlab
