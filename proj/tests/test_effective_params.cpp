#include "smootherlab/effective_params.hpp"

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

TEST(EffParams, MeanSmootherHasOneParameter) {
  const MeanSmoother mean(gaussian(12, 1, 1).col(0));
  const EffParamsReport r = generalized_eff_params(mean, gaussian(7, 3, 2), "test");
  EXPECT_NEAR(r.p_generalized, 1.0, 1e-14);
  EXPECT_NEAR(r.effective_knn, 12.0, 1e-12);
  EXPECT_EQ(r.set_size, 7);
  EXPECT_EQ(r.input_set_name, "test");
}

TEST(EffParams, KnnHasNOverKParameters) {
  const Matrix x = gaussian(30, 2, 3);
  const Vector y = gaussian(30, 1, 4).col(0);
  for (int k : {1, 3, 10, 30}) {
    const KnnSmoother knn(x, y, k);
    const EffParamsReport r = generalized_eff_params(knn, gaussian(9, 2, 5), "test");
    EXPECT_NEAR(r.p_generalized, 30.0 / k, 1e-12 * 30) << k;
    EXPECT_NEAR(r.effective_knn, k, 1e-12 * k) << k;
  }
}

TEST(EffParams, InterpolatorHasNParametersOnTrainingSet) {
  const Matrix phi = gaussian(10, 25, 6);
  const Vector y = gaussian(10, 1, 7).col(0);
  const LinearSmoother model(fit_minnorm(phi, y), y);
  EXPECT_NEAR(generalized_eff_params(model, phi, "train").p_generalized, 10.0, 1e-9);
}

TEST(EffParams, FromWeightsMatchesDefinition) {
  Matrix w(2, 4);
  w << 0.5, 0.5, 0, 0, 1, 0, 0, 0;
  const EffParamsReport r = eff_params_from_weights(w, "x");
  EXPECT_DOUBLE_EQ(r.p_generalized, 4.0 / 2.0 * (0.5 + 1.0));
  EXPECT_DOUBLE_EQ(r.per_point_norms(0), 0.5);
  EXPECT_DOUBLE_EQ(r.effective_knn, 4.0 / 3.0);
}

TEST(EffParams, ClassicalOnIdentity) {
  const ClassicalEffParams c = train_eff_params_classical(Matrix::Identity(5, 5));
  EXPECT_DOUBLE_EQ(c.p_cov, 5.0);
  EXPECT_DOUBLE_EQ(c.p_var, 5.0);
  EXPECT_DOUBLE_EQ(c.p_err, 5.0);
}

TEST(EffParams, ClassicalOnSymmetricMatrix) {
  Matrix s(2, 2);
  s << 0.5, 0.25, 0.25, 0.5;
  const ClassicalEffParams c = train_eff_params_classical(s);
  EXPECT_DOUBLE_EQ(c.p_cov, 1.0);
  EXPECT_DOUBLE_EQ(c.p_var, 2 * (0.25 + 0.0625));
  EXPECT_DOUBLE_EQ(c.p_err, 2.0 - 0.625);
}

TEST(EffParams, ClassicalAgreesForProjections) {
  const Matrix phi = gaussian(20, 4, 8);
  const Matrix h = hat_matrix(fit_ols(phi, gaussian(20, 1, 9).col(0)));
  const ClassicalEffParams c = train_eff_params_classical(h);
  EXPECT_NEAR(c.p_cov, 4.0, 1e-10);
  EXPECT_NEAR(c.p_var, 4.0, 1e-10);
  EXPECT_NEAR(c.p_err, 4.0, 1e-10);
}

TEST(EffParams, HessianProxy) {
  const Matrix phi = gaussian(15, 6, 10);
  EXPECT_NEAR(hessian_proxy_eff_params(phi, 0.0), 6.0, 1e-12);
  EXPECT_LT(hessian_proxy_eff_params(phi, 1e12), 1e-8);

  Matrix single = Matrix::Zero(4, 1);
  single(0, 0) = 2.0;  // theta = 4
  EXPECT_NEAR(hessian_proxy_eff_params(single, 4.0), 0.5, 1e-15);
}

TEST(EffParams, HessianProxyCountsRank) {
  Matrix phi = gaussian(10, 5, 11);
  phi.col(4) = phi.col(0) + phi.col(1);
  EXPECT_NEAR(hessian_proxy_eff_params(phi, 0.0), 4.0, 1e-12);
  EXPECT_THROW(hessian_proxy_eff_params(phi, -1.0), ArgumentError);
}

}  // namespace
}  // namespace smootherlab
