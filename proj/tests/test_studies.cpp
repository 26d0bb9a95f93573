#include "smootherlab/studies.hpp"

#include <gtest/gtest.h>

#include <cmath>
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

TEST(Studies, CurveHelpers) {
  EXPECT_EQ(argmax({1, 3, 3, 2}), 1u);
  EXPECT_EQ(local_maxima({1, 3, 2, 5, 4, 4}), (std::vector<std::size_t>{1, 3}));
  EXPECT_THROW(argmax({}), ArgumentError);
}

TEST(Studies, NoiseBand) {
  // seed-averaged rise 0.1 on a level of 1: beyond 2%
  const std::vector<std::vector<double>> rising{{1.0, 1.1}, {1.0, 1.1}};
  ASSERT_EQ(noise_band_violations(rising).size(), 1u);
  EXPECT_NEAR(noise_band_violations(rising)[0].increase, 0.1, 1e-12);
  // within 2%
  EXPECT_TRUE(noise_band_violations({{1.0, 1.01}, {1.0, 1.01}}).empty());
  // large rise but paired differences are noisy: SE = 1 covers mean 0.5
  EXPECT_TRUE(noise_band_violations({{1.0, 2.5}, {1.0, 0.5}}).empty());
}

TEST(Studies, Spearman) {
  EXPECT_NEAR(spearman({1, 2, 3, 4}, {10, 20, 30, 40}), 1.0, 1e-15);
  EXPECT_NEAR(spearman({1, 2, 3, 4}, {4, 3, 2, 1}), -1.0, 1e-15);
  EXPECT_NEAR(spearman({1, 2, 3}, {1, 1, 2}), std::sqrt(0.75), 1e-12);
  EXPECT_TRUE(std::isnan(spearman({1}, {2})));
}

TEST(Studies, SingularValuesByHand) {
  Matrix phi(3, 2);
  phi << 3, 0, 0, 4, 0, 0;
  const Vector s = design_singular_values(phi, false);
  ASSERT_EQ(s.size(), 2);
  EXPECT_NEAR(s(0), 4.0, 1e-14);
  EXPECT_NEAR(s(1), 3.0, 1e-14);
}

TEST(Studies, CondFirstComponentIsOne) {
  const RffMap map = sample_frequencies(0, 50, 4);
  const std::vector<CondRow> rows = cond_study(map, gaussian(30, 4, 1), {10, 50}, {1, 5, 40});
  ASSERT_EQ(rows.size(), 6u);
  for (const auto& r : rows) {
    if (r.k == 1) EXPECT_DOUBLE_EQ(r.kappa, 1.0);
    if (r.k == 40 && r.p_phi == 10) EXPECT_TRUE(std::isinf(r.kappa));
  }
}

TEST(Studies, FixedDesignZeroNoise) {
  const Matrix x = gaussian(10, 30, 2);
  const Vector y = gaussian(10, 1, 3).col(0);
  const LinearSmoother a(fit_minnorm(x, y), y);
  const KnnSmoother b(x, y, 1);
  const FixedDesignReport r = fixed_design_check({&a, &b}, x, y, y);
  EXPECT_EQ(r.reference_loss, 0.0);
  for (const auto& row : r.rows) {
    EXPECT_LT(row.fixed_design_loss, 1e-20);
    EXPECT_TRUE(row.matches_reference);
    EXPECT_LT(row.max_weight_deviation, 1e-9);
  }
}

TEST(Studies, FixedDesignMatchesNoisyReference) {
  const Matrix x = gaussian(10, 30, 4);
  const Vector y = gaussian(10, 1, 5).col(0);
  const Vector y2 = y + 0.5 * gaussian(10, 1, 6).col(0);
  const LinearSmoother a(fit_minnorm(x, y), y);
  const FixedDesignReport r = fixed_design_check({&a}, x, y, y2);
  EXPECT_NEAR(r.reference_loss, (y - y2).squaredNorm() / 10, 1e-15);
  EXPECT_TRUE(r.rows[0].matches_reference);
}

TEST(Studies, FixedDesignRejectsNonInterpolators) {
  const Matrix x = gaussian(10, 3, 7);
  const Vector y = gaussian(10, 1, 8).col(0);
  const MeanSmoother mean(y);
  EXPECT_THROW(fixed_design_check({&mean}, x, y, y), PreconditionError);
}

TEST(Studies, BiasVarianceOfTheMean) {
  BiasVarianceConfig cfg;
  cfg.model = "mean";
  cfg.n_test = 3;
  cfg.n_resamples = 500;
  const BiasVarianceReport r = bias_variance({"sine", 0.5, 20, 1, 3}, cfg);
  EXPECT_DOUBLE_EQ(r.noise_var, 0.25);
  for (const auto& row : r.rows) EXPECT_NEAR(row.analytic_var, 0.25 / 20, 1e-15);
}

TEST(Studies, BiasVarianceOfOneNeighbour) {
  BiasVarianceConfig cfg;
  cfg.model = "knn";
  cfg.k = 1;
  cfg.n_test = 4;
  cfg.n_resamples = 500;
  const BiasVarianceReport r = bias_variance({"sine", 0.3, 15, 1, 4}, cfg);
  for (const auto& row : r.rows) EXPECT_NEAR(row.analytic_var, 0.09, 1e-15);
  EXPECT_THROW(bias_variance({"sine", 0.3, 15, 1, 4}, BiasVarianceConfig{"tree"}), PreconditionError);
}

TEST(Studies, SelectionWithOneInterpolatingConfig) {
  const Dataset train = synth_generate({"friedman1", 0.2, 30, 5, 1});
  const Dataset test = synth_generate({"friedman1", 0.2, 20, 5, 2});
  // pure trees interpolate within a few rounds; stumps cannot in 20
  const SelectionReport r = model_selection_study(train.features, train.targets, test.features, test.targets,
                                                  {2, 0}, {0.85}, 1e-4, 20, 0);
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_EQ(r.n_interpolating, 1);
  ASSERT_TRUE(r.selected.has_value());
  EXPECT_EQ(r.rows[*r.selected].leaf_budget, 30);
  EXPECT_TRUE(r.rows[*r.selected].interpolating);
}

TEST(Studies, BackToUSinglePoint) {
  const ExperimentData d =
      make_experiment_data(synth_generate({"friedman1", 0.2, 40, 5, 1}), synth_generate({"friedman1", 0.2, 20, 5, 2}));
  const BackToUResult r = back_to_u(Family::tree, {5}, {2}, 5, {}, SharedParams{}, d);
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_EQ(r.switch_row, 0u);
  EXPECT_EQ(r.rows[0].branch, "composite");
  EXPECT_EQ(r.rows[1].axis2, 2);
}

}  // namespace
}  // namespace smootherlab
