#include "smootherlab/tree_smoothers.hpp"

#include <gtest/gtest.h>

#include <random>

namespace smootherlab {
namespace {

Matrix uniform(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::uniform_real_distribution<double> u;
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(eng);
  return m;
}

Vector targets_for(const Matrix& x) {
  Vector y(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) y(i) = std::sin(6 * x(i, 0)) + x(i, 1) * x(i, 1);
  return y;
}

std::span<const double> row(const Matrix& m, Eigen::Index i) { return {m.row(i).data(), static_cast<std::size_t>(m.cols())}; }

TEST(Trees, SingleLeafPredictsMean) {
  const Matrix x = uniform(20, 3, 1);
  const Vector y = targets_for(x);
  const RegressionTree tree = fit_tree(x, y, 1, 0);
  EXPECT_EQ(tree.num_leaves(), 1);
  EXPECT_NEAR(tree.predict(row(x, 3)), y.mean(), 1e-14);
  const Vector w = weights_tree(tree, row(x, 0));
  EXPECT_LT((w.array() - 1.0 / 20).abs().maxCoeff(), 1e-15);
}

TEST(Trees, FourPointSplit) {
  Matrix x(4, 1);
  x << 0, 1, 2, 3;
  Vector y(4);
  y << 0, 0, 1, 1;
  const RegressionTree tree = fit_tree(x, y, 2, 0, 1);
  ASSERT_EQ(tree.num_leaves(), 2);
  EXPECT_EQ(tree.nodes[0].feature, 0);
  EXPECT_GT(tree.nodes[0].threshold, 1.0);
  EXPECT_LT(tree.nodes[0].threshold, 2.0);
  const double lo[] = {0.5};
  const double hi[] = {2.5};
  EXPECT_EQ(tree.predict(lo), 0.0);
  EXPECT_EQ(tree.predict(hi), 1.0);
}

TEST(Trees, ConstantTargetsDoNotSplit) {
  const Matrix x = uniform(30, 2, 2);
  const RegressionTree tree = fit_tree(x, Vector::Constant(30, 3.0), 10, 0);
  EXPECT_EQ(tree.num_leaves(), 1);
}

TEST(Trees, LeafWeightsAreUniformOverLeaf) {
  Matrix x(10, 1);
  Vector y(10);
  for (int i = 0; i < 10; ++i) {
    x(i, 0) = i;
    y(i) = i < 5 ? 0.0 : 1.0;
  }
  const RegressionTree tree = fit_tree(x, y, 2, 0, 1);
  const double x0[] = {1.5};
  const Vector w = weights_tree(tree, x0);
  for (int i = 0; i < 10; ++i) EXPECT_DOUBLE_EQ(w(i), i < 5 ? 0.2 : 0.0);
}

TEST(Trees, GrowsUntilPure) {
  const Matrix x = uniform(50, 2, 3);
  const Vector y = targets_for(x);
  const RegressionTree tree = fit_tree(x, y, 50, 4);
  EXPECT_EQ(tree.num_leaves(), 50);
  EXPECT_LT((tree.predict(x) - y).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Trees, LeafBudgetIsRespected) {
  const Matrix x = uniform(100, 3, 5);
  const RegressionTree tree = fit_tree(x, targets_for(x), 7, 1);
  EXPECT_EQ(tree.num_leaves(), 7);
}

TEST(Trees, WeightsReproducePredictions) {
  const Matrix x = uniform(60, 3, 6);
  const Vector y = targets_for(x);
  const Matrix x0 = uniform(9, 3, 7);
  const RegressionTree tree = fit_tree(x, y, 12, 2);
  const Matrix w = weights_tree_batch(tree, x0);
  EXPECT_LT((w * y - tree.predict(x0)).cwiseAbs().maxCoeff(), 1e-12);
  for (Eigen::Index k = 0; k < 9; ++k) EXPECT_NEAR(w.row(k).sum(), 1.0, 1e-14);
}

TEST(Trees, EnsembleIsMeanOfMembers) {
  const Matrix x = uniform(60, 4, 8);
  const Vector y = targets_for(x);
  const TreeEnsemble ens = fit_ensemble(x, y, 8, 4, 10);
  ASSERT_EQ(ens.size(), 4);
  for (int m = 0; m < 4; ++m) {
    EXPECT_EQ(ens.seeds[static_cast<std::size_t>(m)], Seed(11 + m));
    const RegressionTree alone = fit_tree(x, y, 8, 11 + m);
    EXPECT_EQ(alone.train_leaf_ids(), ens.trees[static_cast<std::size_t>(m)].train_leaf_ids());
  }
  const Matrix x0 = uniform(5, 4, 9);
  Matrix mean = Matrix::Zero(5, 60);
  for (const auto& t : ens.trees) mean += weights_tree_batch(t, x0) / 4.0;
  const Matrix w = weights_ensemble_batch(ens, x0);
  EXPECT_LT((w - mean).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((w * y - ens.predict(x0)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Trees, EnsembleNormIsBelowMemberAverage) {
  const Matrix x = uniform(80, 4, 10);
  const Vector y = targets_for(x);
  const TreeEnsemble ens = fit_ensemble(x, y, 20, 5, 0);
  const Matrix x0 = uniform(10, 4, 11);
  const Matrix w = weights_ensemble_batch(ens, x0);
  for (Eigen::Index k = 0; k < 10; ++k) {
    double avg = 0.0;
    for (const auto& t : ens.trees) avg += weights_tree(t, row(x0, k)).squaredNorm() / 5.0;
    EXPECT_LE(w.row(k).squaredNorm(), avg + 1e-15);
  }
}

TEST(Trees, PresortedMatchesDirect) {
  const Matrix x = uniform(300, 6, 12);
  const Vector y = targets_for(x);
  const PresortedFeatures sorted(x);
  for (int leaves : {2, 10, 50, 300}) {
    const RegressionTree a = fit_tree(x, y, leaves, 3, 2);
    const RegressionTree b = fit_tree(sorted, y, leaves, 3, 2);
    ASSERT_EQ(a.nodes.size(), b.nodes.size());
    for (std::size_t i = 0; i < a.nodes.size(); ++i) {
      EXPECT_EQ(a.nodes[i].feature, b.nodes[i].feature);
      EXPECT_EQ(a.nodes[i].threshold, b.nodes[i].threshold);
    }
    EXPECT_EQ(a.train_leaf_ids(), b.train_leaf_ids());
  }
}

TEST(Trees, SameSeedSameTree) {
  const Matrix x = uniform(100, 10, 13);
  const Vector y = targets_for(x);
  EXPECT_EQ(fit_tree(x, y, 15, 5).train_leaf_ids(), fit_tree(x, y, 15, 5).train_leaf_ids());
}

TEST(Trees, DefaultSubsetIsFloorSqrt) {
  EXPECT_EQ(default_feature_subset(784), 28);
  EXPECT_EQ(default_feature_subset(10), 3);
  EXPECT_EQ(default_feature_subset(1), 1);
}

TEST(Trees, RejectsBadArguments) {
  const Matrix x = uniform(10, 2, 1);
  EXPECT_THROW(fit_tree(x, Vector::Zero(10), 0, 0), ArgumentError);
  EXPECT_THROW(fit_tree(x, Vector::Zero(9), 2, 0), ArgumentError);
  EXPECT_THROW(fit_ensemble(x, Vector::Zero(10), 2, 0, 0), ArgumentError);
}

}  // namespace
}  // namespace smootherlab
