#pragma once

#include "smootherlab/common.hpp"
#include "smootherlab/dataset.hpp"

#include <span>
#include <vector>

namespace smootherlab {

struct TreeNode {
  int feature = -1;        // -1 for leaves
  double threshold = 0.0;  // go left iff x[feature] <= threshold
  int left = -1;
  int right = -1;
  int leaf = -1;           // index into RegressionTree::leaves for leaves
};

struct TreeLeaf {
  std::vector<int> indices;  // training rows, ascending
  double mean = 0.0;
};

/// Squared-loss regression tree grown best-first under a leaf budget.
///
/// Every node draws its own random feature order; the split search scans it
/// until `feature_subset_size` non-constant features have been evaluated.
/// Splits use midpoints between consecutive distinct values, and equal gains
/// resolve to the lower feature index, then the lower threshold.
struct RegressionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  std::vector<TreeLeaf> leaves;
  int max_leaves = 1;
  int feature_subset_size = 1;
  Seed seed = 0;
  int n_train = 0;

  int num_leaves() const noexcept { return static_cast<int>(leaves.size()); }
  int leaf_of(std::span<const double> x) const;
  double predict(std::span<const double> x) const;
  Vector predict(const Matrix& inputs) const;
  /// Leaf id of every training row.
  std::vector<int> train_leaf_ids() const;
};

struct TreeEnsemble {
  std::vector<RegressionTree> trees;
  std::vector<Seed> seeds;

  int size() const noexcept { return static_cast<int>(trees.size()); }
  double predict(std::span<const double> x) const;
  Vector predict(const Matrix& inputs) const;
};

/// Default per-node subset size: floor(sqrt(d)), at least 1.
int default_feature_subset(Eigen::Index d) noexcept;

/// Every feature column sorted once by (value, row). Trees grown on the same
/// matrix share it: large nodes read their rows off it in order instead of
/// sorting. Holds a reference to `features`.
class PresortedFeatures {
 public:
  explicit PresortedFeatures(const Matrix& features);
  PresortedFeatures(Matrix&&) = delete;

  const Matrix& features() const noexcept { return *features_; }
  std::span<const int> rows(int feature) const;
  std::span<const double> values(int feature) const;

 private:
  const Matrix* features_;
  std::size_t n_;
  std::vector<int> rows_;
  std::vector<double> values_;
};

/// `max_leaves` >= 1; values >= n mean "grow until pure". `feature_subset_size`
/// of 0 selects the default.
RegressionTree fit_tree(const Matrix& features, const Vector& targets, int max_leaves, Seed seed,
                        int feature_subset_size = 0);
RegressionTree fit_tree(const PresortedFeatures& features, const Vector& targets, int max_leaves, Seed seed,
                        int feature_subset_size = 0);
RegressionTree fit_tree(const Dataset& ds, int max_leaves, Seed seed);

/// Trees on the full data (no bootstrap) with seeds base_seed+1 ... base_seed+p_ens.
TreeEnsemble fit_ensemble(const Matrix& features, const Vector& targets, int max_leaves, int p_ens,
                          Seed base_seed, int feature_subset_size = 0);
TreeEnsemble fit_ensemble(const PresortedFeatures& features, const Vector& targets, int max_leaves, int p_ens,
                          Seed base_seed, int feature_subset_size = 0);
TreeEnsemble fit_ensemble(const Dataset& ds, int max_leaves, int p_ens, Seed base_seed);

Vector weights_tree(const RegressionTree& tree, std::span<const double> x0);
Vector weights_ensemble(const TreeEnsemble& ensemble, std::span<const double> x0);

/// out += scale * weights_tree(tree, x0).
void accumulate_tree_weights(const RegressionTree& tree, std::span<const double> x0, double scale,
                             std::span<double> out);

/// m x n weight matrices.
Matrix weights_tree_batch(const RegressionTree& tree, const Matrix& inputs);
Matrix weights_ensemble_batch(const TreeEnsemble& ensemble, const Matrix& inputs);

}  // namespace smootherlab
