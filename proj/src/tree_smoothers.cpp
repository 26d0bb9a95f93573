#include "smootherlab/tree_smoothers.hpp"

#include "smootherlab/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

namespace smootherlab {

namespace {

struct SplitCandidate {
  bool valid = false;
  double gain = 0.0;
  int feature = -1;
  double threshold = 0.0;

  bool better_than(const SplitCandidate& other) const {
    if (!other.valid) return true;
    if (gain != other.gain) return gain > other.gain;
    if (feature != other.feature) return feature < other.feature;
    return threshold < other.threshold;
  }
};

struct FrontierEntry {
  double gain;
  int node;
};

struct FrontierOrder {
  // Highest gain first; among equal gains the older node.
  bool operator()(const FrontierEntry& a, const FrontierEntry& b) const {
    if (a.gain != b.gain) return a.gain < b.gain;
    return a.node > b.node;
  }
};

bool is_pure(const Vector& targets, const std::vector<int>& idx) {
  const double first = targets(idx.front());
  return std::all_of(idx.begin(), idx.end(), [&](int i) { return targets(i) == first; });
}

struct GrowState {
  const Matrix& x;
  const PresortedFeatures* sorted;  // may be null
  const Vector& targets;
  std::vector<int> node_of;         // current node of every training row
};

// Reading a node's rows off the presorted column costs n steps, sorting them
// about m log m; both give the same (value, row) order.
bool use_presorted(const GrowState& g, std::size_t m) {
  if (g.sorted == nullptr) return false;
  const double md = static_cast<double>(m);
  return static_cast<double>(g.x.rows()) < 3.0 * md * std::log2(std::max(2.0, md));
}

SplitCandidate best_split(const GrowState& g, const std::vector<int>& idx, Seed seed, int node_id,
                          int subset_size) {
  SplitCandidate best;
  if (idx.size() < 2 || is_pure(g.targets, idx)) return best;

  const Matrix& x = g.x;
  const Vector& targets = g.targets;
  const auto d = static_cast<int>(x.cols());
  const auto m = static_cast<double>(idx.size());
  double total = 0.0;
  for (int i : idx) total += targets(i);
  const bool presorted = use_presorted(g, idx.size());

  auto rng = make_engine(seed, static_cast<std::uint64_t>(node_id));
  std::vector<int> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), 0);

  std::vector<std::pair<double, int>> column(idx.size());
  int evaluated = 0;
  for (int k = 0; k < d && evaluated < subset_size; ++k) {
    std::uniform_int_distribution<int> pick(k, d - 1);
    std::swap(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(pick(rng))]);
    const int f = order[static_cast<std::size_t>(k)];

    if (presorted) {
      const auto rows = g.sorted->rows(f);
      const auto vals = g.sorted->values(f);
      std::size_t r = 0;
      for (std::size_t t = 0; t < rows.size(); ++t) {
        if (g.node_of[static_cast<std::size_t>(rows[t])] == node_id) column[r++] = {vals[t], rows[t]};
      }
      if (column.front().first == column.back().first) continue;  // constant here; draw another
    } else {
      double lo_v = x(idx.front(), f);
      double hi_v = lo_v;
      for (std::size_t r = 0; r < idx.size(); ++r) {
        const double v = x(idx[r], f);
        column[r] = {v, idx[r]};
        lo_v = std::min(lo_v, v);
        hi_v = std::max(hi_v, v);
      }
      if (lo_v == hi_v) continue;
      std::sort(column.begin(), column.end());
    }
    ++evaluated;

    double left_sum = 0.0;
    for (std::size_t r = 0; r + 1 < column.size(); ++r) {
      left_sum += targets(column[r].second);
      const double lo = column[r].first;
      const double hi = column[r + 1].first;
      if (!(lo < hi)) continue;
      const double n_left = static_cast<double>(r + 1);
      const double n_right = m - n_left;
      const double diff = left_sum / n_left - (total - left_sum) / n_right;
      // SSE(parent) - SSE(left) - SSE(right)
      const double gain = n_left * n_right / m * diff * diff;
      double threshold = lo + (hi - lo) / 2.0;
      if (!(threshold < hi)) threshold = lo;
      const SplitCandidate cand{true, gain, f, threshold};
      if (cand.better_than(best)) best = cand;
    }
  }
  return best;
}

RegressionTree grow_tree(const Matrix& features, const PresortedFeatures* sorted, const Vector& targets,
                         int max_leaves, Seed seed, int feature_subset_size) {
  if (max_leaves < 1) throw ArgumentError("max_leaves must be >= 1");
  if (features.rows() < 1 || features.cols() < 1) throw ArgumentError("empty training data");
  if (targets.size() != features.rows()) throw ArgumentError("target length mismatch");
  if (feature_subset_size < 0) throw ArgumentError("feature_subset_size must be >= 0");

  RegressionTree tree;
  tree.max_leaves = max_leaves;
  tree.seed = seed;
  tree.n_train = static_cast<int>(features.rows());
  tree.feature_subset_size = feature_subset_size == 0
                                 ? default_feature_subset(features.cols())
                                 : std::min(feature_subset_size, static_cast<int>(features.cols()));

  GrowState g{features, sorted, targets, std::vector<int>(static_cast<std::size_t>(tree.n_train), 0)};
  std::vector<std::vector<int>> node_rows(1);
  node_rows[0].resize(static_cast<std::size_t>(tree.n_train));
  std::iota(node_rows[0].begin(), node_rows[0].end(), 0);
  tree.nodes.emplace_back();

  std::vector<SplitCandidate> pending(1);
  std::priority_queue<FrontierEntry, std::vector<FrontierEntry>, FrontierOrder> frontier;
  const auto consider = [&](int node) {
    pending[static_cast<std::size_t>(node)] =
        best_split(g, node_rows[static_cast<std::size_t>(node)], seed, node, tree.feature_subset_size);
    if (pending[static_cast<std::size_t>(node)].valid) {
      frontier.push({pending[static_cast<std::size_t>(node)].gain, node});
    }
  };
  consider(0);

  int leaf_count = 1;
  while (leaf_count < max_leaves && !frontier.empty()) {
    const int node = frontier.top().node;
    frontier.pop();
    const SplitCandidate split = pending[static_cast<std::size_t>(node)];

    const int left = static_cast<int>(tree.nodes.size());
    const int right = left + 1;
    std::vector<int> left_rows;
    std::vector<int> right_rows;
    for (int i : node_rows[static_cast<std::size_t>(node)]) {
      const bool go_left = features(i, split.feature) <= split.threshold;
      (go_left ? left_rows : right_rows).push_back(i);
      g.node_of[static_cast<std::size_t>(i)] = go_left ? left : right;
    }
    node_rows[static_cast<std::size_t>(node)].clear();
    node_rows[static_cast<std::size_t>(node)].shrink_to_fit();

    tree.nodes.resize(tree.nodes.size() + 2);
    node_rows.push_back(std::move(left_rows));
    node_rows.push_back(std::move(right_rows));
    pending.resize(tree.nodes.size());
    auto& parent = tree.nodes[static_cast<std::size_t>(node)];
    parent.feature = split.feature;
    parent.threshold = split.threshold;
    parent.left = left;
    parent.right = right;
    ++leaf_count;
    consider(left);
    consider(right);
  }

  for (std::size_t node = 0; node < tree.nodes.size(); ++node) {
    if (tree.nodes[node].feature >= 0) continue;
    TreeLeaf leaf;
    leaf.indices = std::move(node_rows[node]);
    double sum = 0.0;
    for (int i : leaf.indices) sum += targets(i);
    leaf.mean = sum / static_cast<double>(leaf.indices.size());
    tree.nodes[node].leaf = static_cast<int>(tree.leaves.size());
    tree.leaves.push_back(std::move(leaf));
  }
  return tree;
}

}  // namespace

int default_feature_subset(Eigen::Index d) noexcept {
  return std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(d)))));
}

int RegressionTree::leaf_of(std::span<const double> x) const {
  int node = 0;
  while (nodes[static_cast<std::size_t>(node)].feature >= 0) {
    const auto& nd = nodes[static_cast<std::size_t>(node)];
    node = x[static_cast<std::size_t>(nd.feature)] <= nd.threshold ? nd.left : nd.right;
  }
  return nodes[static_cast<std::size_t>(node)].leaf;
}

double RegressionTree::predict(std::span<const double> x) const {
  return leaves[static_cast<std::size_t>(leaf_of(x))].mean;
}

Vector RegressionTree::predict(const Matrix& inputs) const {
  Vector out(inputs.rows());
  for (Eigen::Index i = 0; i < inputs.rows(); ++i) {
    out(i) = predict(std::span<const double>(inputs.row(i).data(), static_cast<std::size_t>(inputs.cols())));
  }
  return out;
}

std::vector<int> RegressionTree::train_leaf_ids() const {
  std::vector<int> ids(static_cast<std::size_t>(n_train), -1);
  for (std::size_t l = 0; l < leaves.size(); ++l) {
    for (int i : leaves[l].indices) ids[static_cast<std::size_t>(i)] = static_cast<int>(l);
  }
  return ids;
}

PresortedFeatures::PresortedFeatures(const Matrix& features)
    : features_(&features), n_(static_cast<std::size_t>(features.rows())) {
  const auto d = static_cast<std::size_t>(features.cols());
  rows_.resize(n_ * d);
  values_.resize(n_ * d);
  std::vector<std::pair<double, int>> column(n_);
  for (std::size_t f = 0; f < d; ++f) {
    for (std::size_t i = 0; i < n_; ++i) {
      column[i] = {features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(f)), static_cast<int>(i)};
    }
    std::sort(column.begin(), column.end());
    for (std::size_t i = 0; i < n_; ++i) {
      values_[f * n_ + i] = column[i].first;
      rows_[f * n_ + i] = column[i].second;
    }
  }
}

std::span<const int> PresortedFeatures::rows(int feature) const {
  return {rows_.data() + static_cast<std::size_t>(feature) * n_, n_};
}

std::span<const double> PresortedFeatures::values(int feature) const {
  return {values_.data() + static_cast<std::size_t>(feature) * n_, n_};
}

RegressionTree fit_tree(const Matrix& features, const Vector& targets, int max_leaves, Seed seed,
                        int feature_subset_size) {
  return grow_tree(features, nullptr, targets, max_leaves, seed, feature_subset_size);
}

RegressionTree fit_tree(const PresortedFeatures& features, const Vector& targets, int max_leaves, Seed seed,
                        int feature_subset_size) {
  return grow_tree(features.features(), &features, targets, max_leaves, seed, feature_subset_size);
}

RegressionTree fit_tree(const Dataset& ds, int max_leaves, Seed seed) {
  return fit_tree(ds.features, ds.targets, max_leaves, seed);
}

double TreeEnsemble::predict(std::span<const double> x) const {
  double sum = 0.0;
  for (const auto& t : trees) sum += t.predict(x);
  return sum / static_cast<double>(trees.size());
}

Vector TreeEnsemble::predict(const Matrix& inputs) const {
  Vector out = Vector::Zero(inputs.rows());
  for (const auto& t : trees) out += t.predict(inputs);
  return out / static_cast<double>(trees.size());
}

TreeEnsemble fit_ensemble(const Matrix& features, const Vector& targets, int max_leaves, int p_ens,
                          Seed base_seed, int feature_subset_size) {
  if (p_ens < 1) throw ArgumentError("p_ens must be >= 1");
  return fit_ensemble(PresortedFeatures(features), targets, max_leaves, p_ens, base_seed, feature_subset_size);
}

TreeEnsemble fit_ensemble(const PresortedFeatures& features, const Vector& targets, int max_leaves, int p_ens,
                          Seed base_seed, int feature_subset_size) {
  if (p_ens < 1) throw ArgumentError("p_ens must be >= 1");
  TreeEnsemble ens;
  for (int m = 1; m <= p_ens; ++m) {
    const Seed s = base_seed + static_cast<Seed>(m);
    ens.seeds.push_back(s);
    ens.trees.push_back(fit_tree(features, targets, max_leaves, s, feature_subset_size));
  }
  return ens;
}

TreeEnsemble fit_ensemble(const Dataset& ds, int max_leaves, int p_ens, Seed base_seed) {
  return fit_ensemble(ds.features, ds.targets, max_leaves, p_ens, base_seed);
}

void accumulate_tree_weights(const RegressionTree& tree, std::span<const double> x0, double scale,
                             std::span<double> out) {
  const auto& leaf = tree.leaves[static_cast<std::size_t>(tree.leaf_of(x0))];
  const double w = scale / static_cast<double>(leaf.indices.size());
  for (int i : leaf.indices) out[static_cast<std::size_t>(i)] += w;
}

Vector weights_tree(const RegressionTree& tree, std::span<const double> x0) {
  Vector w = Vector::Zero(tree.n_train);
  accumulate_tree_weights(tree, x0, 1.0, std::span<double>(w.data(), static_cast<std::size_t>(w.size())));
  return w;
}

Vector weights_ensemble(const TreeEnsemble& ensemble, std::span<const double> x0) {
  Vector w = Vector::Zero(ensemble.trees.front().n_train);
  const double scale = 1.0 / static_cast<double>(ensemble.size());
  for (const auto& t : ensemble.trees) {
    accumulate_tree_weights(t, x0, scale, std::span<double>(w.data(), static_cast<std::size_t>(w.size())));
  }
  return w;
}

Matrix weights_tree_batch(const RegressionTree& tree, const Matrix& inputs) {
  Matrix w = Matrix::Zero(inputs.rows(), tree.n_train);
  const auto d = static_cast<std::size_t>(inputs.cols());
  for (Eigen::Index k = 0; k < inputs.rows(); ++k) {
    accumulate_tree_weights(tree, std::span<const double>(inputs.row(k).data(), d), 1.0,
                            std::span<double>(w.row(k).data(), static_cast<std::size_t>(w.cols())));
  }
  return w;
}

Matrix weights_ensemble_batch(const TreeEnsemble& ensemble, const Matrix& inputs) {
  Matrix w = Matrix::Zero(inputs.rows(), ensemble.trees.front().n_train);
  const auto d = static_cast<std::size_t>(inputs.cols());
  const double scale = 1.0 / static_cast<double>(ensemble.size());
  for (Eigen::Index k = 0; k < inputs.rows(); ++k) {
    for (const auto& t : ensemble.trees) {
      accumulate_tree_weights(t, std::span<const double>(inputs.row(k).data(), d), scale,
                              std::span<double>(w.row(k).data(), static_cast<std::size_t>(w.cols())));
    }
  }
  return w;
}

}  // namespace smootherlab
