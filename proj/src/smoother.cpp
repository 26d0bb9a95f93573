#include "smootherlab/smoother.hpp"

#include "smootherlab/kernels.hpp"

#include <algorithm>
#include <numeric>

namespace smootherlab {

Vector FittedSmoother::weights(std::span<const double> x0) const {
  const Matrix row = Eigen::Map<const Matrix>(x0.data(), 1, static_cast<Eigen::Index>(x0.size()));
  return weights_batch(row).row(0).transpose();
}

LinearSmoother::LinearSmoother(LinearFit fit, Vector y, std::optional<RffMap> map, int p_phi)
    : fit_(std::move(fit)), y_(std::move(y)), map_(std::move(map)), p_phi_(p_phi) {
  if (y_.size() != fit_.n_train()) throw ArgumentError("target length mismatch");
  if (map_ && p_phi_ != fit_.n_features()) throw ArgumentError("p_phi does not match the fit");
}

std::string LinearSmoother::name() const {
  std::string s = to_string(fit_.mode);
  if (map_) s += "(rff p_phi=" + std::to_string(p_phi_) + ")";
  return s;
}

Matrix LinearSmoother::features(const Matrix& inputs) const {
  return map_ ? transform(*map_, inputs, p_phi_) : inputs;
}

Matrix LinearSmoother::weights_batch(const Matrix& inputs) const {
  return weights_linear_batch(fit_, features(inputs));
}

Vector LinearSmoother::predict(const Matrix& inputs) const { return fit_.predict(features(inputs)); }

std::string TreeSmoother::name() const { return "tree(leaves=" + std::to_string(tree_.num_leaves()) + ")"; }

std::string EnsembleSmoother::name() const { return "forest(trees=" + std::to_string(ens_.size()) + ")"; }

std::string BoostSmoother::name() const { return "boost(rounds=" + std::to_string(model_.num_rounds()) + ")"; }

std::string BoostEnsembleSmoother::name() const {
  return "boost_ensemble(members=" + std::to_string(ens_.size()) + ")";
}

KnnSmoother::KnnSmoother(Matrix train_inputs, Vector y, int k)
    : x_(std::move(train_inputs)), y_(std::move(y)), k_(k) {
  if (y_.size() != x_.rows()) throw ArgumentError("target length mismatch");
  if (k_ < 1 || k_ > x_.rows()) throw ArgumentError("k must lie in [1, n]");
}

std::string KnnSmoother::name() const { return "knn(k=" + std::to_string(k_) + ")"; }

Matrix KnnSmoother::weights_batch(const Matrix& inputs) const {
  if (inputs.cols() != x_.cols()) throw ArgumentError("input dimension mismatch");
  const auto n = static_cast<std::size_t>(x_.rows());
  const auto d = static_cast<std::size_t>(x_.cols());
  Matrix w = Matrix::Zero(inputs.rows(), x_.rows());
  std::vector<std::pair<double, int>> dist(n);
  for (Eigen::Index q = 0; q < inputs.rows(); ++q) {
    const std::span<const double> x0(inputs.row(q).data(), d);
    for (std::size_t i = 0; i < n; ++i) {
      dist[i] = {kernels::squared_distance(x0, std::span<const double>(x_.row(static_cast<Eigen::Index>(i)).data(), d)),
                 static_cast<int>(i)};
    }
    std::partial_sort(dist.begin(), dist.begin() + k_, dist.end());
    for (int j = 0; j < k_; ++j) w(q, dist[static_cast<std::size_t>(j)].second) = 1.0 / k_;
  }
  return w;
}

Matrix MeanSmoother::weights_batch(const Matrix& inputs) const {
  return Matrix::Constant(inputs.rows(), y_.size(), 1.0 / static_cast<double>(y_.size()));
}

Vector MeanSmoother::predict(const Matrix& inputs) const {
  return Vector::Constant(inputs.rows(), y_.mean());
}

}  // namespace smootherlab
