#pragma once

// Uniform view over fitted models as smoothers: f(x0) = s(x0) . y_train.

#include "smootherlab/boosting_smoothers.hpp"
#include "smootherlab/linear_smoothers.hpp"
#include "smootherlab/rff.hpp"
#include "smootherlab/tree_smoothers.hpp"

#include <memory>
#include <optional>
#include <span>
#include <string>

namespace smootherlab {

class FittedSmoother {
 public:
  virtual ~FittedSmoother() = default;

  virtual std::string name() const = 0;
  virtual Eigen::Index n_train() const = 0;
  /// True when the weights do not depend on the training targets.
  virtual bool is_linear() const = 0;
  /// Targets the model was fitted on.
  virtual const Vector& train_targets() const = 0;

  /// m x n; row k is s(inputs.row(k)). Inputs are in the original input space.
  virtual Matrix weights_batch(const Matrix& inputs) const = 0;
  virtual Vector predict(const Matrix& inputs) const = 0;

  Vector weights(std::span<const double> x0) const;
};

/// Linear fit over an optional random-feature map. Without a map the inputs
/// are used as features directly.
class LinearSmoother final : public FittedSmoother {
 public:
  LinearSmoother(LinearFit fit, Vector y, std::optional<RffMap> map = std::nullopt, int p_phi = 0);

  std::string name() const override;
  Eigen::Index n_train() const override { return fit_.n_train(); }
  bool is_linear() const override { return true; }
  const Vector& train_targets() const override { return y_; }
  Matrix weights_batch(const Matrix& inputs) const override;
  Vector predict(const Matrix& inputs) const override;

  const LinearFit& fit() const noexcept { return fit_; }
  Matrix features(const Matrix& inputs) const;

 private:
  LinearFit fit_;
  Vector y_;
  std::optional<RffMap> map_;
  int p_phi_ = 0;
};

class TreeSmoother final : public FittedSmoother {
 public:
  TreeSmoother(RegressionTree tree, Vector y) : tree_(std::move(tree)), y_(std::move(y)) {}

  std::string name() const override;
  Eigen::Index n_train() const override { return tree_.n_train; }
  bool is_linear() const override { return false; }
  const Vector& train_targets() const override { return y_; }
  Matrix weights_batch(const Matrix& inputs) const override { return weights_tree_batch(tree_, inputs); }
  Vector predict(const Matrix& inputs) const override { return tree_.predict(inputs); }

  const RegressionTree& tree() const noexcept { return tree_; }

 private:
  RegressionTree tree_;
  Vector y_;
};

class EnsembleSmoother final : public FittedSmoother {
 public:
  EnsembleSmoother(TreeEnsemble ensemble, Vector y) : ens_(std::move(ensemble)), y_(std::move(y)) {}

  std::string name() const override;
  Eigen::Index n_train() const override { return ens_.trees.front().n_train; }
  bool is_linear() const override { return false; }
  const Vector& train_targets() const override { return y_; }
  Matrix weights_batch(const Matrix& inputs) const override { return weights_ensemble_batch(ens_, inputs); }
  Vector predict(const Matrix& inputs) const override { return ens_.predict(inputs); }

 private:
  TreeEnsemble ens_;
  Vector y_;
};

class BoostSmoother final : public FittedSmoother {
 public:
  BoostSmoother(BoostedModel model, Vector y) : model_(std::move(model)), y_(std::move(y)) {}

  std::string name() const override;
  Eigen::Index n_train() const override { return model_.n_train; }
  bool is_linear() const override { return false; }
  const Vector& train_targets() const override { return y_; }
  Matrix weights_batch(const Matrix& inputs) const override { return weights_boost_batch(model_, inputs); }
  Vector predict(const Matrix& inputs) const override { return model_.predict(inputs); }

  const BoostedModel& model() const noexcept { return model_; }

 private:
  BoostedModel model_;
  Vector y_;
};

class BoostEnsembleSmoother final : public FittedSmoother {
 public:
  BoostEnsembleSmoother(BoostEnsemble ensemble, Vector y) : ens_(std::move(ensemble)), y_(std::move(y)) {}

  std::string name() const override;
  Eigen::Index n_train() const override { return ens_.members.front().n_train; }
  bool is_linear() const override { return false; }
  const Vector& train_targets() const override { return y_; }
  Matrix weights_batch(const Matrix& inputs) const override {
    return weights_boost_ensemble_batch(ens_, inputs);
  }
  Vector predict(const Matrix& inputs) const override { return ens_.predict(inputs); }

 private:
  BoostEnsemble ens_;
  Vector y_;
};

/// k nearest neighbours under Euclidean distance; ties go to the lower index.
class KnnSmoother final : public FittedSmoother {
 public:
  KnnSmoother(Matrix train_inputs, Vector y, int k);

  std::string name() const override;
  Eigen::Index n_train() const override { return x_.rows(); }
  bool is_linear() const override { return true; }
  const Vector& train_targets() const override { return y_; }
  Matrix weights_batch(const Matrix& inputs) const override;
  Vector predict(const Matrix& inputs) const override { return weights_batch(inputs) * y_; }

 private:
  Matrix x_;
  Vector y_;
  int k_;
};

/// Predicts the training mean everywhere.
class MeanSmoother final : public FittedSmoother {
 public:
  explicit MeanSmoother(Vector y) : y_(std::move(y)) {}

  std::string name() const override { return "mean"; }
  Eigen::Index n_train() const override { return y_.size(); }
  bool is_linear() const override { return true; }
  const Vector& train_targets() const override { return y_; }
  Matrix weights_batch(const Matrix& inputs) const override;
  Vector predict(const Matrix& inputs) const override;

 private:
  Vector y_;
};

}  // namespace smootherlab
