#pragma once

// Squared-loss gradient boosting with regression-tree base learners.
//
// f_0 = 0 and each round fits a tree to the residuals y - f_{p-1}(x), so the
// leaf values are residual means and f_p = f_{p-1} + eta * tree_p. The factor
// 1/2 of the squared loss is absorbed into eta.
//
// Smoother weights follow the round recursion
//   s_p(x0) = s_{p-1}(x0) + eta * (t_p(x0) - R_p[leaf_p(x0)]),
// where t_p is the tree's own weight vector and row j of R_p is the mean of
// s_{p-1}(x_i) over the training points in leaf j. The recursion needs the
// previous round's weights at every training point, an n x n state.

#include "smootherlab/common.hpp"
#include "smootherlab/tree_smoothers.hpp"

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace smootherlab {

inline constexpr double kDefaultLearningRate = 0.85;
inline constexpr int kDefaultBoostLeafBudget = 10;
inline constexpr double kDefaultStopTolerance = 1e-4;

struct BoostOptions {
  int n_rounds = 100;
  double learning_rate = kDefaultLearningRate;
  int leaf_budget = kDefaultBoostLeafBudget;
  Seed seed = 0;
  // Stop once the training mean squared error drops below this.
  std::optional<double> stop_tol;
  // Keep the final n x n training weight state on the model.
  bool track_weights = false;
};

struct BoostedModel {
  std::vector<RegressionTree> rounds;  // leaf means are the leaf values gamma_jp
  double learning_rate = kDefaultLearningRate;
  int leaf_budget = kDefaultBoostLeafBudget;
  Seed seed = 0;
  int n_train = 0;
  Vector train_predictions;           // f_P at the training inputs
  std::vector<double> train_mse;      // after each round
  bool stopped_early = false;
  std::optional<Matrix> train_weight_state;  // rows s_P(x_i), when tracked

  int num_rounds() const noexcept { return static_cast<int>(rounds.size()); }

  /// Prediction from the first `n_rounds` rounds; -1 means all.
  double predict(std::span<const double> x, int n_rounds = -1) const;
  Vector predict(const Matrix& inputs, int n_rounds = -1) const;
};

struct BoostEnsemble {
  std::vector<BoostedModel> members;
  std::vector<Seed> seeds;

  int size() const noexcept { return static_cast<int>(members.size()); }
  Vector predict(const Matrix& inputs, int n_rounds = -1) const;
};

/// Round p's tree is seeded with derive_seed(options.seed, p).
BoostedModel fit_boost(const Matrix& features, const Vector& targets, const BoostOptions& options);
BoostedModel fit_boost(const PresortedFeatures& features, const Vector& targets, const BoostOptions& options);
BoostedModel fit_boost(const Dataset& ds, const BoostOptions& options);

/// Members use seeds base_seed+1 ... base_seed+p_ens (options.seed is ignored).
BoostEnsemble fit_boost_ensemble(const Matrix& features, const Vector& targets,
                                 const BoostOptions& options, int p_ens, Seed base_seed);

/// Called after round p with the training state (n x n) and the weights at
/// the query inputs (m x n).
using BoostWeightVisitor = std::function<void(int round, const Matrix& train_state, const Matrix& point_weights)>;

/// Replays the recursion for rounds 1..max_rounds (-1 = all).
void replay_boost_weights(const BoostedModel& model, const Matrix& inputs, int max_rounds,
                          const BoostWeightVisitor& visit);

Vector weights_boost(const BoostedModel& model, std::span<const double> x0, int n_rounds = -1);
Matrix weights_boost_batch(const BoostedModel& model, const Matrix& inputs, int n_rounds = -1);

/// Mean of the member weights.
Matrix weights_boost_ensemble_batch(const BoostEnsemble& ensemble, const Matrix& inputs,
                                    int n_rounds = -1);

/// Training weight state s_p(x_i) after `n_rounds` rounds.
Matrix boost_train_weights(const BoostedModel& model, int n_rounds = -1);

}  // namespace smootherlab
