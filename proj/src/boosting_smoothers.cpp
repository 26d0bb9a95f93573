#include "smootherlab/boosting_smoothers.hpp"

#include "smootherlab/kernels.hpp"
#include "smootherlab/random.hpp"

#include <algorithm>

namespace smootherlab {

namespace {

int resolve_rounds(const BoostedModel& model, int n_rounds) {
  if (n_rounds < 0) return model.num_rounds();
  if (n_rounds > model.num_rounds()) {
    throw ArgumentError("requested " + std::to_string(n_rounds) + " rounds, model has " +
                        std::to_string(model.num_rounds()));
  }
  return n_rounds;
}

std::span<double> row_span(Matrix& m, Eigen::Index r) {
  return {m.row(r).data(), static_cast<std::size_t>(m.cols())};
}

std::span<const double> row_span(const Matrix& m, Eigen::Index r) {
  return {m.row(r).data(), static_cast<std::size_t>(m.cols())};
}

}  // namespace

double BoostedModel::predict(std::span<const double> x, int n_rounds) const {
  const int p_max = resolve_rounds(*this, n_rounds);
  double f = 0.0;
  for (int p = 0; p < p_max; ++p) f += learning_rate * rounds[static_cast<std::size_t>(p)].predict(x);
  return f;
}

Vector BoostedModel::predict(const Matrix& inputs, int n_rounds) const {
  const int p_max = resolve_rounds(*this, n_rounds);
  Vector f = Vector::Zero(inputs.rows());
  for (int p = 0; p < p_max; ++p) f += learning_rate * rounds[static_cast<std::size_t>(p)].predict(inputs);
  return f;
}

Vector BoostEnsemble::predict(const Matrix& inputs, int n_rounds) const {
  Vector f = Vector::Zero(inputs.rows());
  for (const auto& m : members) f += m.predict(inputs, n_rounds);
  return f / static_cast<double>(members.size());
}

BoostedModel fit_boost(const Matrix& features, const Vector& targets, const BoostOptions& options) {
  return fit_boost(PresortedFeatures(features), targets, options);
}

BoostedModel fit_boost(const PresortedFeatures& presorted, const Vector& targets, const BoostOptions& options) {
  const Matrix& features = presorted.features();
  if (options.n_rounds < 1) throw ArgumentError("n_rounds must be >= 1");
  if (!(options.learning_rate > 0.0 && options.learning_rate <= 1.0)) {
    throw ArgumentError("learning_rate must lie in (0, 1]");
  }
  if (targets.size() != features.rows()) throw ArgumentError("target length mismatch");

  BoostedModel model;
  model.learning_rate = options.learning_rate;
  model.leaf_budget = options.leaf_budget;
  model.seed = options.seed;
  model.n_train = static_cast<int>(features.rows());
  model.train_predictions = Vector::Zero(features.rows());

  for (int p = 1; p <= options.n_rounds; ++p) {
    const Vector residuals = targets - model.train_predictions;
    RegressionTree tree = fit_tree(presorted, residuals, options.leaf_budget, derive_seed(options.seed, p));
    for (const auto& leaf : tree.leaves) {
      for (int i : leaf.indices) model.train_predictions(i) += options.learning_rate * leaf.mean;
    }
    model.rounds.push_back(std::move(tree));
    const double mse = (targets - model.train_predictions).squaredNorm() / static_cast<double>(targets.size());
    model.train_mse.push_back(mse);
    if (options.stop_tol && mse < *options.stop_tol) {
      model.stopped_early = p < options.n_rounds;
      break;
    }
  }
  if (options.track_weights) model.train_weight_state = boost_train_weights(model);
  return model;
}

BoostedModel fit_boost(const Dataset& ds, const BoostOptions& options) {
  return fit_boost(ds.features, ds.targets, options);
}

BoostEnsemble fit_boost_ensemble(const Matrix& features, const Vector& targets,
                                 const BoostOptions& options, int p_ens, Seed base_seed) {
  if (p_ens < 1) throw ArgumentError("p_ens must be >= 1");
  const PresortedFeatures presorted(features);
  BoostEnsemble ens;
  for (int m = 1; m <= p_ens; ++m) {
    BoostOptions member = options;
    member.seed = base_seed + static_cast<Seed>(m);
    ens.seeds.push_back(member.seed);
    ens.members.push_back(fit_boost(presorted, targets, member));
  }
  return ens;
}

void replay_boost_weights(const BoostedModel& model, const Matrix& inputs, int max_rounds,
                          const BoostWeightVisitor& visit) {
  const int p_max = resolve_rounds(model, max_rounds);
  const Eigen::Index n = model.n_train;
  const double eta = model.learning_rate;
  const auto d = static_cast<std::size_t>(inputs.cols());

  Matrix state = Matrix::Zero(n, n);
  Matrix points = Matrix::Zero(inputs.rows(), n);
  Matrix delta;  // one row per leaf: t_j - R_j

  for (int p = 0; p < p_max; ++p) {
    const auto& tree = model.rounds[static_cast<std::size_t>(p)];
    const auto n_leaves = static_cast<Eigen::Index>(tree.leaves.size());
    delta.setZero(n_leaves, n);
    for (Eigen::Index j = 0; j < n_leaves; ++j) {
      const auto& idx = tree.leaves[static_cast<std::size_t>(j)].indices;
      const double inv = 1.0 / static_cast<double>(idx.size());
      auto out = row_span(delta, j);
      for (int i : idx) kernels::axpy(-inv, row_span(state, i), out);
      for (int i : idx) delta(j, i) += inv;
    }
    for (Eigen::Index j = 0; j < n_leaves; ++j) {
      for (int i : tree.leaves[static_cast<std::size_t>(j)].indices) {
        kernels::axpy(eta, row_span(std::as_const(delta), j), row_span(state, i));
      }
    }
    for (Eigen::Index k = 0; k < inputs.rows(); ++k) {
      const int j = tree.leaf_of(std::span<const double>(inputs.row(k).data(), d));
      kernels::axpy(eta, row_span(std::as_const(delta), j), row_span(points, k));
    }
    if (visit) visit(p + 1, state, points);
  }
}

Matrix weights_boost_batch(const BoostedModel& model, const Matrix& inputs, int n_rounds) {
  const int p_max = resolve_rounds(model, n_rounds);
  Matrix out = Matrix::Zero(inputs.rows(), model.n_train);
  replay_boost_weights(model, inputs, p_max, [&](int p, const Matrix&, const Matrix& w) {
    if (p == p_max) out = w;
  });
  return out;
}

Vector weights_boost(const BoostedModel& model, std::span<const double> x0, int n_rounds) {
  const Matrix row = Eigen::Map<const Matrix>(x0.data(), 1, static_cast<Eigen::Index>(x0.size()));
  return weights_boost_batch(model, row, n_rounds).row(0).transpose();
}

Matrix weights_boost_ensemble_batch(const BoostEnsemble& ensemble, const Matrix& inputs, int n_rounds) {
  if (ensemble.members.empty()) throw ArgumentError("empty boosted ensemble");
  Matrix out = Matrix::Zero(inputs.rows(), ensemble.members.front().n_train);
  for (const auto& m : ensemble.members) out += weights_boost_batch(m, inputs, n_rounds);
  return out / static_cast<double>(ensemble.size());
}

Matrix boost_train_weights(const BoostedModel& model, int n_rounds) {
  const int p_max = resolve_rounds(model, n_rounds);
  Matrix out = Matrix::Zero(model.n_train, model.n_train);
  replay_boost_weights(model, Matrix(0, 1), p_max, [&](int p, const Matrix& s, const Matrix&) {
    if (p == p_max) out = s;
  });
  return out;
}

}  // namespace smootherlab
