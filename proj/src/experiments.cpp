#include "smootherlab/experiments.hpp"

#include "smootherlab/effective_params.hpp"
#include "smootherlab/kernels.hpp"
#include "smootherlab/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <set>
#include <tuple>

namespace smootherlab {

namespace {

using Clock = std::chrono::steady_clock;

struct PointOutput {
  Matrix pred_train;
  Matrix pred_test;
  double p_train = 0.0;
  double p_test = 0.0;
};

double p_from_weights(const Matrix& w, double scale = 1.0) {
  const auto n = static_cast<std::size_t>(w.cols());
  double sum = 0.0;
  if (scale == 1.0) {
    for (Eigen::Index j = 0; j < w.rows(); ++j) {
      sum += kernels::squared_norm(std::span<const double>(w.row(j).data(), n));
    }
  } else {
    Vector row(w.cols());
    for (Eigen::Index j = 0; j < w.rows(); ++j) {
      row = w.row(j).transpose() * scale;
      sum += kernels::squared_norm(std::span<const double>(row.data(), n));
    }
  }
  return static_cast<double>(w.cols()) / static_cast<double>(w.rows()) * sum;
}

class Evaluator {
 public:
  virtual ~Evaluator() = default;
  virtual void prepare(const std::vector<SweepPoint>& points) = 0;
  virtual PointOutput evaluate(const SweepPoint& point) const = 0;
};

// ---- random-feature linear families ----

class RffEvaluator final : public Evaluator {
 public:
  RffEvaluator(Family family, const SharedParams& shared, const ExperimentData& data)
      : family_(family), shared_(shared), data_(data) {}

  void prepare(const std::vector<SweepPoint>& points) override {
    int p_max = 1;
    for (const auto& p : points) p_max = std::max(p_max, phi_dim(p));
    map_ = sample_frequencies(shared_.seed, p_max, static_cast<int>(data_.train.dim()), shared_.rff_scale);
    phi_train_ = transform(map_, data_.train.features, p_max);
    phi_test_ = transform(map_, data_.test.features, p_max);
  }

  PointOutput evaluate(const SweepPoint& point) const override {
    const int p_phi = phi_dim(point);
    const Matrix train = phi_train_.leftCols(p_phi);
    const Matrix test = phi_test_.leftCols(p_phi);
    const Vector y0 = data_.y_train.col(shared_.class_index);
    LinearOptions opts;
    opts.tolerance_factor = shared_.tolerance_factor;
    opts.standardize = shared_.standardize;
    const LinearFit fit = family_ == Family::rff_linear ? fit_pcr(train, y0, point.axis1, opts)
                                                        : fit_least_squares(train, y0, opts);
    const Matrix w_train = weights_linear_batch(fit, train);
    const Matrix w_test = weights_linear_batch(fit, test);
    PointOutput out;
    out.pred_train = w_train * data_.y_train;
    out.pred_test = w_test * data_.y_train;
    out.p_train = p_from_weights(w_train);
    out.p_test = p_from_weights(w_test);
    return out;
  }

 private:
  int phi_dim(const SweepPoint& p) const {
    return family_ == Family::rff_linear ? p.axis1 + p.axis2 : p.axis1;
  }

  Family family_;
  SharedParams shared_;
  const ExperimentData& data_;
  RffMap map_;
  Matrix phi_train_;
  Matrix phi_test_;
};

// ---- tree ensembles ----

class TreeEvaluator final : public Evaluator {
 public:
  TreeEvaluator(const SharedParams& shared, const ExperimentData& data) : shared_(shared), data_(data) {}

  void prepare(const std::vector<SweepPoint>& points) override {
    std::map<int, int> members;  // P_leaf -> largest P_ens
    for (const auto& p : points) members[p.axis1] = std::max(members[p.axis1], p.axis2);
    std::vector<std::tuple<int, int, int>> jobs;  // (class, leaves, member)
    for (int c = 0; c < data_.num_targets(); ++c) {
      for (const auto& [leaves, count] : members) {
        for (int m = 1; m <= count; ++m) jobs.emplace_back(c, leaves, m);
      }
    }
    const PresortedFeatures presorted(data_.train.features);
    std::vector<Member> fitted(jobs.size());
    parallel_for(jobs.size(), [&](std::size_t j) {
      const auto [c, leaves, m] = jobs[j];
      Member& out = fitted[j];
      out.tree = fit_tree(presorted, data_.y_train.col(c), leaves,
                          shared_.seed + static_cast<Seed>(m), shared_.feature_subset);
      out.pred_train = out.tree.predict(data_.train.features);
      out.pred_test = out.tree.predict(data_.test.features);
    });
    for (std::size_t j = 0; j < jobs.size(); ++j) members_.emplace(jobs[j], std::move(fitted[j]));
  }

  PointOutput evaluate(const SweepPoint& point) const override {
    const int leaves = point.axis1;
    const int count = point.axis2;
    const double scale = 1.0 / static_cast<double>(count);
    PointOutput out;
    out.pred_train = Matrix::Zero(data_.train.size(), data_.num_targets());
    out.pred_test = Matrix::Zero(data_.test.size(), data_.num_targets());
    for (int c = 0; c < data_.num_targets(); ++c) {
      for (int m = 1; m <= count; ++m) {
        const Member& mem = members_.at({c, leaves, m});
        out.pred_train.col(c) += mem.pred_train;
        out.pred_test.col(c) += mem.pred_test;
      }
    }
    out.pred_train *= scale;
    out.pred_test *= scale;

    const auto weights = [&](const Matrix& inputs) {
      Matrix w = Matrix::Zero(inputs.rows(), data_.train.size());
      const auto d = static_cast<std::size_t>(inputs.cols());
      for (int m = 1; m <= count; ++m) {
        const auto& tree = members_.at({shared_.class_index, leaves, m}).tree;
        for (Eigen::Index k = 0; k < inputs.rows(); ++k) {
          accumulate_tree_weights(tree, std::span<const double>(inputs.row(k).data(), d), scale,
                                  std::span<double>(w.row(k).data(), static_cast<std::size_t>(w.cols())));
        }
      }
      return w;
    };
    out.p_train = p_from_weights(weights(data_.train.features));
    out.p_test = p_from_weights(weights(data_.test.features));
    return out;
  }

 private:
  struct Member {
    RegressionTree tree;
    Vector pred_train;
    Vector pred_test;
  };

  SharedParams shared_;
  const ExperimentData& data_;
  std::map<std::tuple<int, int, int>, Member> members_;
};

// ---- boosted ensembles ----

class BoostEvaluator final : public Evaluator {
 public:
  BoostEvaluator(const SharedParams& shared, const ExperimentData& data) : shared_(shared), data_(data) {}

  void prepare(const std::vector<SweepPoint>& points) override {
    int max_members = 0;
    for (const auto& p : points) max_members = std::max(max_members, p.axis2);
    // rounds[m-1]: round counts read from member m.
    std::vector<std::set<int>> rounds(static_cast<std::size_t>(max_members));
    std::map<int, std::set<int>> sizes;  // rounds -> requested P_ens
    for (const auto& p : points) {
      for (int m = 1; m <= p.axis2; ++m) rounds[static_cast<std::size_t>(m - 1)].insert(p.axis1);
      sizes[p.axis1].insert(p.axis2);
    }

    std::vector<std::pair<int, int>> jobs;  // (class, member)
    for (int c = 0; c < data_.num_targets(); ++c) {
      for (int m = 1; m <= max_members; ++m) jobs.emplace_back(c, m);
    }
    const PresortedFeatures presorted(data_.train.features);
    std::vector<BoostedModel> models(jobs.size());
    std::vector<std::map<int, std::pair<Vector, Vector>>> snaps(jobs.size());
    parallel_for(jobs.size(), [&](std::size_t j) {
      const auto [c, m] = jobs[j];
      const auto& wanted = rounds[static_cast<std::size_t>(m - 1)];
      BoostOptions opts;
      opts.n_rounds = *wanted.rbegin();
      opts.learning_rate = shared_.learning_rate;
      opts.leaf_budget = shared_.leaf_budget;
      opts.seed = shared_.seed + static_cast<Seed>(m);
      models[j] = fit_boost(presorted, data_.y_train.col(c), opts);
      Vector f_train = Vector::Zero(data_.train.size());
      Vector f_test = Vector::Zero(data_.test.size());
      for (int r = 1; r <= models[j].num_rounds(); ++r) {
        const auto& tree = models[j].rounds[static_cast<std::size_t>(r - 1)];
        f_train += opts.learning_rate * tree.predict(data_.train.features);
        f_test += opts.learning_rate * tree.predict(data_.test.features);
        if (wanted.count(r)) snaps[j].emplace(r, std::make_pair(f_train, f_test));
      }
    });
    for (std::size_t j = 0; j < jobs.size(); ++j) {
      for (auto& [r, fp] : snaps[j]) snapshots_.emplace(std::make_tuple(jobs[j].first, jobs[j].second, r), std::move(fp));
    }

    // Weights of the class_index task: member sums per requested round count,
    // released once the largest requested ensemble has been reached.
    std::map<int, std::pair<Matrix, Matrix>> acc;
    for (int m = 1; m <= max_members; ++m) {
      const auto& wanted = rounds[static_cast<std::size_t>(m - 1)];
      const auto& model = models[static_cast<std::size_t>(shared_.class_index * max_members + m - 1)];
      replay_boost_weights(model, data_.test.features, *wanted.rbegin(),
                           [&](int r, const Matrix& state, const Matrix& w) {
                             if (!wanted.count(r)) return;
                             auto it = acc.find(r);
                             if (it == acc.end()) {
                               it = acc.emplace(r, std::make_pair(Matrix::Zero(state.rows(), state.cols()),
                                                                  Matrix::Zero(w.rows(), w.cols())))
                                        .first;
                             }
                             it->second.first += state;
                             it->second.second += w;
                             const auto& need = sizes.at(r);
                             if (need.count(m)) {
                               const double scale = 1.0 / static_cast<double>(m);
                               p_values_[{r, m}] = {p_from_weights(it->second.first, scale),
                                                    p_from_weights(it->second.second, scale)};
                             }
                             if (m == *need.rbegin()) acc.erase(it);
                           });
    }
  }

  PointOutput evaluate(const SweepPoint& point) const override {
    const int r = point.axis1;
    const int count = point.axis2;
    PointOutput out;
    out.pred_train = Matrix::Zero(data_.train.size(), data_.num_targets());
    out.pred_test = Matrix::Zero(data_.test.size(), data_.num_targets());
    for (int c = 0; c < data_.num_targets(); ++c) {
      for (int m = 1; m <= count; ++m) {
        const auto& fp = snapshots_.at({c, m, r});
        out.pred_train.col(c) += fp.first;
        out.pred_test.col(c) += fp.second;
      }
    }
    out.pred_train /= static_cast<double>(count);
    out.pred_test /= static_cast<double>(count);
    const auto& p = p_values_.at({r, count});
    out.p_train = p.first;
    out.p_test = p.second;
    return out;
  }

 private:
  SharedParams shared_;
  const ExperimentData& data_;
  std::map<std::tuple<int, int, int>, std::pair<Vector, Vector>> snapshots_;  // (class, member, rounds)
  std::map<std::pair<int, int>, std::pair<double, double>> p_values_;         // (rounds, P_ens)
};

std::unique_ptr<Evaluator> make_evaluator(Family family, const SharedParams& shared, const ExperimentData& data) {
  switch (family) {
    case Family::rff_linear:
    case Family::rff_minnorm:
      return std::make_unique<RffEvaluator>(family, shared, data);
    case Family::tree:
      return std::make_unique<TreeEvaluator>(shared, data);
    case Family::boosting:
      return std::make_unique<BoostEvaluator>(shared, data);
  }
  throw ArgumentError("unknown model family");
}

}  // namespace

ExperimentData make_experiment_data(Dataset train, Dataset test) {
  train.validate();
  test.validate();
  if (train.dim() != test.dim()) {
    throw ConsistencyError("train and test dimensions differ: " + std::to_string(train.dim()) + " vs " +
                           std::to_string(test.dim()));
  }
  if (train.has_labels() != test.has_labels()) {
    throw ConsistencyError("train and test must both carry class labels or neither");
  }
  ExperimentData data;
  data.classification = train.has_labels();
  if (data.classification) {
    const int classes = std::max(train.num_classes, test.num_classes);
    train.num_classes = classes;
    test.num_classes = classes;
    data.y_train = one_hot_targets(train);
    data.y_test = one_hot_targets(test);
  } else {
    data.y_train = train.targets;
    data.y_test = test.targets;
  }
  data.train = std::move(train);
  data.test = std::move(test);
  return data;
}

double summed_squared_error(const Matrix& predictions, const Matrix& targets) {
  if (predictions.rows() != targets.rows() || predictions.cols() != targets.cols()) {
    throw ArgumentError("prediction and target shapes differ");
  }
  return (predictions - targets).squaredNorm() / static_cast<double>(targets.rows());
}

double argmax_error(const Matrix& predictions, const std::vector<int>& labels) {
  if (static_cast<std::size_t>(predictions.rows()) != labels.size()) {
    throw ArgumentError("prediction and label counts differ");
  }
  std::size_t wrong = 0;
  for (Eigen::Index i = 0; i < predictions.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < predictions.cols(); ++c) {
      if (predictions(i, c) > predictions(i, best)) best = c;
    }
    if (best != labels[static_cast<std::size_t>(i)]) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(labels.size());
}

SweepResult run_sweep(const SweepSchedule& schedule, const ExperimentData& data) {
  validate_schedule(schedule, data.train.size());
  if (schedule.shared.class_index >= data.num_targets()) {
    throw ArgumentError("class_index " + std::to_string(schedule.shared.class_index) + " out of range for " +
                        std::to_string(data.num_targets()) + " target column(s)");
  }

  auto evaluator = make_evaluator(schedule.family, schedule.shared, data);
  evaluator->prepare(schedule.points);

  const auto& names = axis_names(schedule.family);
  SweepResult result;
  result.family = schedule.family;
  result.seed = schedule.shared.seed;
  result.records.resize(schedule.points.size());
  parallel_for(schedule.points.size(), [&](std::size_t i) {
    const auto& pt = schedule.points[i];
    const auto start = Clock::now();
    const PointOutput out = evaluator->evaluate(pt);
    PointRecord& rec = result.records[i];
    rec.point_index = i;
    rec.axis1_name = names[0];
    rec.axis1_value = pt.axis1;
    rec.axis2_name = names[1];
    rec.axis2_value = pt.axis2;
    rec.mechanism = pt.mechanism;
    rec.raw_params = raw_params(schedule.family, pt.axis1, pt.axis2);
    rec.train_mse = summed_squared_error(out.pred_train, data.y_train);
    rec.test_mse = summed_squared_error(out.pred_test, data.y_test);
    rec.test_zero_one = data.classification ? argmax_error(out.pred_test, *data.test.class_labels) : 0.0;
    rec.p_train = out.p_train;
    rec.p_test = out.p_test;
    rec.seed = schedule.shared.seed;
    rec.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  });
  return result;
}

std::vector<SweepResult> run_sweep_seeds(const SweepSchedule& schedule, const std::vector<Seed>& seeds,
                                         const ExperimentData& data) {
  std::vector<SweepResult> out;
  for (Seed s : seeds) {
    SweepSchedule copy = schedule;
    copy.shared.seed = s;
    out.push_back(run_sweep(copy, data));
  }
  return out;
}

SweepResult run_grid(Family family, const std::vector<int>& axis1_values, const std::vector<int>& axis2_values,
                     const SharedParams& shared, const ExperimentData& data) {
  return run_sweep(grid_schedule(family, axis1_values, axis2_values, shared), data);
}

std::unique_ptr<FittedSmoother> fit_point_smoother(Family family, const SweepPoint& point,
                                                   const SharedParams& shared, const Matrix& train_inputs,
                                                   const Vector& targets) {
  SweepSchedule single;
  single.family = family;
  single.shared = shared;
  single.points = {point};
  validate_schedule(single, train_inputs.rows());

  switch (family) {
    case Family::rff_linear:
    case Family::rff_minnorm: {
      const int p_phi = family == Family::rff_linear ? point.axis1 + point.axis2 : point.axis1;
      RffMap map = sample_frequencies(shared.seed, p_phi, static_cast<int>(train_inputs.cols()), shared.rff_scale);
      const Matrix phi = transform(map, train_inputs, p_phi);
      LinearOptions opts;
      opts.tolerance_factor = shared.tolerance_factor;
      opts.standardize = shared.standardize;
      LinearFit fit = family == Family::rff_linear ? fit_pcr(phi, targets, point.axis1, opts)
                                                   : fit_least_squares(phi, targets, opts);
      return std::make_unique<LinearSmoother>(std::move(fit), targets, std::move(map), p_phi);
    }
    case Family::tree: {
      TreeEnsemble ens = fit_ensemble(train_inputs, targets, point.axis1, point.axis2, shared.seed,
                                      shared.feature_subset);
      if (point.axis2 == 1) return std::make_unique<TreeSmoother>(std::move(ens.trees.front()), targets);
      return std::make_unique<EnsembleSmoother>(std::move(ens), targets);
    }
    case Family::boosting: {
      BoostOptions opts;
      opts.n_rounds = point.axis1;
      opts.learning_rate = shared.learning_rate;
      opts.leaf_budget = shared.leaf_budget;
      BoostEnsemble ens = fit_boost_ensemble(train_inputs, targets, opts, point.axis2, shared.seed);
      if (point.axis2 == 1) return std::make_unique<BoostSmoother>(std::move(ens.members.front()), targets);
      return std::make_unique<BoostEnsembleSmoother>(std::move(ens), targets);
    }
  }
  throw ArgumentError("unknown model family");
}

}  // namespace smootherlab
